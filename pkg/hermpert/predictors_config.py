from enum import Enum

from hermpert.alignment import m_matrix
from hermpert.first_order import (
    approx_decomposition_residual,
    first_order_eigenvalues,
    first_order_prediction,
    u_approx,
)
from hermpert.predictor import Metric, Predictor
from hermpert.rayleigh_schrodinger import (
    eigenvector_derivative,
    predict_eigensystem,
    rs_coefficients,
)
from hermpert.schur import SchurVariant, refined_eigenvalues
from hermpert.structs.study import PredictorName


class PredictorsConfig(Enum):
    FIRST_ORDER = Predictor(
        name=PredictorName.FIRST_ORDER.value,
        f_name="first_order_error",
        metric=Metric.EIGENVALUE,
        predict=lambda ap, t: first_order_eigenvalues(ap),
        expected_order=2.0,
        min_slope=1.9,
        description="Eigenvalues alpha + diag(E_hat) on the block-wise diagonal basis.",
    )
    SCHUR_FULL = Predictor(
        name=PredictorName.SCHUR_FULL.value,
        f_name="schur_full_error",
        metric=Metric.EIGENVALUE,
        predict=lambda ap, t: refined_eigenvalues(ap, SchurVariant.FULL),
        expected_order=3.0,
        min_slope=2.7,
        description="Eigenvalues alpha + beta from the Schur complements B.",
    )
    SCHUR_SIMPLIFIED = Predictor(
        name=PredictorName.SCHUR_SIMPLIFIED.value,
        f_name="schur_simplified_error",
        metric=Metric.EIGENVALUE,
        predict=lambda ap, t: refined_eigenvalues(ap, SchurVariant.SIMPLIFIED),
        expected_order=3.0,
        min_slope=2.7,
        description="Eigenvalues alpha + beta from the Schur complements without D.",
    )
    RS_SECOND_ORDER = Predictor(
        name=PredictorName.RS_SECOND_ORDER.value,
        f_name="rs_second_order_error",
        metric=Metric.EIGENVALUE,
        predict=lambda ap, t: rs_coefficients(ap).evaluate(t),
        expected_order=3.0,
        min_slope=2.7,
        along_line=True,
        description="Eigenvalues a0 + t a1 + t^2 a2 along the line A + tF.",
    )
    EIGVEC_FIRST_ORDER = Predictor(
        name=PredictorName.EIGVEC_FIRST_ORDER.value,
        f_name="eigvec_first_order_error",
        metric=Metric.EIGENVECTOR,
        predict=lambda ap, t: predict_eigensystem(ap, None, t).u_hat.entries,
        expected_order=2.0,
        min_slope=1.8,
        along_line=True,
        description="Eigenvectors U + t U'(0) along the line A + tF.",
    )
    EIGVEC_DIFFERENCE_QUOTIENT = Predictor(
        name=PredictorName.EIGVEC_DIFFERENCE_QUOTIENT.value,
        f_name="eigvec_difference_quotient_error",
        metric=Metric.DIFFERENCE_QUOTIENT,
        predict=lambda ap, t: eigenvector_derivative(ap).entries,
        expected_order=1.0,
        min_slope=0.9,
        along_line=True,
        description="Difference quotient (U(t) - U) / t against U'(0).",
    )
    U_AP_RESIDUAL = Predictor(
        name=PredictorName.U_AP_RESIDUAL.value,
        f_name="u_ap_residual_error",
        metric=Metric.RESIDUAL,
        predict=lambda ap, t: approx_decomposition_residual(
            ap, m_matrix(ap.base, ap.blocks)
        ),
        expected_order=2.0,
        min_slope=1.8,
        description="Residual of the approximate decomposition with U_ap.",
        diagnostic=lambda ap: first_order_prediction(ap).k_ratio,
    )
    EIGVEC_U_AP = Predictor(
        name=PredictorName.EIGVEC_U_AP.value,
        f_name="eigvec_u_ap_error",
        metric=Metric.EIGENVECTOR,
        predict=lambda ap, t: u_approx(ap, m_matrix(ap.base, ap.blocks)).entries,
        expected_order=2.0,
        min_slope=1.8,
        description=(
            "Eigenvectors U (I - M o E_hat). Second order only when the Schur "
            "complements are diagonal, as on the cone ensemble."
        ),
    )

    @classmethod
    def by_name(cls, name: PredictorName) -> Predictor:
        return cls[PredictorName(name).name].value
