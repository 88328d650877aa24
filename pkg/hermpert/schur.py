"""Schur complements of degenerate eigenvalues and the refined eigenvalue predictor."""

from typing import List, Optional

import logging
from enum import Enum

import numpy as np

from hermpert.config import Config, pick
from hermpert.core import operator_norm, pinv_diagonal
from hermpert.exceptions import GapTooSmallError
from hermpert.jacobi_oracle import eigvalsh
from hermpert.structs.aligned import AlignedPerturbation
from hermpert.structs.matrix import DenseMatrix, HermitianMatrix
from hermpert.structs.schur_data import (
    RefinedPrediction,
    SchurData,
    SimilarityDiagnostic,
)
from hermpert.utils.dict_struct import frozen_array

logger = logging.getLogger(__name__)


class SchurVariant(str, Enum):
    FULL = "full"
    SIMPLIFIED = "simplified"


def _check_margin(ap: AlignedPerturbation, block: int, margin: Optional[float]) -> None:
    factor = pick(margin, Config.SCHUR_MARGIN)
    rho = float(ap.blocks.rep_values[block])
    tau = ap.alpha[ap.blocks.complement(block)]
    if tau.size == 0:
        return
    distance = float(np.min(np.abs(tau - rho)))
    if not distance > factor * ap.e_norm:
        raise GapTooSmallError(
            f"block {block} (rho={rho:.6g}): distance {distance:.3e} to the other "
            f"eigenvalues is not above {factor:g} * ||E|| = {factor * ap.e_norm:.3e}",
            block=block,
        )


def schur_data(
    ap: AlignedPerturbation, block: int, margin: Optional[float] = None
) -> SchurData:
    """Computes ``B``, ``C``, ``D`` for one block of ``ap``.

    The computation runs on ``A - rho I + E`` in the rho-first ordering; the
    outputs refer to the block's own indices and its complement in global
    order.

    Args:
        ap: The aligned perturbation (either mode).
        block: The block id.
        margin: Required distance of the other eigenvalues to ``rho`` in units
            of ``||E||``; None uses ``Config.SCHUR_MARGIN``.

    Raises:
        GapTooSmallError: If the margin does not hold.
    """
    _check_margin(ap, block, margin)
    idx = ap.blocks.indices(block)
    rest = ap.blocks.complement(block)
    rho = float(ap.blocks.rep_values[block])
    e_hat = ap.e_hat.entries

    e11 = e_hat[np.ix_(idx, idx)]
    c = e_hat[np.ix_(idx, rest)]
    d = e_hat[np.ix_(rest, rest)]
    tau = ap.alpha[rest]

    if rest.size:
        shifted = np.diag(tau - rho) + d
        b_entries = e11 - c @ np.linalg.solve(shifted, c.conj().T)
    else:
        b_entries = e11
    b = HermitianMatrix.from_array(b_entries, 1.0)
    return SchurData(
        block_index=block,
        rho=rho,
        l=int(idx.size),
        m=int(rest.size),
        b=b,
        c=frozen_array(c),
        d=frozen_array(d),
        lambda_tau=frozen_array(tau),
        beta=frozen_array(eigvalsh(b)),
        e11=frozen_array(e11),
        indices=frozen_array(idx),
        complement=frozen_array(rest),
    )


def simplified_schur(data: SchurData, a_norm: float = 1.0) -> HermitianMatrix:
    """``e_hat_11 - C (Lam_tau - rho I)^+ C*``, the Schur complement without ``D``."""
    if data.m == 0:
        return HermitianMatrix.from_array(data.e11, 1.0)
    weights = pinv_diagonal(data.lambda_tau - data.rho, scale=a_norm)
    return HermitianMatrix.from_array(
        data.e11 - (data.c * weights[None, :]) @ data.c.conj().T, 1.0
    )


def _ambiguous(beta: np.ndarray) -> bool:
    return beta.size > 1 and bool(np.any(np.abs(np.diff(beta)) <= Config.PAIRING_TOL))


def refined_prediction(
    ap: AlignedPerturbation,
    variant: SchurVariant = SchurVariant.FULL,
    margin: Optional[float] = None,
) -> RefinedPrediction:
    """Predicts every eigenvalue of ``A + E`` as ``alpha_j + beta_(j-i)``.

    ``beta`` are the non-increasing eigenvalues of the block's Schur complement
    (``variant`` full) or of the complement with ``D`` removed (simplified).

    Raises:
        GapTooSmallError: If any block violates the margin.
    """
    variant = SchurVariant(variant)
    xi_hat = np.array(ap.alpha, dtype=np.float64, copy=True)
    b_norms: List[float] = []
    c_norms: List[float] = []
    gaps: List[float] = []
    ambiguous = []
    for block in range(len(ap.blocks)):
        data = schur_data(ap, block, margin)
        b_tilde = simplified_schur(data, ap.a_norm)
        beta = data.beta if variant is SchurVariant.FULL else eigvalsh(b_tilde)
        xi_hat[data.indices] = ap.alpha[data.indices] + beta
        b_norms.append(operator_norm(data.b))
        c_norms.append(operator_norm(data.c) if data.m else 0.0)
        difference = HermitianMatrix.from_array(data.b.entries - b_tilde.entries, 1.0)
        gaps.append(operator_norm(difference))
        if _ambiguous(beta):
            ambiguous.append(block)
    if ambiguous:
        logger.info("ambiguous within-block pairing in blocks %s", ambiguous)
    return RefinedPrediction(
        xi_hat=frozen_array(xi_hat),
        variant=variant.value,
        b_norms=frozen_array(b_norms),
        c_norms=frozen_array(c_norms),
        b_tilde_gaps=frozen_array(gaps),
        ambiguous_blocks=tuple(ambiguous),
    )


def refined_eigenvalues(
    ap: AlignedPerturbation,
    variant: SchurVariant = SchurVariant.FULL,
    margin: Optional[float] = None,
) -> np.ndarray:
    return refined_prediction(ap, variant, margin).xi_hat


def schur_similarity_diagnostic(
    ap: AlignedPerturbation, block: int, margin: Optional[float] = None
) -> SimilarityDiagnostic:
    """Applies the non-unitary similarity that decouples the block from its complement.

    In the rho-first ordering, with ``K = Lam_tau - rho I + D``, conjugating by
    ``[[I, 0], [-K^-1 C*, I]]`` gives ``[[B, C], [K^-1 C* B, K + K^-1 C* C]]``
    (plus ``rho I``), which has the eigenvalues of ``A + E``. Its second
    quadrant is ``C`` and its third quadrant is of order ``||B|| ||C||``.
    """
    data = schur_data(ap, block, margin)
    order = np.concatenate([data.indices, data.complement])
    l, m = data.l, data.m
    b = data.b.entries
    transformed = np.zeros((l + m, l + m), dtype=np.complex128)
    transformed[:l, :l] = b
    q3_norm = 0.0
    if m:
        k = np.diag(data.lambda_tau - data.rho) + data.d
        k_inv_c_adj = np.linalg.solve(k, data.c.conj().T)
        third = k_inv_c_adj @ b
        transformed[:l, l:] = data.c
        transformed[l:, :l] = third
        transformed[l:, l:] = k + k_inv_c_adj @ data.c
        q3_norm = operator_norm(third)
    transformed += data.rho * np.eye(l + m)
    return SimilarityDiagnostic(
        transformed=DenseMatrix.from_array(transformed),
        order=frozen_array(order),
        q2_norm=operator_norm(data.c) if m else 0.0,
        q3_norm=q3_norm,
        b_norm=operator_norm(data.b),
        c_norm=operator_norm(data.c) if m else 0.0,
    )
