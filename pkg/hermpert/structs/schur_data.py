from typing import Tuple

import numpy as np

from hermpert.structs.matrix import DenseMatrix, HermitianMatrix
from hermpert.utils.dict_struct import ArrayStruct


class SchurData(ArrayStruct, frozen=True):
    """Schur data of one eigenvalue ``rho`` with multiplicity ``l``.

    ``c`` (``l x m``) and ``d`` (``m x m``) are the coupling and complementary
    blocks of ``e_hat`` in the rho-first ordering; ``b`` is the Schur
    complement ``e_hat_11 - c (Lam_tau - rho I + d)^-1 c*`` and ``beta`` its
    eigenvalues, non-increasing.
    """

    block_index: int
    rho: float
    l: int
    m: int
    b: HermitianMatrix
    c: np.ndarray
    d: np.ndarray
    lambda_tau: np.ndarray
    beta: np.ndarray
    e11: np.ndarray
    indices: np.ndarray
    complement: np.ndarray


class RefinedPrediction(ArrayStruct, frozen=True):
    xi_hat: np.ndarray
    variant: str
    b_norms: np.ndarray
    c_norms: np.ndarray
    b_tilde_gaps: np.ndarray
    ambiguous_blocks: Tuple[int, ...] = ()

    def error_scale(self) -> np.ndarray:
        """Per-block ``||B|| ||C||^2``."""
        return self.b_norms * self.c_norms**2


class SimilarityDiagnostic(ArrayStruct, frozen=True):
    transformed: DenseMatrix
    order: np.ndarray
    q2_norm: float
    q3_norm: float
    b_norm: float
    c_norm: float

    @property
    def q3_ratio(self) -> float:
        scale = self.b_norm * self.c_norm
        return self.q3_norm / scale if scale > 0.0 else 0.0
