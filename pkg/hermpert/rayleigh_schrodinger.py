"""Expansion of the eigensystem of ``A + tF`` around ``t = 0``.

Eigenvalues are expanded to second order and eigenvectors to first order.
The eigenvector derivative ``U'(0) = U (N - M o F_hat)`` needs ``F_hat``
block-wise diagonal with strictly decreasing diagonal inside every block of
``A``.
"""

from typing import Optional

import logging

import numpy as np

from hermpert.alignment import m_matrix, min_block_gap
from hermpert.config import Config
from hermpert.core import hadamard, pinv_diagonal
from hermpert.exceptions import DegenerateDirectionError, GapTooSmallError, ModeError
from hermpert.structs.aligned import AlignedPerturbation, AlignmentMode, MMatrix
from hermpert.structs.line import EigensystemPrediction, LineExpansion, RSCoefficients
from hermpert.structs.matrix import DenseMatrix
from hermpert.utils.dict_struct import frozen_array

logger = logging.getLogger(__name__)


def _require_blockwise(ap: AlignedPerturbation) -> None:
    if ap.mode is not AlignmentMode.BLOCKWISE_DIAGONAL:
        raise ModeError(
            f"expansion along a line needs a block-wise diagonal alignment, "
            f"got {ap.mode.value}"
        )


def rs_coefficients(
    ap: AlignedPerturbation, m: Optional[MMatrix] = None
) -> RSCoefficients:
    """Computes ``a0 = alpha``, ``a1 = diag(F_hat)`` and the second-order terms

    ``a2_j = sum_k |F_hat(k, j)|^2 / (alpha_j - alpha_k)`` over ``k`` outside
    the block of ``j``.

    Raises:
        ModeError: If ``ap`` is raw.
    """
    _require_blockwise(ap)
    m = m if m is not None else m_matrix(ap.base, ap.blocks)
    f_abs2 = np.abs(ap.e_hat.entries) ** 2
    a2 = np.sum(m.entries * f_abs2, axis=1)
    return RSCoefficients(
        a0=frozen_array(ap.alpha),
        a1=frozen_array(ap.e_hat_diag),
        a2=frozen_array(a2),
    )


def second_order_pinv_form(ap: AlignedPerturbation) -> np.ndarray:
    """``a2`` as ``-(F_hat* (Lam - alpha_j I)^+ F_hat)(j, j)``."""
    f_hat = ap.e_hat.entries
    out = np.empty(ap.n)
    for j in range(ap.n):
        weights = pinv_diagonal(ap.alpha - ap.alpha[j], scale=ap.a_norm)
        out[j] = -float(np.real(np.vdot(f_hat[:, j], weights * f_hat[:, j])))
    return out


def _check_strictly_decreasing(ap: AlignedPerturbation) -> None:
    if ap.tied_blocks:
        b = ap.tied_blocks[0]
        raise DegenerateDirectionError(
            f"block {b}: tied diagonal entries of F_hat", block=b
        )
    threshold = Config.STRICTNESS_TOL * max(1.0, ap.e_norm)
    for b in ap.blocks.multi_blocks():
        diag = ap.e_hat_diag[ap.blocks.indices(b)]
        gaps = diag[:-1] - diag[1:]
        if np.any(gaps <= threshold):
            raise DegenerateDirectionError(
                f"block {b}: diagonal of F_hat is not strictly decreasing "
                f"(smallest gap {float(np.min(gaps)):.3e} <= {threshold:.3e})",
                block=b,
            )


def n_matrix(ap: AlignedPerturbation) -> DenseMatrix:
    """Builds the in-block rotation ``N``.

    For ``i != j`` in one block with eigenvalue ``rho``::

        N(i, j) = sum_k conj(F_hat(k, i)) F_hat(k, j) / (alpha_k - rho)
                  / (F_hat(i, i) - F_hat(j, j))

    with ``k`` running outside the block; every other entry is zero. The
    upper triangle is computed and mirrored as ``-conj``, so ``N`` is exactly
    skew-Hermitian.

    Raises:
        ModeError: If ``ap`` is raw.
        DegenerateDirectionError: If some block has tied diagonal entries.
    """
    _require_blockwise(ap)
    _check_strictly_decreasing(ap)
    f_hat = ap.e_hat.entries
    diag = ap.e_hat_diag
    n = np.zeros((ap.n, ap.n), dtype=np.complex128)
    for b in ap.blocks.multi_blocks():
        idx = ap.blocks.indices(b)
        rest = ap.blocks.complement(b)
        rho = ap.blocks.rep_values[b]
        coupling = f_hat[np.ix_(rest, idx)]
        weights = 1.0 / (ap.alpha[rest] - rho)
        second = coupling.conj().T @ (weights[:, None] * coupling)
        for p, i in enumerate(idx):
            for q in range(p + 1, idx.size):
                j = idx[q]
                n[i, j] = second[p, q] / (diag[i] - diag[j])
                n[j, i] = -np.conj(n[i, j])
    return DenseMatrix.from_array(n)


def eigenvector_derivative(
    ap: AlignedPerturbation, m: Optional[MMatrix] = None
) -> DenseMatrix:
    """Returns ``U'(0) = U (N - M o F_hat)``."""
    m = m if m is not None else m_matrix(ap.base, ap.blocks)
    n = n_matrix(ap).entries
    return DenseMatrix.from_array(ap.u @ (n - hadamard(m.entries, ap.e_hat.entries)))


def line_expansion(
    ap: AlignedPerturbation, m: Optional[MMatrix] = None
) -> LineExpansion:
    m = m if m is not None else m_matrix(ap.base, ap.blocks)
    coefficients = rs_coefficients(ap, m)
    n = n_matrix(ap)
    u_prime = ap.u @ (n.entries - hadamard(m.entries, ap.e_hat.entries))
    return LineExpansion(
        base=ap.base,
        f_hat=ap.e_hat,
        a0=coefficients.a0,
        a1=coefficients.a1,
        a2=coefficients.a2,
        n_mat=n,
        u_prime=DenseMatrix.from_array(u_prime),
    )


def predict_eigensystem(
    ap: AlignedPerturbation, m: Optional[MMatrix], t: float
) -> EigensystemPrediction:
    """Evaluates ``xi_hat(t) = a0 + t a1 + t^2 a2`` and ``u_hat(t) = U + t U'(0)``.

    Raises:
        GapTooSmallError: If ``|t| ||F||`` is not below half the smallest gap
            between distinct eigenvalues of ``A``.
        DegenerateDirectionError: As :func:`n_matrix`.
    """
    gap = min_block_gap(ap.blocks)
    if not abs(t) * ap.e_norm < gap / 2:
        raise GapTooSmallError(
            f"|t| ||F|| = {abs(t) * ap.e_norm:.3e} is not below half "
            f"the eigenvalue gap {gap:.3e}"
        )
    expansion = line_expansion(ap, m)
    logger.debug("evaluating line expansion at t=%g", t)
    return EigensystemPrediction(
        t=float(t),
        xi_hat=frozen_array(expansion.evaluate(t)),
        u_hat=DenseMatrix.from_array(ap.u + t * expansion.u_prime.entries),
    )
