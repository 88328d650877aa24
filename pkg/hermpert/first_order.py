"""First-order eigenvalue and eigenvector predictions."""

from typing import List, Optional

import numpy as np

from hermpert.alignment import m_matrix
from hermpert.core import hadamard, operator_norm
from hermpert.exceptions import DimensionMismatchError, ModeError
from hermpert.structs.aligned import AlignedPerturbation, AlignmentMode, MMatrix
from hermpert.structs.matrix import DenseMatrix, HermitianMatrix
from hermpert.structs.prediction import FirstOrderPrediction, GershgorinDisc, WeylCheck
from hermpert.utils.dict_struct import frozen_array


def first_order_eigenvalues(ap: AlignedPerturbation) -> np.ndarray:
    """Returns ``alpha_j + E_hat(j, j)``.

    Raises:
        ModeError: If ``ap`` is not block-wise diagonal; only then does the
            in-block diagonal carry the first-order shifts in the right order.
    """
    if ap.mode is not AlignmentMode.BLOCKWISE_DIAGONAL:
        raise ModeError(
            f"first-order eigenvalues need a block-wise diagonal alignment, "
            f"got {ap.mode.value}"
        )
    return frozen_array(ap.alpha + ap.e_hat_diag)


def gershgorin_intervals(ap: AlignedPerturbation) -> List[GershgorinDisc]:
    """Row discs of ``Lam + E_hat``.

    Their union holds every eigenvalue of ``A + E``.
    """
    e_hat = ap.e_hat.entries
    radii = np.sum(np.abs(e_hat), axis=1) - np.abs(np.diag(e_hat))
    centers = ap.alpha + ap.e_hat_diag
    return [
        GershgorinDisc(center=float(c), radius=float(max(r, 0.0)))
        for c, r in zip(centers, radii)
    ]


def in_disc_union(
    values: np.ndarray, discs: List[GershgorinDisc], tol: float = 0.0
) -> np.ndarray:
    return np.array(
        [any(d.contains(float(v), tol) for d in discs) for v in np.ravel(values)],
        dtype=bool,
    )


def _check_m(ap: AlignedPerturbation, m: MMatrix) -> None:
    if m.entries.shape != (ap.n, ap.n):
        raise DimensionMismatchError(
            f"M of shape {m.entries.shape} does not match dimension {ap.n}"
        )


def u_approx(ap: AlignedPerturbation, m: MMatrix) -> DenseMatrix:
    """Approximate eigenvectors ``U (I - M o E_hat)``.

    Raises:
        DimensionMismatchError: If ``m`` was built for another dimension.
    """
    _check_m(ap, m)
    rotation = np.eye(ap.n) - hadamard(m.entries, ap.e_hat.entries)
    return DenseMatrix.from_array(ap.u @ rotation)


def approx_decomposition_residual(ap: AlignedPerturbation, m: MMatrix) -> float:
    """Returns ``||(A + E) - U_ap (Lam + diag(E_hat)) U_ap*||``.

    The value is ``O(||E||^2)``.
    """
    u_ap = u_approx(ap, m).entries
    perturbed = ap.u @ (np.diag(ap.alpha) + ap.e_hat.entries) @ ap.u.conj().T
    approximated = (u_ap * (ap.alpha + ap.e_hat_diag)) @ u_ap.conj().T
    return operator_norm(HermitianMatrix.from_array(perturbed - approximated, 1.0))


def orthonormality_defect(u: DenseMatrix) -> float:
    gram = u.entries.conj().T @ u.entries
    return operator_norm(HermitianMatrix.from_array(gram - np.eye(u.cols), 1.0))


def first_order_prediction(
    ap: AlignedPerturbation, m: Optional[MMatrix] = None
) -> FirstOrderPrediction:
    """Collects the first-order eigenvalues, ``U_ap`` and its measured defects.

    Args:
        ap: A block-wise diagonal alignment.
        m: The gap matrix for ``ap``; built from ``ap`` when None.

    Returns:
        The prediction, with ``k_ratio = ||U_ap* U_ap - I|| / ||E||^2`` and the
        approximate-decomposition residual.
    """
    xi_hat = first_order_eigenvalues(ap)
    m = m if m is not None else m_matrix(ap.base, ap.blocks)
    u_ap = u_approx(ap, m)
    k_ratio = orthonormality_defect(u_ap) / ap.e_norm**2 if ap.e_norm > 0.0 else 0.0
    return FirstOrderPrediction(
        xi_hat=xi_hat,
        u_ap=u_ap,
        blocks=ap.blocks,
        k_ratio=k_ratio,
        residual=approx_decomposition_residual(ap, m),
    )


def weyl_bound(
    alpha: np.ndarray, xi: np.ndarray, e_norm: float, rel_tol: float = 1e-10
) -> WeylCheck:
    """Compares ``max|xi - alpha|`` with ``||E||``, both sorted non-increasingly."""
    alpha = np.sort(np.asarray(alpha, dtype=np.float64))[::-1]
    xi = np.sort(np.asarray(xi, dtype=np.float64))[::-1]
    if alpha.shape != xi.shape:
        raise DimensionMismatchError(
            f"cannot compare {alpha.size} eigenvalues with {xi.size}"
        )
    shift = float(np.max(np.abs(xi - alpha))) if xi.size else 0.0
    # rounding of the oracle itself
    slack = 1e-12 * max(1.0, float(np.max(np.abs(alpha)))) if alpha.size else 0.0
    return WeylCheck(
        max_shift=shift,
        e_norm=e_norm,
        holds=shift <= e_norm * (1.0 + rel_tol) + slack,
    )
