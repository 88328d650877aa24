"""Reference Hermitian eigensolver.

Cyclic-by-rows Jacobi with complex plane rotations. It shares no code with the
perturbation formulas and is the ground truth every predictor is checked
against.
"""

from typing import Optional, Tuple

import logging
import math

import numpy as np

from hermpert.config import Config
from hermpert.exceptions import ConvergenceError, DimensionMismatchError
from hermpert.structs.matrix import HermitianMatrix
from hermpert.structs.spectral import SpectralDecomposition

logger = logging.getLogger(__name__)


def _off_diagonal_mass(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off.real**2 + off.imag**2)))


def _rotation(app: float, aqq: float, apq: complex) -> Tuple[np.ndarray, bool]:
    r = abs(apq)
    if r == 0.0:
        return np.eye(2, dtype=np.complex128), False
    phase = apq / r
    theta = (aqq - app) / (2.0 * r)
    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # diag(1, conj(phase)) makes the pivot real, then a real rotation zeroes it
    g = np.array(
        [[c, s], [-s * phase.conjugate(), c * phase.conjugate()]],
        dtype=np.complex128,
    )
    return g, True


def _sweep(a: np.ndarray, v: np.ndarray) -> int:
    n = a.shape[0]
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            g, rotated = _rotation(a[p, p].real, a[q, q].real, a[p, q])
            if not rotated:
                continue
            pq = [p, q]
            a[:, pq] = a[:, pq] @ g
            a[pq, :] = g.conj().T @ a[pq, :]
            a[p, q] = a[q, p] = 0.0
            a[p, p] = a[p, p].real
            a[q, q] = a[q, q].real
            v[:, pq] = v[:, pq] @ g
            rotations += 1
    return rotations


def _fix_phases(u: np.ndarray) -> np.ndarray:
    for j in range(u.shape[1]):
        k = int(np.argmax(np.abs(u[:, j])))
        pivot = u[k, j]
        modulus = abs(pivot)
        if modulus == 0.0:
            continue
        u[:, j] *= pivot.conjugate() / modulus
        u[k, j] = modulus
    return u


def eigh(
    h: HermitianMatrix, tol: Optional[float] = None, max_sweeps: Optional[int] = None
) -> SpectralDecomposition:
    """Computes the spectral decomposition of a Hermitian matrix.

    Args:
        h: The matrix to diagonalize.
        tol: Termination threshold on the off-diagonal Frobenius mass, relative
            to the Frobenius norm of ``h``; None uses ``1e-13 * n``.
        max_sweeps: Sweep limit; None uses ``Config.JACOBI_MAX_SWEEPS``.

    Returns:
        The decomposition with eigenvalues sorted non-increasingly (stable) and
        every eigenvector column phased so that its largest entry is real and
        nonnegative.

    Raises:
        ConvergenceError: If the sweep limit is reached first.
    """
    n = h.n
    tol = Config.jacobi_tol(n, tol)
    max_sweeps = Config.JACOBI_MAX_SWEEPS if max_sweeps is None else max_sweeps

    a = np.array(h.entries, dtype=np.complex128, copy=True)
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * float(np.linalg.norm(a))

    sweeps = 0
    off = _off_diagonal_mass(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps", off
            )
        _sweep(a, v)
        sweeps += 1
        off = _off_diagonal_mass(a)
    logger.debug("jacobi n=%d converged in %d sweeps (off=%.2e)", n, sweeps, off)

    lam = np.diag(a).real
    order = np.argsort(-lam, kind="stable")
    return SpectralDecomposition.build(
        u=_fix_phases(v[:, order]), lam=lam[order], sweeps=sweeps
    )


def eigvalsh(h: HermitianMatrix, tol: Optional[float] = None) -> np.ndarray:
    return eigh(h, tol).lam


def residual(h: HermitianMatrix, d: SpectralDecomposition) -> float:
    """Returns ``||u diag(lam) u* - h||`` in the operator norm.

    Raises:
        DimensionMismatchError: If the decomposition has another dimension.
    """
    if d.n != h.n:
        raise DimensionMismatchError(
            f"decomposition of dimension {d.n} does not match matrix of dimension {h.n}"
        )
    difference = HermitianMatrix.from_array(d.reconstruct() - h.entries, 1.0)
    return float(np.max(np.abs(eigvalsh(difference))))
