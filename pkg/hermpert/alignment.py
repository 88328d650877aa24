"""Choosing and exploiting the eigenbasis of the unperturbed matrix."""

from typing import List, Optional, Tuple

import logging

import numpy as np

from hermpert.config import Config, pick
from hermpert.core import hadamard, operator_norm
from hermpert.exceptions import DimensionMismatchError, GapTooSmallError
from hermpert.jacobi_oracle import eigh
from hermpert.schur import schur_data
from hermpert.structs.aligned import (
    AlignedPerturbation,
    AlignmentMode,
    BlockWitness,
    MMatrix,
    VcReport,
)
from hermpert.structs.matrix import HermitianMatrix
from hermpert.structs.spectral import BlockStructure, SpectralDecomposition
from hermpert.utils.dict_struct import frozen_array

logger = logging.getLogger(__name__)


def group_eigenvalues(
    lam: np.ndarray, rel_gap_tol: Optional[float] = None
) -> BlockStructure:
    """Groups a non-increasing eigenvalue vector into blocks.

    Consecutive eigenvalues whose gap is at most
    ``rel_gap_tol * max(1, max|lam|)`` share a block, so a gap exactly at the
    tolerance joins the earlier group.

    Args:
        lam: Eigenvalues, non-increasing.
        rel_gap_tol: Relative tolerance; None uses ``Config.GROUPING_TOL``.

    Returns:
        The block structure.
    """
    lam = np.asarray(lam, dtype=np.float64)
    tol = pick(rel_gap_tol, Config.GROUPING_TOL)
    if lam.size == 0:
        return BlockStructure.build([], lam)
    threshold = tol * max(1.0, float(np.max(np.abs(lam))))
    groups: List[Tuple[int, int]] = []
    start = 0
    for i in range(1, lam.size):
        if lam[i - 1] - lam[i] > threshold:
            groups.append((start, i))
            start = i
    groups.append((start, lam.size))
    return BlockStructure.build(groups, lam)


def _tied_blocks(
    blocks: BlockStructure, diag: np.ndarray, e_norm: float
) -> Tuple[int, ...]:
    threshold = Config.TIE_TOL * e_norm
    tied = []
    for b in blocks.multi_blocks():
        values = diag[blocks.indices(b)]
        if np.any(np.abs(np.diff(values)) <= threshold):
            tied.append(b)
    return tuple(tied)


def _assemble(
    base: SpectralDecomposition,
    blocks: BlockStructure,
    e_hat: HermitianMatrix,
    mode: AlignmentMode,
    e_norm: float,
    a_norm: float,
) -> AlignedPerturbation:
    diag = np.diag(e_hat.entries).real.copy()
    off = np.array(e_hat.entries, copy=True)
    np.fill_diagonal(off, 0.0)
    tied: Tuple[int, ...] = ()
    if mode is AlignmentMode.BLOCKWISE_DIAGONAL:
        tied = _tied_blocks(blocks, diag, e_norm)
    if tied and e_norm > 0.0:
        logger.warning("tied in-block diagonal entries in blocks %s", tied)
    return AlignedPerturbation(
        base=base,
        blocks=blocks,
        e_hat=e_hat,
        e_hat_diag=frozen_array(diag),
        e_hat_off=HermitianMatrix(entries=frozen_array(off)),
        mode=mode,
        e_norm=e_norm,
        a_norm=a_norm,
        tied_blocks=tied,
    )


def conjugate_to_eigenbasis(
    base: SpectralDecomposition,
    e: HermitianMatrix,
    rel_gap_tol: Optional[float] = None,
) -> AlignedPerturbation:
    """Expresses ``e`` in the eigenbasis ``base.u``: ``e_hat = u* e u``.

    Raises:
        DimensionMismatchError: If ``e`` and ``base`` differ in dimension.
    """
    if e.n != base.n:
        raise DimensionMismatchError(
            f"perturbation of dimension {e.n} does not match "
            f"basis of dimension {base.n}"
        )
    u = base.u
    e_hat = HermitianMatrix.from_array(u.conj().T @ e.entries @ u, 1.0)
    blocks = group_eigenvalues(base.lam, rel_gap_tol)
    a_norm = float(np.max(np.abs(base.lam))) if base.n else 0.0
    return _assemble(base, blocks, e_hat, AlignmentMode.RAW, operator_norm(e), a_norm)


def _check_block_diagonal(
    e_hat: HermitianMatrix, blocks: BlockStructure, e_norm: float
) -> None:
    tol = Config.BLOCK_DIAGONAL_TOL * e_norm
    for b in blocks.multi_blocks():
        idx = blocks.indices(b)
        sub = e_hat.entries[np.ix_(idx, idx)]
        off = float(np.max(np.abs(sub - np.diag(np.diag(sub)))))
        if off > tol:
            logger.warning("block %d keeps off-diagonal mass %.2e", b, off)


def blockwise_diagonalize(ap: AlignedPerturbation) -> AlignedPerturbation:
    """Rotates each eigenspace so that ``e_hat`` becomes block-wise diagonal.

    Within every block the basis is replaced by the eigenvectors of the
    corresponding diagonal block of ``e_hat``, whose diagonal then comes out
    non-increasing. Eigenvalues are unchanged, and an already block-wise
    diagonal input comes back with ``e_hat`` unchanged up to rounding.
    """
    n = ap.n
    w = np.eye(n, dtype=np.complex128)
    for b in ap.blocks.multi_blocks():
        idx = ap.blocks.indices(b)
        sub = HermitianMatrix.from_array(ap.e_hat.entries[np.ix_(idx, idx)], 1.0)
        w[np.ix_(idx, idx)] = eigh(sub).u
        logger.debug("rotated block %d of size %d", b, idx.size)
    u = ap.base.u @ w
    e_hat = HermitianMatrix.from_array(w.conj().T @ ap.e_hat.entries @ w, 1.0)
    base = SpectralDecomposition.build(u, ap.base.lam, ap.base.sweeps)
    _check_block_diagonal(e_hat, ap.blocks, ap.e_norm)
    return _assemble(
        base, ap.blocks, e_hat, AlignmentMode.BLOCKWISE_DIAGONAL, ap.e_norm, ap.a_norm
    )


def align(
    a: HermitianMatrix,
    e: HermitianMatrix,
    rel_gap_tol: Optional[float] = None,
    blockwise: bool = True,
) -> AlignedPerturbation:
    """Diagonalizes ``a`` with the oracle and aligns ``e`` to the result."""
    ap = conjugate_to_eigenbasis(eigh(a), e, rel_gap_tol)
    return blockwise_diagonalize(ap) if blockwise else ap


def _m_entries(alpha: np.ndarray, same_block: np.ndarray) -> np.ndarray:
    diff = alpha[:, None] - alpha[None, :]
    out = np.zeros_like(diff)
    other = ~same_block
    out[other] = 1.0 / diff[other]
    return out


def m_matrix(base: SpectralDecomposition, blocks: BlockStructure) -> MMatrix:
    """Builds ``M`` with ``M(i, j) = 1 / (alpha_i - alpha_j)`` across blocks, else 0."""
    return MMatrix(entries=frozen_array(_m_entries(base.lam, blocks.same_block())))


def commutator_residual(ap: AlignedPerturbation, m: MMatrix) -> float:
    """Largest entry of ``M o (Lam E_hat - E_hat Lam) - E_hat^o``.

    Zero up to rounding once ``ap`` is block-wise diagonal; in raw mode the
    in-block entries of ``E_hat^o`` remain.
    """
    alpha = ap.alpha
    e_hat = ap.e_hat.entries
    commutator = alpha[:, None] * e_hat - e_hat * alpha[None, :]
    difference = hadamard(m.entries, commutator) - ap.e_hat_off.entries
    return float(np.max(np.abs(difference))) if difference.size else 0.0


def min_block_gap(blocks: BlockStructure) -> float:
    reps = blocks.rep_values
    if reps.size < 2:
        return float("inf")
    return float(np.min(np.abs(np.diff(reps))))


def vc_membership(
    ap: AlignedPerturbation, c: float, diag_tol: float
) -> VcReport:
    """Tests whether the perturbation lies in the cone ``V_c``.

    Membership requires, for every block with more than one index, a Schur
    complement whose off-diagonal entries are at most ``diag_tol * ||E||`` and
    whose eigenvalues are pairwise at least ``c * ||E||`` apart.

    Raises:
        GapTooSmallError: If ``||E||`` is not below half the smallest gap
            between distinct eigenvalues.
    """
    gap = min_block_gap(ap.blocks)
    if not ap.e_norm < gap / 2:
        raise GapTooSmallError(
            f"||E|| = {ap.e_norm:.3e} is not below half the eigenvalue gap {gap:.3e}"
        )
    multi = ap.blocks.multi_blocks()
    if ap.e_norm == 0.0:
        return VcReport(
            member=not multi,
            c=c,
            diag_tol=diag_tol,
            e_norm=0.0,
            degenerate_zero=bool(multi),
            worst_gap_ratio=0.0 if multi else float("inf"),
        )

    witnesses = []
    member = True
    worst_ratio = float("inf")
    for b in multi:
        data = schur_data(ap, b)
        entries = data.b.entries
        off = np.abs(entries - np.diag(np.diag(entries)))
        worst_off = float(np.max(off))
        min_gap = float(np.min(np.abs(np.diff(data.beta))))
        witnesses.append(
            BlockWitness(
                block=b, size=data.l, worst_off_diagonal=worst_off, min_beta_gap=min_gap
            )
        )
        worst_ratio = min(worst_ratio, min_gap / ap.e_norm)
        if worst_off > diag_tol * ap.e_norm or min_gap < c * ap.e_norm:
            member = False
    return VcReport(
        member=member,
        c=c,
        diag_tol=diag_tol,
        e_norm=ap.e_norm,
        blocks=witnesses,
        worst_gap_ratio=worst_ratio,
    )


def align_eigenvectors(
    reference: np.ndarray, candidate: np.ndarray, blocks: BlockStructure
) -> np.ndarray:
    """Permutes and phases ``candidate`` columns to match ``reference``.

    Within each block, every reference column takes the unused candidate
    column of largest ``|<c, r>|`` (ties go to the lower index); the chosen
    column is then multiplied by a unimodular factor making the inner product
    real and nonnegative.

    Args:
        reference: Predicted eigenvector matrix.
        candidate: Eigenvector matrix from the oracle, same column order of
            eigenvalues.
        blocks: Clusters within which columns may be permuted.

    Returns:
        The aligned copy of ``candidate``.
    """
    if reference.shape != candidate.shape:
        raise DimensionMismatchError(
            f"cannot align {candidate.shape} to {reference.shape}"
        )
    aligned = np.empty_like(candidate, dtype=np.complex128)
    for b in range(len(blocks)):
        idx = list(blocks.indices(b))
        unused = list(idx)
        for j in idx:
            overlaps = [abs(np.vdot(candidate[:, k], reference[:, j])) for k in unused]
            best = unused[int(np.argmax(overlaps))]
            unused.remove(best)
            inner = np.vdot(candidate[:, best], reference[:, j])
            phase = inner / abs(inner) if abs(inner) > 0.0 else 1.0
            aligned[:, j] = candidate[:, best] * phase
    return aligned
