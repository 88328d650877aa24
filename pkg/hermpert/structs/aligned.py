from typing import List, Tuple

from enum import Enum

import numpy as np

from hermpert.structs.matrix import HermitianMatrix
from hermpert.structs.spectral import BlockStructure, SpectralDecomposition
from hermpert.utils.dict_struct import ArrayStruct, DictStruct


class AlignmentMode(str, Enum):
    RAW = "raw"
    BLOCKWISE_DIAGONAL = "blockwise_diagonal"


class AlignedPerturbation(ArrayStruct, frozen=True):
    """A perturbation expressed in an eigenbasis of the unperturbed matrix.

    ``e_hat = u* E u`` is split into its real diagonal ``e_hat_diag`` and its
    zero-diagonal remainder ``e_hat_off``.
    """

    base: SpectralDecomposition
    blocks: BlockStructure
    e_hat: HermitianMatrix
    e_hat_diag: np.ndarray
    e_hat_off: HermitianMatrix
    mode: AlignmentMode
    e_norm: float
    a_norm: float
    tied_blocks: Tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def alpha(self) -> np.ndarray:
        return self.base.lam

    @property
    def u(self) -> np.ndarray:
        return self.base.u


class MMatrix(ArrayStruct, frozen=True):
    """Reciprocal eigenvalue-gap matrix, zero on every block."""

    entries: np.ndarray


class BlockWitness(DictStruct, frozen=True):
    block: int
    size: int
    worst_off_diagonal: float
    min_beta_gap: float


class VcReport(DictStruct, frozen=True):
    member: bool
    c: float
    diag_tol: float
    e_norm: float
    blocks: List[BlockWitness] = []
    worst_gap_ratio: float = float("inf")
    degenerate_zero: bool = False
