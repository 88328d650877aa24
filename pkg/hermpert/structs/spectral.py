from typing import List, Tuple

import numpy as np

from hermpert.utils.dict_struct import ArrayStruct, frozen_array


class SpectralDecomposition(ArrayStruct, frozen=True):
    """Unitary ``u`` and non-increasing real ``lam`` with ``H = u diag(lam) u*``."""

    u: np.ndarray
    lam: np.ndarray
    sweeps: int = 0

    @classmethod
    def build(cls, u, lam, sweeps: int = 0) -> "SpectralDecomposition":
        return cls(
            u=frozen_array(u, dtype=np.complex128),
            lam=frozen_array(lam, dtype=np.float64),
            sweeps=sweeps,
        )

    @property
    def n(self) -> int:
        return self.lam.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.lam) @ self.u.conj().T


class BlockStructure(ArrayStruct, frozen=True):
    """Partition of ``0..n-1`` into runs of numerically equal eigenvalues.

    Groups are stored as half-open ``(start, stop)`` ranges in the global
    non-increasing order.
    """

    groups: Tuple[Tuple[int, int], ...]
    rep_values: np.ndarray
    block_ids: np.ndarray

    @classmethod
    def build(
        cls, groups: List[Tuple[int, int]], lam: np.ndarray
    ) -> "BlockStructure":
        n = groups[-1][1] if groups else 0
        ids = np.empty(n, dtype=np.int64)
        reps = []
        for b, (start, stop) in enumerate(groups):
            ids[start:stop] = b
            reps.append(float(np.mean(lam[start:stop])))
        return cls(
            groups=tuple((int(a), int(b)) for a, b in groups),
            rep_values=frozen_array(reps, dtype=np.float64),
            block_ids=frozen_array(ids),
        )

    @property
    def n(self) -> int:
        return int(self.block_ids.shape[0])

    def __len__(self) -> int:
        return len(self.groups)

    def indices(self, block: int) -> np.ndarray:
        start, stop = self.groups[block]
        return np.arange(start, stop)

    def complement(self, block: int) -> np.ndarray:
        return np.flatnonzero(self.block_ids != block)

    def size(self, block: int) -> int:
        start, stop = self.groups[block]
        return stop - start

    def same_block(self) -> np.ndarray:
        """Boolean ``n x n`` mask, true where two indices share a block."""
        return self.block_ids[:, None] == self.block_ids[None, :]

    def multi_blocks(self) -> List[int]:
        return [b for b in range(len(self.groups)) if self.size(b) > 1]
