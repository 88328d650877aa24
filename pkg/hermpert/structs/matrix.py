from typing import Optional

import numpy as np

from hermpert.config import Config, pick
from hermpert.exceptions import AsymmetryError, DimensionMismatchError, NonFiniteError
from hermpert.utils.dict_struct import ArrayStruct, frozen_array


def _as_complex(values, what: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.complex128)
    if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
        raise DimensionMismatchError(
            f"{what} needs a non-empty two-dimensional array, got shape {array.shape}"
        )
    if not np.all(np.isfinite(array)):
        raise NonFiniteError(f"{what} contains NaN or infinite entries")
    return array


class DenseMatrix(ArrayStruct, frozen=True):
    """Rectangular complex matrix, stored row-major as a read-only array."""

    entries: np.ndarray

    @classmethod
    def from_array(cls, values) -> "DenseMatrix":
        return cls(entries=frozen_array(_as_complex(values, "DenseMatrix")))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def adjoint(self) -> "DenseMatrix":
        return DenseMatrix.from_array(self.entries.conj().T)


class HermitianMatrix(ArrayStruct, frozen=True):
    """Square complex matrix with ``H = H*`` holding exactly as stored.

    The constructor symmetrizes its input as ``(H + H*) / 2``, which makes the
    stored entries exactly conjugate-symmetric with real diagonal. Inputs whose
    asymmetry exceeds the tolerance are rejected.
    """

    entries: np.ndarray

    @classmethod
    def from_array(
        cls, values, asymmetry_tol: Optional[float] = None
    ) -> "HermitianMatrix":
        """Builds a Hermitian matrix from a square array.

        Args:
            values: Anything ``numpy.asarray`` accepts.
            asymmetry_tol: Relative tolerance on ``max|H - H*|``; None uses
                ``Config.ASYMMETRY_TOL``.

        Returns:
            The symmetrized matrix.

        Raises:
            DimensionMismatchError: If the input is not square.
            NonFiniteError: If any entry is NaN or infinite.
            AsymmetryError: If the input is too far from Hermitian.
        """
        array = _as_complex(values, "HermitianMatrix")
        if array.shape[0] != array.shape[1]:
            raise DimensionMismatchError(
                f"HermitianMatrix must be square, got shape {array.shape}"
            )
        tol = pick(asymmetry_tol, Config.ASYMMETRY_TOL)
        adjoint = array.conj().T
        asymmetry = float(np.max(np.abs(array - adjoint)))
        scale = max(1.0, float(np.max(np.abs(array))))
        if asymmetry > tol * scale:
            raise AsymmetryError(
                f"matrix is not Hermitian: max |H - H*| = {asymmetry:.3e} "
                f"exceeds {tol:.1e} relative"
            )
        return cls(entries=frozen_array((array + adjoint) / 2))

    @classmethod
    def zeros(cls, n: int) -> "HermitianMatrix":
        return cls(entries=frozen_array(np.zeros((n, n), dtype=np.complex128)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def shape(self):
        return self.entries.shape

    def as_dense(self) -> DenseMatrix:
        return DenseMatrix(entries=self.entries)

    def scaled(self, s: float) -> "HermitianMatrix":
        return HermitianMatrix(entries=frozen_array(self.entries * s))

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(
                f"cannot add {self.shape} and {other.shape} matrices"
            )
        return HermitianMatrix(entries=frozen_array(self.entries + other.entries))
