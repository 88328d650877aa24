import numpy as np

from hermpert.structs.matrix import DenseMatrix, HermitianMatrix
from hermpert.structs.spectral import SpectralDecomposition
from hermpert.utils.dict_struct import ArrayStruct


class RSCoefficients(ArrayStruct, frozen=True):
    """Taylor coefficients of the eigenvalues of ``A + tF`` at ``t = 0``."""

    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    def evaluate(self, t: float) -> np.ndarray:
        return self.a0 + t * self.a1 + t * t * self.a2


class EigensystemPrediction(ArrayStruct, frozen=True):
    t: float
    xi_hat: np.ndarray
    u_hat: DenseMatrix


class LineExpansion(ArrayStruct, frozen=True):
    """Second-order eigenvalues and first-order eigenvectors along ``A + tF``."""

    base: SpectralDecomposition
    f_hat: HermitianMatrix
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    n_mat: DenseMatrix
    u_prime: DenseMatrix

    @property
    def coefficients(self) -> RSCoefficients:
        return RSCoefficients(a0=self.a0, a1=self.a1, a2=self.a2)

    def evaluate(self, t: float) -> np.ndarray:
        return self.coefficients.evaluate(t)
