import numpy as np

from hermpert.structs.matrix import DenseMatrix
from hermpert.structs.spectral import BlockStructure
from hermpert.utils.dict_struct import ArrayStruct, DictStruct


class GershgorinDisc(DictStruct, frozen=True):
    center: float
    radius: float

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return abs(value - self.center) <= self.radius + tol


class FirstOrderPrediction(ArrayStruct, frozen=True):
    """First-order eigenvalues and approximate eigenvectors of ``A + E``.

    ``k_ratio`` is the measured ``||u_ap* u_ap - I|| / ||E||^2`` (0 when E = 0).
    """

    xi_hat: np.ndarray
    u_ap: DenseMatrix
    blocks: BlockStructure
    k_ratio: float = 0.0
    residual: float = 0.0


class WeylCheck(DictStruct, frozen=True):
    max_shift: float
    e_norm: float
    holds: bool
