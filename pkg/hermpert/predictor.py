from typing import Callable, Iterable, List, Optional, Tuple

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from hermpert.alignment import align, align_eigenvectors
from hermpert.jacobi_oracle import eigh, eigvalsh
from hermpert.structs.aligned import AlignedPerturbation
from hermpert.structs.matrix import HermitianMatrix

logger = logging.getLogger(__name__)

ErrorFunction = Callable[[HermitianMatrix, HermitianMatrix, float], float]


class Metric(str, Enum):
    EIGENVALUE = "eigenvalue"
    EIGENVECTOR = "eigenvector"
    DIFFERENCE_QUOTIENT = "difference_quotient"
    RESIDUAL = "residual"


@dataclass
class Predictor:
    """A prediction checked against the oracle on ``A + tF``.

    ``predict`` receives the aligned perturbation and ``t``. It returns
    eigenvalues, an eigenvector matrix, an eigenvector derivative or a
    residual depending on ``metric``. With ``along_line`` the alignment is
    built for ``F`` once and ``t`` is applied by the predictor; otherwise the
    alignment is built for ``tF`` directly. ``diagnostic``, when set, maps the
    alignment of ``tF`` to a number the harness reports alongside the errors.
    """

    name: str
    f_name: str
    metric: Metric
    predict: Callable[[AlignedPerturbation, float], object]
    expected_order: float
    min_slope: float
    along_line: bool = False
    description: str = ""
    diagnostic: Optional[Callable[[AlignedPerturbation], float]] = None

    def error_functions(self) -> Iterable[Tuple[str, Callable]]:
        yield self.f_name, self._error_wrapper()
        yield f"{self.f_name}_curve", self._curve_wrapper()

    def _error_wrapper(self) -> ErrorFunction:
        def wrapper(a: HermitianMatrix, f: HermitianMatrix, t: float) -> float:
            return self.error(a, f, t)

        wrapper.__doc__ = (
            f"{self.name.replace('_', ' ').title()} error on A + tF."
            f"\n\n{self.description}\n\nArgs:\n    a: HermitianMatrix\n"
            f"    f: HermitianMatrix\n    t: float\n\nReturns:\n"
            f"    float: {self.metric.value} error against the oracle\n"
        )
        return wrapper

    def _curve_wrapper(self) -> Callable[..., List[float]]:
        def wrapper(
            a: HermitianMatrix, f: HermitianMatrix, t_grid: Iterable[float]
        ) -> List[float]:
            return [self.error(a, f, t) for t in t_grid]

        wrapper.__doc__ = (
            f"{self.name.replace('_', ' ').title()} errors over a grid of t."
        )
        return wrapper

    def diagnose(
        self, a: HermitianMatrix, f: HermitianMatrix, t: float
    ) -> Optional[float]:
        if self.diagnostic is None:
            return None
        return float(self.diagnostic(align(a, f.scaled(t))))

    def error(self, a: HermitianMatrix, f: HermitianMatrix, t: float) -> float:
        """Runs the prediction and the oracle and returns the error metric.

        Eigenvalues are paired by sorted order and compared in the max norm.
        Eigenvector matrices are compared in the Frobenius norm after the
        oracle columns were permuted and phased to the prediction.
        """
        ap = align(a, f) if self.along_line else align(a, f.scaled(t))
        if self.metric is Metric.RESIDUAL:
            return float(self.predict(ap, t))

        perturbed = a + f.scaled(t)
        if self.metric is Metric.EIGENVALUE:
            predicted = np.sort(np.asarray(self.predict(ap, t)))[::-1]
            return float(np.max(np.abs(eigvalsh(perturbed) - predicted)))

        oracle = eigh(perturbed).u
        if self.metric is Metric.EIGENVECTOR:
            predicted = np.asarray(self.predict(ap, t))
            aligned = align_eigenvectors(predicted, oracle, ap.blocks)
            return float(np.linalg.norm(aligned - predicted))

        derivative = np.asarray(self.predict(ap, t))
        aligned = align_eigenvectors(ap.u + t * derivative, oracle, ap.blocks)
        return float(np.linalg.norm((aligned - ap.u) / t - derivative))
