from typing import Annotated, List, Optional

from enum import Enum

import msgspec
from msgspec import Meta

from hermpert.config import Config
from hermpert.core import format_real
from hermpert.utils.dict_struct import DictStruct


class PredictorName(str, Enum):
    FIRST_ORDER = "first_order"
    SCHUR_FULL = "schur_full"
    SCHUR_SIMPLIFIED = "schur_simplified"
    RS_SECOND_ORDER = "rs_second_order"
    EIGVEC_FIRST_ORDER = "eigvec_first_order"
    EIGVEC_DIFFERENCE_QUOTIENT = "eigvec_difference_quotient"
    U_AP_RESIDUAL = "u_ap_residual"
    EIGVEC_U_AP = "eigvec_u_ap"


class EnsembleKind(str, Enum):
    RANDOM = "random"
    CONE = "cone"


class EnsembleConfig(DictStruct, frozen=True, forbid_unknown_fields=True):
    """Random ensemble and predictor of one convergence study.

    ``block_spec`` lists the eigenvalue multiplicities of ``A`` and must sum to
    ``n``; ``t_grid`` must be strictly decreasing. The ``cone`` ensemble needs
    two blocks of equal size.
    """

    seed: Annotated[int, Meta(ge=0)]
    n: Annotated[int, Meta(ge=1)]
    block_spec: List[Annotated[int, Meta(ge=1)]]
    t_grid: List[Annotated[float, Meta(gt=0)]] = msgspec.field(
        default_factory=lambda: list(Config.DEFAULT_T_GRID)
    )
    trials: Annotated[int, Meta(ge=1)] = 1
    predictor: PredictorName = PredictorName.FIRST_ORDER
    workers: Annotated[int, Meta(ge=1)] = 1
    ensemble: EnsembleKind = EnsembleKind.RANDOM

    def __post_init__(self):
        if self.trials < 1 or self.n < 1 or self.workers < 1:
            raise ValueError("n, trials and workers must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed {self.seed} is not a 64-bit unsigned integer")
        if any(b < 1 for b in self.block_spec) or sum(self.block_spec) != self.n:
            raise ValueError(
                f"block_spec {list(self.block_spec)} does not sum to n={self.n}"
            )
        if not self.t_grid or any(t <= 0 for t in self.t_grid):
            raise ValueError("t_grid must hold positive values")
        if any(a <= b for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise ValueError(f"t_grid {list(self.t_grid)} is not strictly decreasing")
        if self.ensemble is EnsembleKind.CONE and (
            len(self.block_spec) != 2 or self.block_spec[0] != self.block_spec[1]
        ):
            raise ValueError(
                f"cone ensemble needs two equal blocks, got {list(self.block_spec)}"
            )


class ErrorRow(DictStruct, frozen=True):
    trial: int
    t: float
    error: float


class PowerLawFit(DictStruct, frozen=True):
    slope: float
    intercept: float
    r_squared: float
    kept: int
    dropped: int


class TrialFit(DictStruct, frozen=True):
    trial: int
    slope: float
    intercept: float
    r_squared: float
    dropped: int


class ConvergenceReport(DictStruct, frozen=True):
    """Errors of one predictor over an ensemble and the worst-trial fit.

    ``slope``, ``intercept`` and ``r_squared`` belong to the trial with the
    smallest slope; ``mean_errors`` holds the per-``t`` mean over successful
    trials.
    ``max_diagnostic`` is the largest value of the predictor's diagnostic
    over all trials and ``t``, or None for predictors without one.
    """

    predictor: str
    seed: int
    n: int
    block_spec: List[int]
    t_grid: List[float]
    rows: List[ErrorRow]
    fits: List[TrialFit]
    slope: float
    intercept: float
    r_squared: float
    mean_errors: List[float]
    min_slope: float
    failed_trials: List[int] = []
    max_diagnostic: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.slope >= self.min_slope

    def to_csv(self) -> str:
        lines = ["trial,t,error"]
        lines.extend(
            f"{row.trial},{format_real(row.t)},{format_real(row.error)}"
            for row in self.rows
        )
        lines.append(
            f"# slope={format_real(self.slope)} r2={format_real(self.r_squared)}"
        )
        return "\n".join(lines) + "\n"


class ClauseResult(DictStruct, frozen=True):
    name: str
    passed: bool
    value: float
    tolerance: float
    message: Optional[str] = None


class RegressionReport(DictStruct, frozen=True):
    clauses: List[ClauseResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.clauses if not c.passed]
