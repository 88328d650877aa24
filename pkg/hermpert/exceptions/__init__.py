from hermpert.exceptions.hermpert_exception import (
    AsymmetryError,
    ConvergenceError,
    DegenerateDirectionError,
    DimensionMismatchError,
    GapTooSmallError,
    HermPertException,
    MatrixParseError,
    ModeError,
    NonFiniteError,
    RegressionFailure,
    StudyError,
)

__all__ = [
    "AsymmetryError",
    "ConvergenceError",
    "DegenerateDirectionError",
    "DimensionMismatchError",
    "GapTooSmallError",
    "HermPertException",
    "MatrixParseError",
    "ModeError",
    "NonFiniteError",
    "RegressionFailure",
    "StudyError",
]
