from typing import Optional, Union

from hermpert.structs.error_report import ErrorReport


class HermPertException(Exception):
    """Base exception for all errors raised by hermpert."""

    exit_code: int = 1
    default_code: str = "error"

    def __init__(self, report: Union[ErrorReport, str]):
        if not isinstance(report, ErrorReport):
            report = ErrorReport(code=self.default_code, message=str(report))
        self.report = report
        super().__init__(report)

    def __str__(self):
        """
        Return the error message.

        Returns:
            The error message as string, with details when present.
        """
        if self.report.details:
            return f"{self.report.message} ({self.report.details})"
        return self.report.message

    @property
    def code(self) -> str:
        return self.report.code

    @property
    def message(self) -> str:
        return self.report.message

    @property
    def detail(self) -> Optional[str]:
        return self.report.details


class MatrixParseError(HermPertException):
    exit_code = 2
    default_code = "parse"

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(
            ErrorReport(
                code=self.default_code,
                message=f"line {line}, column {column}: {message}",
                line=line,
                column=column,
            )
        )

    @property
    def line(self) -> Optional[int]:
        return self.report.line

    @property
    def column(self) -> Optional[int]:
        return self.report.column


class DimensionMismatchError(HermPertException):
    exit_code = 2
    default_code = "dimension"


class NonFiniteError(HermPertException):
    exit_code = 2
    default_code = "non_finite"


class AsymmetryError(HermPertException):
    exit_code = 2
    default_code = "asymmetry"


class ModeError(HermPertException):
    exit_code = 3
    default_code = "mode"


class GapTooSmallError(HermPertException):
    exit_code = 3
    default_code = "gap_too_small"

    def __init__(self, message: str, block: Optional[int] = None):
        super().__init__(
            ErrorReport(code=self.default_code, message=message, block=block)
        )

    @property
    def block(self) -> Optional[int]:
        return self.report.block


class DegenerateDirectionError(GapTooSmallError):
    default_code = "degenerate_direction"


class ConvergenceError(HermPertException):
    exit_code = 3
    default_code = "no_convergence"

    def __init__(self, message: str, off_diagonal_mass: float):
        super().__init__(
            ErrorReport(
                code=self.default_code,
                message=message,
                details=f"off-diagonal mass {off_diagonal_mass:.3e}",
                value=off_diagonal_mass,
            )
        )

    @property
    def off_diagonal_mass(self) -> Optional[float]:
        return self.report.value


class StudyError(HermPertException):
    exit_code = 1
    default_code = "study"


class RegressionFailure(HermPertException):
    exit_code = 1
    default_code = "regression"
