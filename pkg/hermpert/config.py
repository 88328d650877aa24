from typing import List, Optional

import os


def _env_float(name: str, default: float) -> float:
    value = os.environ.get(f"HERMPERT_{name}")
    if value is None or value == "":
        return default
    return float(value)


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(f"HERMPERT_{name}")
    if value is None or value == "":
        return default
    return int(value)


class Config:
    ASYMMETRY_TOL: float = _env_float("ASYMMETRY_TOL", 1e-12)
    """Relative asymmetry above which Hermitian input is rejected."""
    JACOBI_TOL_PER_DIM: float = _env_float("JACOBI_TOL_PER_DIM", 1e-13)
    """Default Jacobi tolerance is this value times the dimension."""
    JACOBI_MIN_TOL: float = 1e-15
    JACOBI_MAX_SWEEPS: int = _env_int("JACOBI_MAX_SWEEPS", 64)
    GROUPING_TOL: float = _env_float("GROUPING_TOL", 1e-8)
    """Relative gap at or below which eigenvalues share a block."""
    BLOCK_DIAGONAL_TOL: float = _env_float("BLOCK_DIAGONAL_TOL", 1e-11)
    TIE_TOL: float = _env_float("TIE_TOL", 1e-10)
    """Relative distance at which in-block diagonal entries count as tied."""
    STRICTNESS_TOL: float = _env_float("STRICTNESS_TOL", 1e-8)
    """Minimal relative separation of in-block diagonals required by N."""
    PINV_TOL: float = _env_float("PINV_TOL", 1e-12)
    SCHUR_MARGIN: float = _env_float("SCHUR_MARGIN", 2.0)
    """Required distance, in units of the perturbation norm, to other eigenvalues."""
    PAIRING_TOL: float = _env_float("PAIRING_TOL", 1e-12)
    NOISE_FLOOR_FACTOR: float = _env_float("NOISE_FLOOR_FACTOR", 1e3)
    MAX_DROPPED_POINTS: int = _env_int("MAX_DROPPED_POINTS", 2)
    MAX_FAILED_FRACTION: float = 0.5
    OUTPUT_DIGITS: int = 17
    DEFAULT_T_GRID: List[float] = [1e-1, 10**-1.5, 1e-2, 10**-2.5, 1e-3]

    @classmethod
    def jacobi_tol(cls, n: int, tol: Optional[float] = None) -> float:
        """Returns the Jacobi tolerance for an ``n``-dimensional problem.

        Args:
            n: The dimension.
            tol: An explicit tolerance, or None for the configured default.

        Returns:
            The tolerance, never below ``JACOBI_MIN_TOL``.
        """
        if tol is None:
            tol = cls.JACOBI_TOL_PER_DIM * max(n, 1)
        return max(tol, cls.JACOBI_MIN_TOL)


def pick(value: Optional[float], default: float) -> float:
    return default if value is None else value
