"""Random ensembles, convergence-order fits and the worked-example regression."""

from typing import Dict, List, Optional, Sequence, Tuple

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from hermpert.alignment import align, align_eigenvectors, m_matrix
from hermpert.config import Config, pick
from hermpert.core import hadamard
from hermpert.exceptions import HermPertException, StudyError
from hermpert.jacobi_oracle import eigh
from hermpert.predictors_config import PredictorsConfig
from hermpert.rayleigh_schrodinger import line_expansion
from hermpert.schur import schur_data
from hermpert.structs.matrix import HermitianMatrix
from hermpert.structs.study import (
    ClauseResult,
    ConvergenceReport,
    EnsembleConfig,
    EnsembleKind,
    ErrorRow,
    PowerLawFit,
    RegressionReport,
    TrialFit,
)

logger = logging.getLogger(__name__)

EXAMPLE_A = np.diag([0.0, 0.0, 1.0])
EXAMPLE_F = np.array([[1.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
EXAMPLE_N = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
EXAMPLE_U_PRIME = np.array([[0.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, -1.0, 0.0]])

MATRIX_TOL = 1e-10
EIGENVECTOR_TOL = 5e-4
LIMIT_TOL = 0.05


def _rng(seed: int, trial: int) -> np.random.Generator:
    # PCG64 stream per (seed, trial); reproducible across runs and worker counts
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (x + x.conj().T) / 2


def _paired_coupling(rng: np.random.Generator, size: int) -> np.ndarray:
    spacing = 1.0 / max(size - 1, 1)
    # jitter below half the spacing keeps each in-block diagonal decreasing
    diagonal = [
        np.linspace(0.5, -0.5, size) + 0.1 * spacing * rng.uniform(-1.0, 1.0, size)
        for _ in range(2)
    ]
    coupling = rng.uniform(0.2, 0.6, size) * np.exp(
        2j * np.pi * rng.random(size)
    )
    f0 = np.diag(np.concatenate(diagonal)).astype(np.complex128)
    upper = np.arange(size)
    f0[upper, upper + size] = coupling
    f0[upper + size, upper] = coupling.conj()
    return f0


def generate_instance(
    cfg: EnsembleConfig, trial: int
) -> Tuple[HermitianMatrix, HermitianMatrix]:
    """Draws ``(A, F)`` for one trial, deterministic in ``(cfg.seed, trial)``.

    ``A = Q diag(lam) Q*`` where ``lam`` repeats one value per entry of
    ``cfg.block_spec`` with that multiplicity, distinct values at least 1
    apart, and ``Q`` are the oracle eigenvectors of a random Hermitian
    matrix. ``F`` is a random Hermitian matrix scaled to unit operator norm.

    The ``cone`` ensemble instead builds ``F = Q F0 Q*`` where ``F0`` has
    distinct diagonal entries inside each of the two blocks and couples index
    ``i`` of the upper block only with index ``i`` of the lower one. Every
    Schur complement of ``A + tF`` is then diagonal.
    """
    rng = _rng(cfg.seed, trial)
    blocks = len(cfg.block_spec)
    reps = rng.uniform(-2.0, 0.0) + np.cumsum(1.0 + rng.random(blocks))
    lam = np.repeat(reps[::-1], cfg.block_spec)

    q = eigh(HermitianMatrix.from_array(_random_hermitian(rng, cfg.n), 1.0)).u
    a = HermitianMatrix.from_array((q * lam) @ q.conj().T, 1.0)

    if cfg.ensemble is EnsembleKind.CONE:
        f0 = _paired_coupling(rng, cfg.block_spec[0])
        f = HermitianMatrix.from_array(q @ f0 @ q.conj().T, 1.0)
    else:
        f = HermitianMatrix.from_array(_random_hermitian(rng, cfg.n), 1.0)
    f_norm = float(np.max(np.abs(eigh(f).lam)))
    return a, f.scaled(1.0 / f_norm)


def fit_power_law(
    t: Sequence[float],
    errors: Sequence[float],
    scale: float = 1.0,
    floor_factor: Optional[float] = None,
    max_dropped: Optional[int] = None,
) -> PowerLawFit:
    """Least-squares fit of ``log(error) = slope * log(t) + intercept``.

    Points with ``error <= floor_factor * eps * scale`` are below the rounding
    noise floor and left out.

    Args:
        t: Positive parameters.
        errors: Errors, one per ``t``.
        scale: Magnitude of the matrices involved.
        floor_factor: Noise-floor multiple of machine epsilon; None uses
            ``Config.NOISE_FLOOR_FACTOR``.
        max_dropped: Most points the filter may remove; None uses
            ``Config.MAX_DROPPED_POINTS``.

    Returns:
        The fit, with the coefficient of determination.

    Raises:
        StudyError: If too many points fall under the noise floor or fewer
            than two remain.
    """
    t = np.asarray(t, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    floor = pick(floor_factor, Config.NOISE_FLOOR_FACTOR) * np.finfo(float).eps * scale
    keep = errors > floor
    dropped = int(np.count_nonzero(~keep))
    limit = int(pick(max_dropped, Config.MAX_DROPPED_POINTS))
    if dropped > limit:
        raise StudyError(
            f"noise floor {floor:.2e} removed {dropped} of {t.size} points "
            f"(at most {limit} allowed)"
        )
    if np.count_nonzero(keep) < 2:
        raise StudyError("fewer than two points left to fit")
    if dropped:
        logger.warning("dropped %d points under the noise floor %.2e", dropped, floor)

    x = np.log(t[keep])
    y = np.log(errors[keep])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = y - design @ np.array([slope, intercept])
    total = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residual**2)) / total if total > 0.0 else 1.0
    return PowerLawFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        kept=int(np.count_nonzero(keep)),
        dropped=dropped,
    )


def _run_trial(
    cfg: EnsembleConfig, trial: int
) -> Tuple[int, Optional[List[float]], float, Optional[float]]:
    predictor = PredictorsConfig.by_name(cfg.predictor)
    a, f = generate_instance(cfg, trial)
    scale = max(1.0, float(np.max(np.abs(eigh(a).lam))))
    try:
        errors = [predictor.error(a, f, t) for t in cfg.t_grid]
        diagnostics = [predictor.diagnose(a, f, t) for t in cfg.t_grid]
    except HermPertException as exc:
        logger.warning("trial %d failed: %s", trial, exc)
        return trial, None, scale, None
    logger.debug("trial %d errors %s", trial, errors)
    worst = max((d for d in diagnostics if d is not None), default=None)
    return trial, errors, scale, worst


def convergence_study(cfg: EnsembleConfig) -> ConvergenceReport:
    """Measures the convergence order of ``cfg.predictor`` against the oracle.

    Every trial runs the predictor at each ``t`` of the grid and gets its own
    power-law fit; the report carries the smallest slope and, for predictors
    with a diagnostic such as ``K = ||U_ap* U_ap - I|| / ||E||^2``, its largest
    value. Trials whose predictor preconditions fail are recorded and skipped.

    Raises:
        StudyError: If more than half the trials failed, or a fit is not
            possible because of the noise floor.
    """
    predictor = PredictorsConfig.by_name(cfg.predictor)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            results = list(
                executor.map(lambda k: _run_trial(cfg, k), range(cfg.trials))
            )
    else:
        results = [_run_trial(cfg, k) for k in range(cfg.trials)]
    results.sort(key=lambda r: r[0])

    failed = [trial for trial, errors, _, _ in results if errors is None]
    if len(failed) > Config.MAX_FAILED_FRACTION * cfg.trials:
        raise StudyError(
            f"{len(failed)} of {cfg.trials} trials failed their preconditions"
        )

    rows: List[ErrorRow] = []
    fits: List[TrialFit] = []
    per_t: Dict[float, List[float]] = {t: [] for t in cfg.t_grid}
    for trial, errors, scale, _ in results:
        if errors is None:
            continue
        for t, error in zip(cfg.t_grid, errors):
            rows.append(ErrorRow(trial=trial, t=t, error=error))
            per_t[t].append(error)
        fit = fit_power_law(cfg.t_grid, errors, scale)
        fits.append(
            TrialFit(
                trial=trial,
                slope=fit.slope,
                intercept=fit.intercept,
                r_squared=fit.r_squared,
                dropped=fit.dropped,
            )
        )

    worst = min(fits, key=lambda f: (f.slope, f.trial))
    logger.info(
        "%s: worst slope %.4f (trial %d) over %d trials",
        predictor.name,
        worst.slope,
        worst.trial,
        len(fits),
    )
    return ConvergenceReport(
        predictor=predictor.name,
        seed=cfg.seed,
        n=cfg.n,
        block_spec=list(cfg.block_spec),
        t_grid=list(cfg.t_grid),
        rows=rows,
        fits=fits,
        slope=worst.slope,
        intercept=worst.intercept,
        r_squared=worst.r_squared,
        mean_errors=[float(np.mean(per_t[t])) for t in cfg.t_grid],
        min_slope=predictor.min_slope,
        failed_trials=failed,
        max_diagnostic=max(
            (d for _, _, _, d in results if d is not None), default=None
        ),
    )


def example_matrices() -> Tuple[HermitianMatrix, HermitianMatrix]:
    """The three-by-three example: ``A = diag(0, 0, 1)`` and a coupling ``F``."""
    return HermitianMatrix.from_array(EXAMPLE_A), HermitianMatrix.from_array(EXAMPLE_F)


def _standard_order(u: np.ndarray) -> np.ndarray:
    # column of the eigenvector e_p, for each coordinate p
    return np.argmax(np.abs(u), axis=1)


def _clause(name: str, value: float, tolerance: float, message: str) -> ClauseResult:
    passed = bool(value <= tolerance)
    if not passed:
        logger.warning(
            "clause %s failed: %s (%.3e > %.1e)", name, message, value, tolerance
        )
    return ClauseResult(
        name=name,
        passed=passed,
        value=float(value),
        tolerance=tolerance,
        message=message,
    )


def paper_example_regression() -> RegressionReport:
    """Checks every closed-form value of the three-by-three example.

    ``A = diag(0, 0, 1)`` has the double eigenvalue 0, and along ``A + tF``:

    - ``schur_b``: the Schur complement of the double eigenvalue is
      ``[[t - t^2, -t^2], [-t^2, -t^2]]`` at ``t = 0.1`` and ``t = 0.01``.
    - ``n_matrix`` and ``eigenvector_derivative``: ``N`` and ``U'(0)`` take
      their closed forms.
    - ``eigenvectors``: the oracle eigenvectors at ``t = 0.01`` match
      ``I + 0.01 U'(0)`` to three decimals.
    - ``naive_derivative``: ``U (I - t M o F_hat)`` misses the oracle by
      ``t ||N||_F = t sqrt(2)`` at ``t = 1e-3``.
    - ``second_order``: ``xi_hat(t) = (t - t^2, -t^2, 1 + 2 t^2)``.

    Matrices are compared in the coordinates of ``A``, whose eigenvectors
    are the unit vectors.
    """
    a, f = example_matrices()
    clauses: List[ClauseResult] = []

    worst = 0.0
    for t in (0.1, 0.01):
        ap = align(a, f.scaled(t))
        double = int(ap.blocks.block_ids[_standard_order(ap.u)[0]])
        b = schur_data(ap, double).b.entries
        expected = np.array([[t - t * t, -t * t], [-t * t, -t * t]])
        worst = max(worst, float(np.max(np.abs(b - expected))))
    clauses.append(_clause("schur_b", worst, MATRIX_TOL, "B at t = 0.1 and 0.01"))

    ap = align(a, f)
    perm = _standard_order(ap.u)
    m = m_matrix(ap.base, ap.blocks)
    expansion = line_expansion(ap, m)
    n = expansion.n_mat.entries[np.ix_(perm, perm)]
    clauses.append(
        _clause("n_matrix", float(np.max(np.abs(n - EXAMPLE_N))), MATRIX_TOL, "N")
    )
    u_prime = expansion.u_prime.entries[:, perm]
    clauses.append(
        _clause(
            "eigenvector_derivative",
            float(np.max(np.abs(u_prime - EXAMPLE_U_PRIME))),
            MATRIX_TOL,
            "U'(0)",
        )
    )

    t = 0.01
    reference = ap.u + t * expansion.u_prime.entries
    oracle = align_eigenvectors(reference, eigh(a + f.scaled(t)).u, ap.blocks)
    clauses.append(
        _clause(
            "eigenvectors",
            float(np.max(np.abs(oracle - reference))),
            EIGENVECTOR_TOL,
            "oracle eigenvectors against I + 0.01 U'(0)",
        )
    )

    t = 1e-3
    reference = ap.u + t * expansion.u_prime.entries
    oracle = align_eigenvectors(reference, eigh(a + f.scaled(t)).u, ap.blocks)
    naive = ap.u @ (np.eye(ap.n) - t * hadamard(m.entries, ap.e_hat.entries))
    limit = float(np.linalg.norm(oracle - naive)) / t
    clauses.append(
        _clause(
            "naive_derivative",
            abs(limit - np.sqrt(2.0)),
            LIMIT_TOL,
            f"||U(t) - U (I - t M o F_hat)||_F / t = {limit:.6f}, expected sqrt(2)",
        )
    )

    t = 0.01
    xi_hat = expansion.evaluate(t)[perm]
    expected = np.array([t - t * t, -t * t, 1.0 + 2.0 * t * t])
    clauses.append(
        _clause(
            "second_order",
            float(np.max(np.abs(xi_hat - expected))),
            MATRIX_TOL,
            "xi_hat(0.01)",
        )
    )
    return RegressionReport(clauses=clauses)
