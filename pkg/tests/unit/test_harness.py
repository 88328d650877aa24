import msgspec
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermpert.alignment import align, group_eigenvalues, vc_membership
from hermpert.config import Config
from hermpert.core import operator_norm
from hermpert.exceptions import StudyError
from hermpert.harness import (
    convergence_study,
    fit_power_law,
    generate_instance,
    paper_example_regression,
)
from hermpert.jacobi_oracle import eigvalsh
from hermpert.structs.study import EnsembleConfig, EnsembleKind, PredictorName
from tests.unit.utils import block_specs, seeds


def test_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(seed=1, n=4, block_spec=[2, 1])
    with pytest.raises(ValueError):
        EnsembleConfig(seed=1, n=3, block_spec=[2, 1], t_grid=[0.01, 0.1])
    with pytest.raises(ValueError):
        EnsembleConfig(seed=1, n=3, block_spec=[2, 1], trials=0)
    cfg = EnsembleConfig(seed=1, n=3, block_spec=[2, 1])
    assert cfg.t_grid == Config.DEFAULT_T_GRID
    assert cfg.predictor is PredictorName.FIRST_ORDER


def test_config_from_json():
    cfg = msgspec.json.decode(
        b'{"seed": 18446744073709551615, "n": 3, "block_spec": [2, 1],'
        b' "predictor": "schur_full", "trials": 4}',
        type=EnsembleConfig,
    )
    assert cfg.predictor is PredictorName.SCHUR_FULL
    assert cfg.trials == 4
    assert cfg.seed == 2**64 - 1
    for bad in (
        b'{"seed": -1, "n": 3, "block_spec": [2, 1]}',
        b'{"seed": 18446744073709551616, "n": 3, "block_spec": [2, 1]}',
        b'{"seed": 1, "n": 3, "block_spec": [1, 1]}',
        b'{"seed": 1, "n": 3, "block_spec": [2, 1], "predictor": "nope"}',
        b'{"seed": 1, "n": 3, "block_spec": [2, 1], "extra": 1}',
    ):
        with pytest.raises(msgspec.ValidationError):
            msgspec.json.decode(bad, type=EnsembleConfig)


@settings(deadline=None, max_examples=30)
@given(seed=seeds, block_spec=block_specs, trial=st.integers(0, 100))
def test_generate_instance(seed: int, block_spec, trial: int):
    print(f"Test generate_instance with: {locals()}")
    cfg = EnsembleConfig(seed=seed, n=sum(block_spec), block_spec=list(block_spec))
    a, f = generate_instance(cfg, trial)
    again_a, again_f = generate_instance(cfg, trial)
    assert np.array_equal(a.entries, again_a.entries)
    assert np.array_equal(f.entries, again_f.entries)

    blocks = group_eigenvalues(eigvalsh(a))
    assert [blocks.size(b) for b in range(len(blocks))] == list(block_spec)
    assert np.all(np.abs(np.diff(blocks.rep_values)) >= 1.0 - 1e-9)
    assert operator_norm(f) == pytest.approx(1.0, abs=1e-12)


def test_generate_instance_differs_by_trial():
    cfg = EnsembleConfig(seed=3, n=3, block_spec=[1, 1, 1])
    assert not np.array_equal(
        generate_instance(cfg, 0)[0].entries, generate_instance(cfg, 1)[0].entries
    )


def test_fit_power_law_synthetic():
    t = np.array(Config.DEFAULT_T_GRID)
    fit = fit_power_law(t, 3.0 * t**2)
    assert fit.slope == pytest.approx(2.0, abs=1e-6)
    assert fit.intercept == pytest.approx(np.log(3.0), abs=1e-6)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.dropped == 0


def test_fit_power_law_noise_floor():
    t = np.array(Config.DEFAULT_T_GRID)
    errors = 1e-3 * t**3
    errors[-1] = 1e-16
    fit = fit_power_law(t, errors)
    assert fit.dropped == 1
    assert fit.slope == pytest.approx(3.0, abs=1e-6)
    with pytest.raises(StudyError):
        fit_power_law(t, np.full(t.size, 1e-15))
    with pytest.raises(StudyError):
        fit_power_law(t[:2], np.array([1e-3, 1e-16]), max_dropped=5)


def test_convergence_study_first_order():
    cfg = EnsembleConfig(
        seed=11, n=3, block_spec=[2, 1], trials=2, predictor=PredictorName.FIRST_ORDER
    )
    report = convergence_study(cfg)
    assert report.predictor == "first_order"
    assert len(report.rows) == 2 * len(cfg.t_grid)
    assert [(r.trial, r.t) for r in report.rows[:2]] == [
        (0, cfg.t_grid[0]),
        (0, cfg.t_grid[1]),
    ]
    assert report.slope >= 1.9
    assert report.passed
    assert report.slope == min(f.slope for f in report.fits)
    assert len(report.mean_errors) == len(cfg.t_grid)

    csv = report.to_csv()
    lines = csv.splitlines()
    assert lines[0] == "trial,t,error"
    assert lines[-1].startswith("# slope=") and " r2=" in lines[-1]
    assert len(lines) == 2 + len(report.rows)
    assert convergence_study(cfg).to_csv() == csv


def test_convergence_study_workers_do_not_change_output():
    cfg = EnsembleConfig(seed=5, n=3, block_spec=[1, 1, 1], trials=3)
    parallel = EnsembleConfig(seed=5, n=3, block_spec=[1, 1, 1], trials=3, workers=3)
    assert convergence_study(cfg).to_csv() == convergence_study(parallel).to_csv()


def test_convergence_study_failed_trials():
    cfg = EnsembleConfig(
        seed=2,
        n=3,
        block_spec=[2, 1],
        trials=2,
        t_grid=[10.0, 5.0],
        predictor=PredictorName.SCHUR_FULL,
    )
    with pytest.raises(StudyError):
        convergence_study(cfg)


def test_report_json():
    cfg = EnsembleConfig(seed=1, n=2, block_spec=[1, 1], trials=1)
    report = convergence_study(cfg)
    decoded = msgspec.json.decode(msgspec.json.encode(report))
    assert decoded["predictor"] == "first_order"
    assert len(decoded["rows"]) == len(cfg.t_grid)


def test_paper_example_regression():
    report = paper_example_regression()
    print(f"Test regression report: {report}")
    assert report.passed, report.failed
    assert [c.name for c in report.clauses] == [
        "schur_b",
        "n_matrix",
        "eigenvector_derivative",
        "eigenvectors",
        "naive_derivative",
        "second_order",
    ]
    assert paper_example_regression() == report


@settings(deadline=None, max_examples=20)
@given(seed=seeds, size=st.integers(1, 4), t=st.sampled_from([1e-1, 1e-2, 1e-3]))
def test_cone_instance_has_diagonal_schur_complements(
    seed: int, size: int, t: float
):
    print(f"Test cone instance with: {locals()}")
    cfg = EnsembleConfig(
        seed=seed, n=2 * size, block_spec=[size, size], ensemble=EnsembleKind.CONE
    )
    a, f = generate_instance(cfg, 0)
    assert operator_norm(f) == pytest.approx(1.0, abs=1e-12)
    report = vc_membership(align(a, f.scaled(t)), c=0.05, diag_tol=1e-10)
    assert report.member
    assert len(report.blocks) == (2 if size > 1 else 0)
    for witness in report.blocks:
        assert witness.worst_off_diagonal <= 1e-10 * t


def test_cone_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(
            seed=1, n=3, block_spec=[2, 1], ensemble=EnsembleKind.CONE
        )
    with pytest.raises(ValueError):
        EnsembleConfig(
            seed=1, n=6, block_spec=[2, 2, 2], ensemble=EnsembleKind.CONE
        )
    cfg = msgspec.json.decode(
        b'{"seed": 1, "n": 4, "block_spec": [2, 2], "ensemble": "cone"}',
        type=EnsembleConfig,
    )
    assert cfg.ensemble is EnsembleKind.CONE


def test_convergence_study_cone_eigenvectors():
    cfg = EnsembleConfig(
        seed=17,
        n=4,
        block_spec=[2, 2],
        trials=3,
        ensemble=EnsembleKind.CONE,
        predictor=PredictorName.EIGVEC_U_AP,
    )
    report = convergence_study(cfg)
    assert report.slope >= 1.8
    assert report.passed
    assert report.max_diagnostic is None


def test_convergence_study_reports_k_ratio():
    cfg = EnsembleConfig(
        seed=7,
        n=4,
        block_spec=[2, 1, 1],
        trials=2,
        predictor=PredictorName.U_AP_RESIDUAL,
    )
    report = convergence_study(cfg)
    assert report.max_diagnostic is not None
    assert 0.0 < report.max_diagnostic < float("inf")
    decoded = msgspec.json.decode(msgspec.json.encode(report))
    assert decoded["max_diagnostic"] == report.max_diagnostic


if __name__ == "__main__":
    test_fit_power_law_synthetic()
    test_paper_example_regression()
