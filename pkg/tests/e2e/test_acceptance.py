import numpy as np
import pytest
from hypothesis import given, settings

from hermpert.alignment import align, commutator_residual, m_matrix
from hermpert.first_order import (
    first_order_prediction,
    gershgorin_intervals,
    in_disc_union,
    weyl_bound,
)
from hermpert.harness import (
    convergence_study,
    generate_instance,
    paper_example_regression,
)
from hermpert.jacobi_oracle import eigh, eigvalsh, residual
from hermpert.rayleigh_schrodinger import line_expansion
from hermpert.schur import refined_prediction
from hermpert.structs.study import EnsembleConfig, EnsembleKind, PredictorName
from tests.unit.utils import get_fixture_matrix, seeds

pytestmark = pytest.mark.acceptance

SEED = 20240917


def ensemble(predictor: PredictorName, **kwargs) -> EnsembleConfig:
    values = dict(seed=SEED, n=6, block_spec=[2, 2, 1, 1], trials=20)
    values.update(kwargs)
    return EnsembleConfig(predictor=predictor, **values)


def test_worked_example():
    report = paper_example_regression()
    assert report.passed, report.failed


def test_first_order_eigenvalues():
    report = convergence_study(ensemble(PredictorName.FIRST_ORDER))
    assert report.slope >= 1.9
    assert not report.failed_trials


@pytest.mark.parametrize(
    "predictor", [PredictorName.SCHUR_FULL, PredictorName.SCHUR_SIMPLIFIED]
)
def test_refined_eigenvalues(predictor: PredictorName):
    assert convergence_study(ensemble(predictor)).slope >= 2.7


def test_refined_error_bound_at_one_hundredth():
    cfg = ensemble(PredictorName.SCHUR_FULL)
    for trial in range(cfg.trials):
        a, f = generate_instance(cfg, trial)
        e = f.scaled(1e-2)
        prediction = refined_prediction(align(a, e))
        error = np.max(np.abs(eigvalsh(a + e) - np.sort(prediction.xi_hat)[::-1]))
        assert error <= 10.0 * np.max(prediction.error_scale())


def test_second_order_along_line():
    assert convergence_study(ensemble(PredictorName.RS_SECOND_ORDER)).slope >= 2.7
    expansion = line_expansion(
        align(get_fixture_matrix("diag_3_1.txt"), get_fixture_matrix("swap.txt"))
    )
    for t in (0.1, 0.03, 0.01):
        exact = np.array([2.0 + np.sqrt(1.0 + t * t), 2.0 - np.sqrt(1.0 + t * t)])
        predicted = expansion.evaluate(t)
        assert np.max(np.abs(predicted - exact)) <= 2.0 * t**4


def test_eigenvector_derivative():
    kwargs = dict(n=4, block_spec=[2, 1, 1], trials=10)
    first_order = ensemble(PredictorName.EIGVEC_FIRST_ORDER, **kwargs)
    assert convergence_study(first_order).slope >= 1.8
    quotient = convergence_study(
        ensemble(PredictorName.EIGVEC_DIFFERENCE_QUOTIENT, **kwargs)
    )
    assert quotient.slope >= 0.9


def test_approximate_decomposition_residual():
    report = convergence_study(ensemble(PredictorName.U_AP_RESIDUAL, trials=5))
    assert report.slope >= 1.8
    assert report.max_diagnostic is not None
    assert np.isfinite(report.max_diagnostic)


@pytest.mark.parametrize("size", [2, 3])
def test_cone_eigenvectors(size: int):
    cfg = ensemble(
        PredictorName.EIGVEC_U_AP,
        n=2 * size,
        block_spec=[size, size],
        trials=10,
        ensemble=EnsembleKind.CONE,
    )
    report = convergence_study(cfg)
    assert report.slope >= 1.8
    assert not report.failed_trials


@settings(deadline=None, max_examples=200)
@given(seed=seeds)
def test_structural_invariants(seed: int):
    cfg = EnsembleConfig(seed=seed, n=4, block_spec=[2, 1, 1])
    a, f = generate_instance(cfg, 0)
    scale = max(1.0, float(np.max(np.abs(eigvalsh(a)))))

    assert np.array_equal(a.entries, a.entries.conj().T)
    d = eigh(a)
    assert residual(a, d) <= 1e-11 * scale
    assert np.max(np.abs(d.u.conj().T @ d.u - np.eye(4))) <= 1e-12
    assert np.all(np.diff(d.lam) <= 0.0)

    e = f.scaled(1e-2)
    ap = align(a, e)
    m = m_matrix(ap.base, ap.blocks)
    assert np.array_equal(m.entries, -m.entries.T)
    assert commutator_residual(ap, m) <= 1e-12 * scale

    xi = eigvalsh(a + e)
    assert np.all(in_disc_union(xi, gershgorin_intervals(ap), tol=1e-12))
    assert weyl_bound(ap.alpha, xi, ap.e_norm).holds
    assert first_order_prediction(ap, m).k_ratio <= 10.0

    expansion = line_expansion(align(a, f))
    n = expansion.n_mat.entries
    assert np.max(np.abs(n + n.conj().T)) <= 1e-12
    rotation = expansion.base.u.conj().T @ expansion.u_prime.entries
    assert np.max(np.abs(rotation + rotation.conj().T)) <= 1e-12 * max(
        1.0, float(np.max(np.abs(rotation)))
    )
