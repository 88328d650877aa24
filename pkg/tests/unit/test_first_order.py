import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermpert.alignment import (
    align,
    blockwise_diagonalize,
    conjugate_to_eigenbasis,
    m_matrix,
)
from hermpert.exceptions import DimensionMismatchError, ModeError
from hermpert.first_order import (
    approx_decomposition_residual,
    first_order_eigenvalues,
    first_order_prediction,
    gershgorin_intervals,
    in_disc_union,
    u_approx,
    weyl_bound,
)
from hermpert.jacobi_oracle import eigh, eigvalsh
from hermpert.structs.aligned import MMatrix
from hermpert.structs.matrix import HermitianMatrix
from tests.unit.utils import (
    block_specs,
    get_fixture_matrix,
    seeded_instance,
    seeds,
    standard_order,
)


def two_by_two():
    a = get_fixture_matrix("diag_3_1.txt")
    return align(a, get_fixture_matrix("coupling_0_1.txt"))


def two_by_two_sum():
    return get_fixture_matrix("diag_3_1.txt") + get_fixture_matrix("coupling_0_1.txt")


def test_two_by_two_prediction():
    ap = two_by_two()
    xi_hat = first_order_eigenvalues(ap)
    assert np.array_equal(xi_hat, np.array([3.0, 1.0]))
    xi = eigvalsh(two_by_two_sum())
    assert xi == pytest.approx([3.0049875621120890, 0.99501243788791], abs=1e-14)
    assert np.max(np.abs(xi - xi_hat)) <= ap.e_norm**2 / 2.0


def test_two_by_two_discs():
    discs = gershgorin_intervals(two_by_two())
    assert [(d.center, d.radius) for d in discs] == [
        (3.0, pytest.approx(0.1)),
        (1.0, pytest.approx(0.1)),
    ]


def test_two_by_two_u_approx():
    ap = two_by_two()
    m = m_matrix(ap.base, ap.blocks)
    u_ap = u_approx(ap, m).entries
    assert np.allclose(u_ap, [[1.0, -0.05], [0.05, 1.0]], atol=1e-15)
    oracle = eigh(two_by_two_sum())
    assert abs(oracle.u[1, 0]) == pytest.approx(0.049814, abs=1e-5)
    assert np.max(np.abs(np.abs(oracle.u) - np.abs(u_ap))) <= ap.e_norm**2
    assert approx_decomposition_residual(ap, m) <= 0.01


def test_zero_perturbation():
    a = get_fixture_matrix("example_a.txt")
    ap = align(a, HermitianMatrix.zeros(3))
    m = m_matrix(ap.base, ap.blocks)
    assert np.array_equal(first_order_eigenvalues(ap), ap.alpha)
    assert np.array_equal(u_approx(ap, m).entries, ap.u)
    assert approx_decomposition_residual(ap, m) <= 1e-15
    assert first_order_prediction(ap).k_ratio == 0.0


def test_raw_mode_rejected():
    a = get_fixture_matrix("example_a.txt")
    ap = conjugate_to_eigenbasis(eigh(a), get_fixture_matrix("example_f.txt"))
    with pytest.raises(ModeError):
        first_order_eigenvalues(ap)
    # discs need no particular basis
    assert len(gershgorin_intervals(ap)) == 3


def test_example_prediction_and_discs():
    a = get_fixture_matrix("example_a.txt")
    ap = align(a, get_fixture_matrix("example_f.txt").scaled(0.01))
    perm = standard_order(ap.u)
    xi_hat = first_order_eigenvalues(ap)[perm]
    assert xi_hat == pytest.approx([0.01, 0.0, 1.0], abs=1e-15)
    discs = [gershgorin_intervals(ap)[j] for j in perm]
    assert [d.center for d in discs] == pytest.approx([0.01, 0.0, 1.0], abs=1e-15)
    assert [d.radius for d in discs] == pytest.approx([0.01, 0.01, 0.02], abs=1e-15)


def test_u_approx_dimension_mismatch():
    ap = two_by_two()
    with pytest.raises(DimensionMismatchError):
        u_approx(ap, MMatrix(entries=np.zeros((3, 3))))


@settings(deadline=None, max_examples=60)
@given(
    seed=seeds,
    block_spec=block_specs,
    scale=st.sampled_from([1e-1, 1e-2, 1e-3]),
)
def test_oracle_in_discs_and_weyl(seed: int, block_spec, scale: float):
    print(f"Test Gershgorin and Weyl with: {locals()}")
    a, e = seeded_instance(seed, block_spec, scale)
    ap = align(a, e)
    xi = eigvalsh(a + e)
    assert np.all(in_disc_union(xi, gershgorin_intervals(ap), tol=1e-12))
    assert weyl_bound(ap.alpha, xi, ap.e_norm).holds

    prediction = first_order_prediction(ap)
    assert prediction.k_ratio <= 10.0
    assert prediction.residual <= 100.0 * ap.e_norm**2
    paired = np.sort(prediction.xi_hat)[::-1]
    assert np.max(np.abs(xi - paired)) <= 10.0 * ap.e_norm**2


@settings(deadline=None, max_examples=30)
@given(seed=seeds, x=st.floats(-2.0, 2.0), y=st.floats(-2.0, 2.0))
def test_linear_in_perturbation(seed: int, x: float, y: float):
    a, e1 = seeded_instance(seed, (1, 1, 1, 1), 0.01)
    _, e2 = seeded_instance(seed + 1, (1, 1, 1, 1), 0.01)
    base = eigh(a)

    def shift(e):
        ap = conjugate_to_eigenbasis(base, e)
        return first_order_eigenvalues(blockwise_diagonalize(ap)) - ap.alpha

    combined = HermitianMatrix.from_array(x * e1.entries + y * e2.entries)
    expected = x * shift(e1) + y * shift(e2)
    assert np.max(np.abs(shift(combined) - expected)) <= 1e-14


def test_weyl_bound_fails_for_large_shift():
    check = weyl_bound(np.array([1.0, 0.0]), np.array([1.5, 0.0]), 0.1)
    assert not check.holds
    assert check.max_shift == 0.5


if __name__ == "__main__":
    test_two_by_two_prediction()
    test_oracle_in_discs_and_weyl()
