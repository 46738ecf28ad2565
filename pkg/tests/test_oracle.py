import numpy as np
import pytest

from mhpf import BudgetExceededError, GridSpec, classical_power_oracle, grid_rayleigh_max, solve
from mhpf.oracle import _compositions

from instances import spec_from_dense, symmetrize_blocks


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(resolution=3)


def test_compositions_cover_simplex():
    c = _compositions(3, 4)
    assert c.shape == (15, 3)
    assert np.all(c.sum(axis=1) == 4)
    assert len({tuple(r) for r in c}) == 15


def test_all_ones_two_blocks():
    s = spec_from_dense(np.ones((2, 2)), (1, 1), (2.0, 2.0))
    assert grid_rayleigh_max(s) == pytest.approx(2.0, abs=1e-12)


def test_diagonal_singular_value():
    s = spec_from_dense(np.diag([1.0, 3.0]), (1, 1), (2.0, 2.0))
    assert grid_rayleigh_max(s) == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_random_cube_brackets_solver(seed):
    rng = np.random.default_rng(seed)
    arr = symmetrize_blocks(rng.uniform(0.05, 1, (2, 2, 2)), (3,))
    s = spec_from_dense(arr, (3,), (3.0,))
    ev = solve(s).eigenvalue
    val = grid_rayleigh_max(s, GridSpec(resolution=48))
    assert ev - 1e-3 <= val <= ev + 1e-9


def test_value_is_lower_bound_at_coarse_grid():
    rng = np.random.default_rng(7)
    arr = rng.uniform(0.1, 1, (2, 3))
    s = spec_from_dense(arr, (1, 1), (2.0, 2.0))
    sigma = np.linalg.svd(arr, compute_uv=False)[0]
    val = grid_rayleigh_max(s, GridSpec(resolution=4, ascent_steps=0))
    assert val <= sigma + 1e-12
    assert grid_rayleigh_max(s, GridSpec(resolution=48)) == pytest.approx(sigma, rel=1e-6)


def test_budget_errors():
    s = spec_from_dense(np.ones((4, 3)), (1, 1), (2.0, 2.0))
    with pytest.raises(BudgetExceededError):
        grid_rayleigh_max(s)
    s = spec_from_dense(np.ones((3, 3)), (1, 1), (2.0, 2.0))
    with pytest.raises(BudgetExceededError):
        grid_rayleigh_max(s, GridSpec(resolution=48, budget=100))


def test_classical_examples():
    rho, v = classical_power_oracle(np.ones((3, 3)))
    assert rho == pytest.approx(3.0, abs=1e-12)
    np.testing.assert_allclose(v, np.ones(3) / np.sqrt(3), atol=1e-12)
    rho, v = classical_power_oracle(np.diag([2.0, 1.0]))
    assert rho == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(v, [1.0, 0.0], atol=1e-12)


def test_classical_period_two_via_square():
    M = np.array([[0.0, np.sqrt(2)], [0.5, 0.0]])
    rho2, _ = classical_power_oracle(M @ M)
    assert rho2 == pytest.approx(2 ** -0.5, abs=1e-12)


def test_classical_matches_eigvals():
    rng = np.random.default_rng(3)
    for _ in range(5):
        M = rng.uniform(0, 1, (4, 4))
        rho, _ = classical_power_oracle(M)
        assert rho == pytest.approx(max(abs(np.linalg.eigvals(M))), rel=1e-10)


def test_classical_zero_matrix():
    with pytest.raises(ValueError):
        classical_power_oracle(np.zeros((2, 2)))
