import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhpf import (
    cw_bounds,
    eval_R,
    find_weight_vector,
    hilbert_metric,
    homogeneity_matrix,
    lipschitz_constant,
    normalize,
    thompson_metric,
)

from instances import random_block_vector, random_sparse_spec, random_small_spec


def test_hilbert_examples():
    x = [np.array([1.0, 2.0])]
    assert hilbert_metric([1.0], x, x) == 0
    assert hilbert_metric([1.0], x, [np.array([2.0, 2.0])]) == pytest.approx(np.log(2))


def test_thompson_examples():
    x = [np.array([1.0, 2.0])]
    assert thompson_metric([1.0], x, x) == 0
    assert thompson_metric([1.0], x, [np.array([2.0, 2.0])]) == pytest.approx(np.log(2))
    y = [np.array([1.0, 2.0]), np.array([0.5, 3.0, 1.0])]
    ey = [np.e * yi for yi in y]
    assert thompson_metric([0.5, 0.5], ey, y) == pytest.approx(1.0)


def test_boundary_gives_infinity():
    x = [np.array([1.0, 0.0])]
    y = [np.array([1.0, 1.0])]
    assert hilbert_metric([1.0], x, y) == np.inf
    assert thompson_metric([1.0], y, x) == np.inf


def test_input_validation():
    with pytest.raises(ValueError):
        hilbert_metric([1.0, 1.0], [np.ones(2)], [np.ones(2)])
    with pytest.raises(ValueError):
        hilbert_metric([0.0], [np.ones(2)], [np.ones(2)])
    with pytest.raises(ValueError):
        thompson_metric([1.0], [np.ones(2)], [np.ones(3)])


def test_large_dynamic_range():
    x = [np.array([1e-300, 1e300])]
    y = [np.array([1.0, 1.0])]
    assert hilbert_metric([1.0], x, y) == pytest.approx(600 * np.log(10))


def _blocks(rng, sizes):
    return [rng.uniform(0.1, 3, n) for n in sizes]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_hilbert_scaling_invariance(seed):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, 4, rng.integers(1, 4))
    b = rng.uniform(0.1, 1, sizes.size)
    x, y = _blocks(rng, sizes), _blocks(rng, sizes)
    alpha = rng.uniform(0.01, 100, sizes.size)
    ax = [a * xi for a, xi in zip(alpha, x)]
    assert hilbert_metric(b, ax, y) == pytest.approx(hilbert_metric(b, x, y), rel=1e-12, abs=1e-12)
    assert hilbert_metric(b, ax, x) == pytest.approx(0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_metric_axioms_on_sphere(seed):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, 4, rng.integers(1, 4))
    p = rng.uniform(1.2, 5, sizes.size)
    b = rng.uniform(0.1, 1, sizes.size)
    x, y, z = (normalize(_blocks(rng, sizes), p) for _ in range(3))
    for metric in (hilbert_metric, thompson_metric):
        assert metric(b, x, y) == pytest.approx(metric(b, y, x), rel=1e-12, abs=1e-12)
        assert metric(b, x, z) <= metric(b, x, y) + metric(b, y, z) + 1e-12
        assert metric(b, x, x) == 0
        assert metric(b, x, y) >= 0
    assert thompson_metric(b, x, y) >= 0.5 * hilbert_metric(b, x, y) - 1e-12


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_tensor_map_contraction_bound(seed):
    rng = np.random.default_rng(seed)
    s = random_sparse_spec(rng)
    A = homogeneity_matrix(s)
    b = rng.uniform(0.1, 1, s.d)
    C = lipschitz_constant(A, b)
    x, y = random_block_vector(rng, s), random_block_vector(rng, s)
    Rx, Ry = eval_R(s, x), eval_R(s, y)
    if not all(np.all(v > 0) for v in Rx + Ry):
        return
    assert hilbert_metric(b, Rx, Ry) <= C * hilbert_metric(b, x, y) * (1 + 1e-10) + 1e-14
    assert thompson_metric(b, Rx, Ry) <= C * thompson_metric(b, x, y) * (1 + 1e-10) + 1e-14


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_metric_of_step_is_log_bracket_ratio(seed):
    rng = np.random.default_rng(seed)
    s = random_small_spec(rng, symmetric=False)
    b = find_weight_vector(homogeneity_matrix(s)).b
    x = normalize(random_block_vector(rng, s), s.p)
    lo, hi = cw_bounds(s, b, x)
    # the bracket exponent turns the b-weighted metric into log(upper/lower)
    s_b = float(np.dot(b, s.conjugates))
    gamma = s_b / (s_b - 1)
    lhs = (gamma - 1) * hilbert_metric(b, eval_R(s, x), x)
    assert lhs == pytest.approx(np.log(hi / lo), rel=1e-12, abs=1e-12)
