import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhpf import (
    NoWeightVectorError,
    Regime,
    classical_power_oracle,
    classify_regime,
    decouple_homogeneity,
    find_weight_vector,
    homogeneity_matrix,
    is_irreducible_matrix,
    is_primitive_matrix,
    lipschitz_constant,
    spectral_radius_nonneg,
)

from instances import KREIN, spec_from_dense

EXAMPLE = np.array([[0.0, np.sqrt(2)], [0.5, 0.0]])


def test_radius_of_example():
    est = spectral_radius_nonneg(EXAMPLE)
    assert est.rho == pytest.approx(2**-0.25, abs=1e-12)
    v = est.left_vec
    np.testing.assert_allclose(v / v[1], [2**-0.75, 1], rtol=1e-10)
    np.testing.assert_allclose(EXAMPLE.T @ v, est.rho * v, rtol=1e-10)


def test_radius_trivial():
    assert spectral_radius_nonneg(np.eye(2)).rho == 1
    est = spectral_radius_nonneg(np.ones((4, 4)))
    assert est.rho == pytest.approx(4, abs=1e-12)
    np.testing.assert_allclose(est.left_vec, 0.25)
    rho, left = spectral_radius_nonneg(np.zeros((3, 3)))
    assert rho == 0 and left is None


def test_radius_rejects_bad_input():
    with pytest.raises(ValueError):
        spectral_radius_nonneg([[1.0, np.inf], [0, 1]])
    with pytest.raises(ValueError):
        spectral_radius_nonneg([[1.0, -1.0], [0, 1]])


def test_radius_of_nilpotent_and_triangular():
    assert spectral_radius_nonneg([[0.0, 1.0], [0.0, 0.0]]).rho == 0
    est = spectral_radius_nonneg(KREIN)
    assert est.rho == pytest.approx(2, abs=1e-12)
    assert est.left_vec is None


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 5))
def test_radius_sandwich_and_oracle(seed, d):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0, 1, (d, d)) * (rng.random((d, d)) < 0.7)
    est = spectral_radius_nonneg(A, tol=1e-12)
    assert est.lower <= est.rho <= est.upper
    assert est.upper - est.lower <= 1e-12
    if est.left_vec is not None:
        ratios = (A.T @ est.left_vec) / est.left_vec
        assert ratios.min() <= est.rho + 1e-15 and est.rho <= ratios.max() + 1e-15
        if is_primitive_matrix(A):
            ref, _ = classical_power_oracle(A, 5000)
            assert est.rho == pytest.approx(ref, rel=1e-9)


def test_find_weight_vector_irreducible_example():
    w = find_weight_vector(EXAMPLE)
    expect = np.array([2**-0.75, 1]) / (2**-0.75 + 1)
    np.testing.assert_allclose(w.b, expect, rtol=1e-10)
    assert w.r == pytest.approx(2**-0.25, abs=1e-12)


def test_find_weight_vector_reducible():
    A = np.diag([0.5, 0.5])
    w = find_weight_vector(A)
    assert w.r < 1
    assert np.all(w.b > 0)
    assert np.all(A.T @ w.b <= w.r * w.b * (1 + 1e-12))


def test_find_weight_vector_zero():
    w = find_weight_vector(np.zeros((3, 3)))
    np.testing.assert_allclose(w.b, 1 / 3)
    assert w.r == 0


def test_find_weight_vector_bisection_path():
    # reducible, rho = 0.9, uniform weights give 0.9 + 0.5 > 1
    A = np.array([[0.9, 0.0], [0.5, 0.0]])
    w = find_weight_vector(A)
    assert w.r < 1
    assert np.all(A.T @ w.b <= w.r * w.b * (1 + 1e-12))


@pytest.mark.parametrize("A", [np.eye(2), KREIN, np.array([[1.0, 1.0], [0.0, 0.5]])])
def test_find_weight_vector_fails_when_reducible_and_not_contractive(A):
    with pytest.raises(NoWeightVectorError):
        find_weight_vector(A)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 4))
def test_weight_vector_inequality(seed, d):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0, 1, (d, d)) * (rng.random((d, d)) < 0.6)
    A = A / (spectral_radius_nonneg(A).rho + rng.uniform(0.05, 2)) if A.any() else A
    try:
        w = find_weight_vector(A)
    except NoWeightVectorError:
        assert not is_irreducible_matrix(A) and spectral_radius_nonneg(A).rho >= 1
        return
    assert np.all(A.T @ w.b <= w.r * w.b + 1e-12)
    assert w.b.sum() == pytest.approx(1)


def test_lipschitz_examples():
    assert lipschitz_constant(EXAMPLE, [2**-0.75, 1]) == pytest.approx(2**-0.25, abs=1e-12)
    assert lipschitz_constant(np.eye(3), [0.2, 0.3, 5]) == 1
    A = np.array([[1.0, 2.0], [3.0, 1.0]])
    est = spectral_radius_nonneg(A)
    assert lipschitz_constant(A, est.left_vec) == pytest.approx(est.rho, rel=1e-12)
    with pytest.raises(ValueError):
        lipschitz_constant(A, [1.0, 0.0])


def test_irreducible_examples():
    assert is_irreducible_matrix([[0, 1], [1, 0]])
    assert not is_irreducible_matrix(KREIN)
    assert is_irreducible_matrix(np.ones((4, 4)))
    assert not is_irreducible_matrix(np.eye(2))
    cycle = np.roll(np.eye(6), 1, axis=1)
    assert is_irreducible_matrix(cycle)


def test_primitive_examples():
    assert not is_primitive_matrix([[0, 1], [1, 0]])
    assert is_primitive_matrix([[1, 1], [1, 0]])
    assert not is_primitive_matrix(np.eye(3))
    # Wielandt matrix: exponent of primitivity exactly n^2 - 2n + 2
    n = 5
    W = np.zeros((n, n))
    for i in range(n - 1):
        W[i, i + 1] = 1
    W[n - 1, 0] = W[n - 1, 1] = 1
    assert is_primitive_matrix(W)
    assert not np.all(np.linalg.matrix_power(W, n * n - 2 * n + 1) > 0)


def test_regime_classification():
    assert classify_regime(0.5) is Regime.CONTRACTIVE
    assert classify_regime(1 + 1e-12) is Regime.NONEXPANSIVE
    assert classify_regime(1 - 1e-12) is Regime.NONEXPANSIVE
    assert classify_regime(1.01) is Regime.EXPANSIVE


def test_decouple_examples():
    p, q = 3.0, 1.5
    pc, qc = p / (p - 1), q / (q - 1)
    A = np.array([[0, pc - 1], [qc - 1, 0]])
    np.testing.assert_allclose(decouple_homogeneity(A, 1), [[(pc - 1) * (qc - 1)]])
    np.testing.assert_allclose(decouple_homogeneity(np.zeros((3, 3)), 2), np.zeros((2, 2)))
    D = decouple_homogeneity(np.array([[0.0, 1], [1, 0]]), 0)
    assert spectral_radius_nonneg(D).rho == 1
    with pytest.raises(ValueError):
        decouple_homogeneity(np.eye(2), 0)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 4))
def test_decouple_preserves_classification(seed, d):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0, 1, (d, d))
    i = int(rng.integers(d))
    A[i, i] = 0
    A *= rng.uniform(0.3, 1.7) / spectral_radius_nonneg(A).rho
    rho = spectral_radius_nonneg(A).rho
    rho_dec = spectral_radius_nonneg(decouple_homogeneity(A, i)).rho
    if abs(rho - 1) > 1e-9:
        assert (rho < 1) == (rho_dec < 1)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(1.01, 10), q=st.floats(1.01, 10))
def test_two_block_matrix_radius(p, q):
    s = spec_from_dense(np.ones((2, 3)), (1, 1), (p, q))
    expect = np.sqrt((p / (p - 1) - 1) * (q / (q - 1) - 1))
    assert spectral_radius_nonneg(homogeneity_matrix(s)).rho == pytest.approx(expect, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_radius_decreases_in_each_exponent(seed):
    rng = np.random.default_rng(seed)
    layouts = [((2, 2, 2), (1, 1, 1)), ((2, 2, 2), (2, 1)), ((2, 2, 2, 2), (2, 2)), ((2, 2), (1, 1))]
    shape, nu = layouts[rng.integers(len(layouts))]
    p = rng.uniform(1.2, 6, len(nu))
    i = int(rng.integers(len(nu)))
    q = p.copy()
    q[i] += rng.uniform(0.1, 2)
    arr = np.ones(shape)
    r1 = spectral_radius_nonneg(homogeneity_matrix(spec_from_dense(arr, nu, p))).rho
    r2 = spectral_radius_nonneg(homogeneity_matrix(spec_from_dense(arr, nu, q))).rho
    assert r2 < r1
