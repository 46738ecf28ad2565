"""Analytics on small nonnegative matrices, chiefly the homogeneity matrix.

Spectral radii are obtained from a Collatz-Wielandt bracketed power
iteration, never from a general eigensolver.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .exceptions import NoWeightVectorError

REGIME_TOL = 1e-9
"""Tolerance on ``rho(A) - 1`` separating the three regimes."""


class Regime(str, enum.Enum):
    CONTRACTIVE = "contractive"
    NONEXPANSIVE = "nonexpansive"
    EXPANSIVE = "expansive"


def classify_regime(rho, tol=REGIME_TOL):
    if rho < 1 - tol:
        return Regime.CONTRACTIVE
    if rho > 1 + tol:
        return Regime.EXPANSIVE
    return Regime.NONEXPANSIVE


@dataclass(frozen=True)
class WeightVector:
    """Positive weights ``b`` (summing to one) with ``A^T b <= r b``."""

    b: np.ndarray
    r: float

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if b.ndim != 1 or np.any(b <= 0):
            raise ValueError("weights must be a positive vector")
        object.__setattr__(self, "b", b / b.sum())


@dataclass(frozen=True)
class RadiusEstimate:
    """Spectral radius with the bracket certifying it.

    ``lower <= rho(A) <= upper`` always holds.  ``left_vec`` is the positive
    left Perron vector (normalized to sum one) when ``A`` is irreducible and
    ``None`` otherwise.
    """

    rho: float
    lower: float
    upper: float
    left_vec: np.ndarray | None
    iterations: int

    def __iter__(self):
        # allows ``rho, left_vec = spectral_radius_nonneg(A)``
        return iter((self.rho, self.left_vec))


def _as_nonneg_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if np.any(M < 0):
        raise ValueError("matrix has negative entries")
    return M


def _bool_matmul(X, Y):
    return (X.astype(np.int64) @ Y.astype(np.int64)) > 0


def is_irreducible_matrix(M):
    """True iff ``(I + pattern(M))^(n-1)`` is entrywise positive."""
    M = _as_nonneg_square(M)
    n = M.shape[0]
    P = (M > 0) | np.eye(n, dtype=bool)
    # (I + M)^k is monotone in k, so squaring past n - 1 is harmless
    power, reach = 1, P
    while power < n - 1:
        reach = _bool_matmul(reach, reach)
        power *= 2
    return bool(np.all(reach))


def is_primitive_matrix(M):
    """True iff some power ``M^k`` with ``k <= n^2 - 2n + 2`` is entrywise positive.

    Primitive patterns stay positive for every exponent beyond their
    exponent of primitivity, so one power of two past the Wielandt bound
    suffices.
    """
    M = _as_nonneg_square(M)
    n = M.shape[0]
    P = M > 0
    bound = n * n - 2 * n + 2
    power = 1
    while power < bound:
        P = _bool_matmul(P, P)
        power *= 2
    return bool(np.all(P))


def _irreducible_radius(A, tol, max_iter):
    # A irreducible: I + A^T is primitive with the same Perron vector, so the
    # iteration converges even when A is periodic.
    d = A.shape[0]
    At = A.T
    b = np.full(d, 1.0 / d)
    lo = hi = 0.0
    for it in range(1, max_iter + 1):
        y = At @ b
        ratios = y / b
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= tol:
            break
        b = b + y
        b /= b.sum()
    return lo, hi, b, it


def spectral_radius_nonneg(A, tol=1e-13, max_iter=200_000):
    """Spectral radius of a nonnegative matrix.

    Irreducible matrices are handled by a power iteration on ``I + A^T``
    stopped once the Collatz-Wielandt ratios ``(A^T b)_i / b_i`` agree to
    ``tol``.  Reducible matrices are split into strongly connected
    components and the largest component radius is returned.

    Returns
    -------
    RadiusEstimate
    """
    A = _as_nonneg_square(A)
    d = A.shape[0]
    if is_irreducible_matrix(A):
        if d == 1:
            v = float(A[0, 0])
            return RadiusEstimate(v, v, v, np.ones(1), 0)
        lo, hi, b, it = _irreducible_radius(A, tol, max_iter)
        return RadiusEstimate(0.5 * (lo + hi), lo, hi, b, it)

    ncomp, labels = connected_components(A > 0, directed=True, connection="strong")
    lower = upper = 0.0
    iters = 0
    for c in range(ncomp):
        members = np.flatnonzero(labels == c)
        block = A[np.ix_(members, members)]
        if members.size == 1:
            lo = hi = float(block[0, 0])
        else:
            lo, hi, _, it = _irreducible_radius(block, tol, max_iter)
            iters += it
        lower, upper = max(lower, lo), max(upper, hi)
    return RadiusEstimate(0.5 * (lower + upper), lower, upper, None, iters)


def lipschitz_constant(A, b):
    """``max_i (A^T b)_i / b_i`` for a positive weight vector ``b``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b <= 0):
        raise ValueError("weights must be positive")
    return float(np.max((A.T @ b) / b))


def find_weight_vector(A, tol=1e-13, max_bisect=200):
    """Positive weights ``b`` and factor ``r`` with ``A^T b <= r b``.

    For irreducible ``A`` the left Perron vector is returned with
    ``r = rho(A)``.  Otherwise the weights come from the perturbed matrix
    ``A + t 1 1^T`` with ``t`` halved from 1 until its radius drops below
    one.

    Raises
    ------
    NoWeightVectorError
        If ``A`` is reducible with ``rho(A) >= 1``.
    """
    A = _as_nonneg_square(A)
    d = A.shape[0]
    est = spectral_radius_nonneg(A, tol=tol)
    if est.left_vec is not None:
        b = est.left_vec / est.left_vec.sum()
        # bracket midpoint may sit a hair below the attained ratio
        r = max(est.rho, lipschitz_constant(A, b))
        return WeightVector(b, r)
    if est.lower >= 1:
        raise NoWeightVectorError(
            f"homogeneity matrix is reducible with spectral radius {est.rho:.17g} >= 1"
        )
    uniform = np.full(d, 1.0 / d)
    r_uniform = lipschitz_constant(A, uniform)
    if r_uniform < 1:
        return WeightVector(uniform, r_uniform)
    ones = np.ones((d, d))
    t = 1.0
    for _ in range(max_bisect):
        shifted = spectral_radius_nonneg(A + t * ones, tol=tol)
        if shifted.upper < 1:
            b = shifted.left_vec / shifted.left_vec.sum()
            return WeightVector(b, max(shifted.upper, lipschitz_constant(A, b)))
        t *= 0.5
    raise NoWeightVectorError("bisection for a perturbed weight vector failed")


def equality_weight_vector(A, tol=1e-9):
    """Weights with ``A^T b = b``; requires irreducible ``A`` with ``rho(A) = 1``."""
    est = spectral_radius_nonneg(A)
    if est.left_vec is None:
        raise NoWeightVectorError("no equality weight vector: homogeneity matrix is reducible")
    if abs(est.rho - 1) > tol:
        raise NoWeightVectorError(
            f"no equality weight vector: spectral radius is {est.rho:.17g}"
        )
    return WeightVector(est.left_vec, 1.0)


def decouple_homogeneity(A, i):
    """Homogeneity matrix after eliminating block ``i`` (needs ``A[i, i] == 0``).

    Entry ``(k, l)`` of the result, ``k, l != i``, is ``A[k, l] + A[k, i] A[i, l]``.
    """
    A = np.asarray(A, dtype=float)
    if A[i, i] != 0:
        raise ValueError(f"A[{i}, {i}] must be zero to decouple block {i}")
    keep = [k for k in range(A.shape[0]) if k != i]
    full = A + np.outer(A[:, i], A[i, :])
    return full[np.ix_(keep, keep)]
