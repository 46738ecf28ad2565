"""Brute-force reference values for testing.

Nothing here calls into the solver or the map evaluation code: the
multilinear form is evaluated with ``numpy.einsum`` on the dense tensor.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass

import numpy as np

from .exceptions import BudgetExceededError

MAX_TOTAL_DIM = 6


@dataclass(frozen=True)
class GridSpec:
    """Simplex grid ``w = c / resolution`` per block, mapped to ``x = w**(1/p)``."""

    resolution: int = 24
    budget: int = 5_000_000
    ascent_steps: int = 100
    chunk: int = 20_000

    def __post_init__(self):
        if self.resolution < 4:
            raise ValueError("resolution must be at least 4")


def _compositions(n, total):
    # lexicographic list of nonnegative integer n-vectors summing to total
    rows = []
    for bars in itertools.combinations(range(total + n - 1), n - 1):
        edges = (-1,) + bars + (total + n - 1,)
        rows.append([edges[k + 1] - edges[k] - 1 for k in range(n)])
    return np.array(rows, dtype=float)


def _rayleigh(dense, nu, xs):
    """tau at a batch: ``xs[i]`` has shape (batch, n_i)."""
    m = dense.ndim
    letters = string.ascii_lowercase[:m]
    operands, subs = [dense], [letters]
    slot = 0
    for i, v in enumerate(nu):
        for _ in range(v):
            operands.append(xs[i])
            subs.append("z" + letters[slot])
            slot += 1
    return np.einsum(",".join(subs) + "->z", *operands)


def _to_sphere(w, p):
    return w ** (1.0 / p)


def grid_rayleigh_max(spec, grid=None):
    """Maximize ``tau(x_1, ..., x_d)`` over the nonnegative product sphere.

    An exhaustive pass over the grid is followed by coordinate ascent that
    moves simplex mass between pairs of coordinates with a halving step.
    The result is a lower bound on the maximum.

    Raises
    ------
    BudgetExceededError
        If the total block dimension exceeds six or the grid is too large.
    """
    grid = grid or GridSpec()
    dims = spec.block_dims
    if sum(dims) > MAX_TOTAL_DIM:
        raise BudgetExceededError(f"total block dimension {sum(dims)} exceeds {MAX_TOTAL_DIM}")
    dense = spec.tensor.to_dense()
    nu = spec.nu
    p = spec.p
    simplices = [_compositions(n, grid.resolution) / grid.resolution for n in dims]
    sizes = [s.shape[0] for s in simplices]
    total = int(np.prod(sizes))
    if total > grid.budget:
        raise BudgetExceededError(f"grid has {total} points, budget is {grid.budget}")
    spheres = [_to_sphere(s, q) for s, q in zip(simplices, p)]

    best_val, best_flat = -np.inf, 0
    for lo in range(0, total, grid.chunk):
        flat = np.arange(lo, min(lo + grid.chunk, total))
        multi = np.unravel_index(flat, sizes)
        vals = _rayleigh(dense, nu, [sp[mi] for sp, mi in zip(spheres, multi)])
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_flat = float(vals[j]), int(flat[j])

    multi = np.unravel_index(best_flat, sizes)
    w = [s[mi].copy() for s, mi in zip(simplices, multi)]

    def value(ws):
        return float(_rayleigh(dense, nu, [_to_sphere(wi, q)[None, :] for wi, q in zip(ws, p)])[0])

    step = 1.0 / grid.resolution
    for _ in range(grid.ascent_steps):
        improved = False
        for i, n in enumerate(dims):
            for a in range(n):
                for b in range(n):
                    if a == b or w[i][a] <= 0:
                        continue
                    move = min(step, w[i][a])
                    trial = [wi.copy() for wi in w]
                    trial[i][a] -= move
                    trial[i][b] += move
                    val = value(trial)
                    if val > best_val:
                        best_val, w, improved = val, trial, True
        if not improved:
            step *= 0.5
    return best_val


def classical_power_oracle(M, iters=1000):
    """Textbook ``x <- Mx / ||Mx||_2`` from the uniform vector.

    Returns
    -------
    rho : float
        ``||Mx||_2`` at the final unit vector.
    vec : numpy.ndarray
    """
    M = np.asarray(M, dtype=float)
    if not np.any(M):
        raise ValueError("matrix is identically zero")
    x = np.ones(M.shape[1]) / np.sqrt(M.shape[1])
    for _ in range(iters):
        y = M @ x
        x = y / np.linalg.norm(y)
    return float(np.linalg.norm(M @ x)), x
