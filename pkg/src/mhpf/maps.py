"""The tensor-induced multi-homogeneous map and block-vector helpers.

A block vector is a list of ``d`` one-dimensional numpy arrays.  Given a
tensor of order ``m``, a partition ``nu`` of its modes into ``d`` consecutive
blocks and exponents ``p_1, ..., p_d > 1``, block ``i`` of the map is::

    R_i(x) = psi_{p_i'}( T_{s_i}(x_1, ..., x_1, ..., x_d, ..., x_d) )

where block ``k`` is repeated ``nu_k`` times, ``s_i`` is the first mode of
block ``i`` and ``p_i' = p_i / (p_i - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateIterateError, DimensionError, InvalidProblemError
from .tensor import NonnegTensor, contract_mode, multilinear_form


def holder_conjugate(p):
    """Return ``p / (p - 1)``."""
    if not p > 1:
        raise InvalidProblemError("exponent must exceed 1")
    return p / (p - 1.0)


def _signed_power(z, a):
    # |z|^a sign(z) through exp/log so zeros and denormals stay exact zeros
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    nz = z != 0
    out[nz] = np.sign(z[nz]) * np.exp(a * np.log(np.abs(z[nz])))
    return out


def psi(p, z):
    """Componentwise ``|z_j|^(p-1) sign(z_j)``; inverse of ``psi(p', .)``."""
    if not p > 1:
        raise InvalidProblemError("exponent must exceed 1")
    return _signed_power(z, p - 1.0)


@dataclass(frozen=True)
class ProblemSpec:
    """Tensor plus block partition and exponents.

    Parameters
    ----------
    tensor : NonnegTensor
    nu : tuple of int
        Block multiplicities, summing to the tensor order.
    p : tuple of float
        One exponent per block, each in ``(1, inf)``.
    """

    tensor: NonnegTensor
    nu: tuple
    p: tuple
    conjugates: tuple = field(init=False, repr=False)
    starts: tuple = field(init=False, repr=False)
    block_dims: tuple = field(init=False, repr=False)

    def __post_init__(self):
        nu = tuple(int(v) for v in self.nu)
        p = tuple(float(v) for v in self.p)
        if len(nu) == 0:
            raise InvalidProblemError("at least one block is required")
        if len(nu) != len(p):
            raise InvalidProblemError(
                f"nu has {len(nu)} entries but p has {len(p)}"
            )
        if any(v <= 0 for v in nu):
            raise InvalidProblemError("block multiplicities must be positive")
        if sum(nu) != self.tensor.order:
            raise InvalidProblemError(
                f"arity mismatch: nu sums to {sum(nu)} but tensor order is "
                f"{self.tensor.order}"
            )
        for q in p:
            if not (q > 1 and np.isfinite(q)):
                raise InvalidProblemError("exponent must exceed 1 and be finite")
        starts = tuple(int(s) for s in np.concatenate([[0], np.cumsum(nu)[:-1]]))
        dims = self.tensor.dims
        block_dims = []
        for s, v in zip(starts, nu):
            group = dims[s : s + v]
            if len(set(group)) != 1:
                raise InvalidProblemError(
                    f"modes {s}..{s + v - 1} form one block but have sizes {group}"
                )
            block_dims.append(group[0])
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "conjugates", tuple(q / (q - 1.0) for q in p))
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "block_dims", tuple(block_dims))

    @property
    def d(self):
        return len(self.nu)

    @property
    def m(self):
        return self.tensor.order

    @property
    def slot_blocks(self):
        """Block index owning each tensor mode."""
        return tuple(i for i, v in enumerate(self.nu) for _ in range(v))

    def ones(self):
        return [np.ones(n) for n in self.block_dims]

    def uniform(self):
        """All-ones block vector normalized onto the product sphere."""
        return normalize(self.ones(), self.p)


def check_block_vector(spec, x, nonneg=True):
    """Validate shapes (and sign) of a block vector and return float copies."""
    if len(x) != spec.d:
        raise DimensionError(f"expected {spec.d} blocks, got {len(x)}")
    out = []
    for i, (xi, n) in enumerate(zip(x, spec.block_dims)):
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (n,):
            raise DimensionError(f"block {i} has shape {xi.shape}, expected ({n},)")
        if not np.all(np.isfinite(xi)):
            raise ValueError(f"block {i} has non-finite entries")
        if nonneg and np.any(xi < 0):
            raise ValueError(f"block {i} has negative entries")
        out.append(xi)
    return out


def is_nonneg(x):
    return all(np.all(np.asarray(xi) >= 0) for xi in x)


def is_positive(x):
    return all(np.all(np.asarray(xi) > 0) for xi in x)


def expand(spec, x):
    """Repeat block ``k`` of ``x`` ``nu_k`` times, one vector per tensor mode."""
    return [x[b] for b in spec.slot_blocks]


def eval_R(spec, x):
    """Evaluate the multi-homogeneous map at a nonnegative block vector."""
    x = check_block_vector(spec, x)
    ys = expand(spec, x)
    return [
        psi(spec.conjugates[i], contract_mode(spec.tensor, spec.starts[i], ys))
        for i in range(spec.d)
    ]


def homogeneity_matrix(spec):
    """``diag(p_i' - 1) (nu 1^T - I)``: entry ``(i, k)`` is the degree of block i in x_k."""
    nu = np.asarray(spec.nu, dtype=float)
    scale = np.asarray(spec.conjugates) - 1.0
    return scale[:, None] * (np.ones((spec.d, 1)) * nu[None, :] - np.eye(spec.d))


def block_norms(x, p):
    return np.array([np.linalg.norm(xi, ord=q) for xi, q in zip(x, p)])


def normalize(x, p):
    """Divide every block by its ``l^{p_i}`` norm.

    Raises
    ------
    DegenerateIterateError
        If some block is identically zero.
    """
    out = []
    for i, (xi, q) in enumerate(zip(x, p)):
        xi = np.asarray(xi, dtype=float)
        nrm = np.linalg.norm(xi, ord=q)
        if nrm == 0:
            raise DegenerateIterateError(i)
        out.append(xi / nrm)
    return out


def eigenvalue_from_vector(spec, x):
    """Return ``tau(x_1, ..., x_d)`` with block multiplicities ``nu``.

    For an eigenvector on the product sphere this is the scalar eigenvalue
    ``lam`` with ``R_i(x) = lam^(p_i' - 1) x_i``.
    """
    x = check_block_vector(spec, x)
    return multilinear_form(spec.tensor, expand(spec, x))


def power_of_blocks(alpha, A):
    """``alpha^A``: entry ``i`` is ``prod_k alpha_k^{A_ik}``."""
    alpha = np.asarray(alpha, dtype=float)
    return np.exp(np.asarray(A) @ np.log(alpha))


__all__ = [
    "NonnegTensor",
    "ProblemSpec",
    "block_norms",
    "check_block_vector",
    "eigenvalue_from_vector",
    "eval_R",
    "expand",
    "holder_conjugate",
    "homogeneity_matrix",
    "is_nonneg",
    "is_positive",
    "normalize",
    "power_of_blocks",
    "psi",
]
