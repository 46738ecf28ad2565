"""Structural diagnostics deciding which Perron-Frobenius conclusions apply.

Coordinates of a block vector are indexed by pairs ``(i, j)`` with block
``i`` and position ``j``; they are flattened block after block into the
vertex set of a :class:`StructureGraph`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import is_irreducible_matrix, is_primitive_matrix
from .exceptions import ResidualError
from .maps import check_block_vector, eval_R

ENUMERATION_CAP = 4096
"""Largest ``prod_i n_i`` for which canonical supports are enumerated."""


@dataclass(frozen=True)
class StructureGraph:
    """Directed graph on the coordinates of a block vector.

    ``adjacency[u, v]`` is true when output coordinate ``u`` of the map
    depends on input coordinate ``v``, i.e. there is an edge ``u -> v``.
    As a matrix this is the zero pattern of the Jacobian.
    """

    block_dims: tuple
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        n = int(sum(self.block_dims))
        if adj.shape != (n, n):
            raise ValueError(f"adjacency must be {n}x{n}, got {adj.shape}")
        object.__setattr__(self, "block_dims", tuple(int(v) for v in self.block_dims))
        object.__setattr__(self, "adjacency", adj)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.block_dims)]).astype(int)

    def vertex(self, i, j):
        """Flat index of coordinate ``(i, j)``."""
        return int(self.offsets[i] + j)

    def block_of(self, v):
        return int(np.searchsorted(self.offsets, v, side="right") - 1)


def _vertex_table(spec):
    """Flat vertex of every (entry, slot) pair, shape (nnz, m)."""
    offsets = np.concatenate([[0], np.cumsum(spec.block_dims)]).astype(np.int64)
    blocks = np.asarray(spec.slot_blocks)
    return spec.tensor.indices + offsets[blocks][None, :]


def jacobian_pattern_at_ones(spec):
    """Zero pattern of the Jacobian of the map at the all-ones vector.

    Built from the tensor's nonzero entries: an entry with index ``j``
    links output ``(k, j[s_k])`` to input ``(block(q), j[q])`` for every
    slot ``q != s_k``.
    """
    n = int(sum(spec.block_dims))
    adj = np.zeros((n, n), dtype=bool)
    verts = _vertex_table(spec)
    for s in spec.starts:
        for q in range(spec.m):
            if q != s:
                adj[verts[:, s], verts[:, q]] = True
    return StructureGraph(spec.block_dims, adj)


def r_at_ones_positive(spec):
    return all(np.all(ri > 0) for ri in eval_R(spec, spec.ones()))


def weak_irreducibility(spec):
    return is_irreducible_matrix(jacobian_pattern_at_ones(spec).adjacency)


def weak_primitivity(spec):
    return is_primitive_matrix(jacobian_pattern_at_ones(spec).adjacency)


@dataclass(frozen=True)
class StrongIrreducibility:
    """Outcome of the support-propagation test.

    ``value`` is ``None`` when the enumeration cap was exceeded; ``kappa``
    is the largest number of steps any canonical support needed to become
    full (``None`` unless ``value`` is true).
    """

    value: bool | None
    kappa: int | None
    note: str = ""

    def __iter__(self):
        return iter((self.value, self.kappa))


def _support_step(spec, verts, supported):
    new = supported.copy()
    for s in spec.starts:
        others = np.delete(verts, s, axis=1)
        hit = np.all(supported[others], axis=1)
        new[verts[hit, s]] = True
    return new


def strong_irreducibility(spec, cap=ENUMERATION_CAP):
    """Decide whether ``x + R(x)`` eventually fills every canonical support.

    For every choice ``j = (j_1, ..., j_d)`` the support of the block vector
    with unit vector ``e_{j_i}`` in block ``i`` is propagated: an output
    coordinate becomes supported once some tensor entry has all of its
    other slots supported.
    """
    count = int(np.prod(spec.block_dims))
    if count > cap:
        return StrongIrreducibility(
            None, None, f"{count} canonical supports exceed the cap of {cap}"
        )
    n = int(sum(spec.block_dims))
    verts = _vertex_table(spec)
    offsets = np.concatenate([[0], np.cumsum(spec.block_dims)]).astype(int)
    kappa = 0
    for choice in np.ndindex(*spec.block_dims):
        supported = np.zeros(n, dtype=bool)
        supported[offsets[:-1] + np.asarray(choice)] = True
        steps = 0
        while not supported.all():
            nxt = _support_step(spec, verts, supported)
            steps += 1
            if np.array_equal(nxt, supported) or steps > n:
                return StrongIrreducibility(False, None, f"support from {choice} stalls")
            supported = nxt
        kappa = max(kappa, steps)
    return StrongIrreducibility(True, kappa)


def path_condition(graph, spec=None):
    """Every coordinate is reachable from every choice of one vertex per block.

    True iff for each target ``(v, l)`` and each ``(j_1, ..., j_d)`` some
    ``(i, j_i)`` has a directed path to ``(v, l)``.  The condition fails
    exactly when some target has, in every block, a vertex that cannot
    reach it, so no enumeration over choices is needed.

    Parameters
    ----------
    graph : StructureGraph or array_like
        A raw adjacency matrix needs ``spec`` (or anything with a
        ``block_dims`` attribute) to supply the block sizes.
    """
    if not isinstance(graph, StructureGraph):
        if spec is None:
            raise ValueError("block sizes are required for a bare adjacency matrix")
        graph = StructureGraph(spec.block_dims, graph)
    n = graph.adjacency.shape[0]
    reach = graph.adjacency | np.eye(n, dtype=bool)
    power = 1
    while power < n:
        reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
        power *= 2
    offs = graph.offsets
    for target in range(n):
        if all(
            not np.all(reach[offs[i] : offs[i + 1], target])
            for i in range(len(graph.block_dims))
        ):
            return False
    return True


def _jacobian_fd(spec, u, step=1e-6):
    flat = np.concatenate(u)
    n = flat.size
    offs = np.concatenate([[0], np.cumsum(spec.block_dims)])
    J = np.empty((n, n))

    def split(v):
        return [v[offs[i] : offs[i + 1]] for i in range(spec.d)]

    for c in range(n):
        h = min(step, 0.5 * flat[c])
        up, dn = flat.copy(), flat.copy()
        up[c] += h
        dn[c] -= h
        J[:, c] = (np.concatenate(eval_R(spec, split(up))) - np.concatenate(eval_R(spec, split(dn)))) / (2 * h)
    return J


def uniqueness_certificate(spec, u, lam, residual_tol=1e-8, step=1e-6, rel_tol=1e-6):
    """Numerical dimension of ``ker(I - L)`` at a positive eigenpair.

    ``L`` is the Jacobian of the map at ``u`` with row block ``i`` divided
    by ``lam^(p_i' - 1)``.  Dimension one certifies that ``u`` is the only
    positive eigenvector.

    Raises
    ------
    ResidualError
        If ``u`` is not positive or not an eigenvector to ``residual_tol``.
    """
    u = check_block_vector(spec, u)
    if not all(np.all(ui > 0) for ui in u):
        raise ResidualError("eigenvector must be strictly positive")
    if not lam > 0:
        raise ResidualError("eigenvalue must be positive")
    scales = [lam ** (c - 1.0) for c in spec.conjugates]
    Ru = eval_R(spec, u)
    res = max(float(np.max(np.abs(r - s * x))) for r, s, x in zip(Ru, scales, u))
    if res > residual_tol:
        raise ResidualError(f"eigen-residual {res:.3g} exceeds {residual_tol:g}")
    J = _jacobian_fd(spec, u, step)
    row_scale = np.concatenate([np.full(n, 1.0 / s) for n, s in zip(spec.block_dims, scales)])
    L = J * row_scale[:, None]
    sv = np.linalg.svd(np.eye(L.shape[0]) - L, compute_uv=False)
    thresh = rel_tol * max(np.linalg.norm(L, 2), 1.0)
    return int(np.sum(sv <= thresh))


@dataclass
class DiagnosticsReport:
    r_at_ones_positive: bool
    weakly_irreducible: bool
    weakly_primitive: bool
    strongly_irreducible: bool | None
    kappa: int | None
    path_condition: bool
    uniqueness_kernel_dim: int | None = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "r_at_ones_positive": self.r_at_ones_positive,
            "weakly_irreducible": self.weakly_irreducible,
            "weakly_primitive": self.weakly_primitive,
            "strongly_irreducible": self.strongly_irreducible,
            "kappa": self.kappa,
            "path_condition": self.path_condition,
            "uniqueness_kernel_dim": self.uniqueness_kernel_dim,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def diagnose(spec, cap=ENUMERATION_CAP):
    """Run every structural test that does not need an eigenpair."""
    graph = jacobian_pattern_at_ones(spec)
    positive = r_at_ones_positive(spec)
    weak = is_irreducible_matrix(graph.adjacency)
    prim = is_primitive_matrix(graph.adjacency)
    strong = strong_irreducibility(spec, cap)
    notes = [
        "the zero-limit graph coincides with the Jacobian pattern for tensor maps "
        "and is not built separately"
    ]
    if strong.note:
        notes.append(strong.note)
    if strong.value and not weak or weak and not positive:
        notes.append("implication chain strong => weak => R(1) > 0 violated")
    return DiagnosticsReport(
        r_at_ones_positive=positive,
        weakly_irreducible=weak,
        weakly_primitive=prim,
        strongly_irreducible=strong.value,
        kappa=strong.kappa,
        path_condition=path_condition(graph),
        notes=notes,
    )
