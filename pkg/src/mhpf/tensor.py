"""Nonnegative tensors, their mode contractions and multilinear form.

Tensors with at most :data:`DENSE_LIMIT` elements are contracted through a
dense array; larger ones through their sorted coordinate (COO) list.  Mode
indices are zero-based throughout the Python API.
"""

from __future__ import annotations

import string

import numpy as np

from .exceptions import DimensionError

DENSE_LIMIT = 4096


class NonnegTensor:
    """Immutable order-``m`` tensor with finite nonnegative entries.

    Parameters
    ----------
    dims : sequence of int
        Mode sizes ``n_1, ..., n_m`` with ``m >= 2``.
    indices : array_like of int, shape (nnz, m)
        Zero-based multi-indices of the stored entries.
    values : array_like of float, shape (nnz,)
        Entry values, all finite and ``>= 0``.

    Notes
    -----
    Entries are kept sorted lexicographically by multi-index, and explicit
    zeros are dropped, so contractions accumulate in a fixed order.
    """

    __slots__ = ("_dims", "_indices", "_values", "_dense")

    def __init__(self, dims, indices, values):
        dims = tuple(int(n) for n in dims)
        if len(dims) < 2:
            raise DimensionError("tensor order must be at least 2")
        if any(n <= 0 for n in dims):
            raise DimensionError(f"mode sizes must be positive, got {dims}")
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, len(dims))
        values = np.asarray(values, dtype=float).reshape(-1)
        if indices.shape[0] != values.shape[0]:
            raise DimensionError("indices and values have different lengths")
        if not np.all(np.isfinite(values)):
            raise ValueError("tensor entries must be finite")
        if np.any(values < 0):
            raise ValueError("tensor entries must be nonnegative")
        if indices.size and (np.any(indices < 0) or np.any(indices >= np.array(dims))):
            raise DimensionError("multi-index out of range")

        order = np.lexsort(indices.T[::-1]) if indices.shape[0] else np.arange(0)
        indices = indices[order]
        values = values[order]
        if indices.shape[0] > 1 and np.any(np.all(indices[1:] == indices[:-1], axis=1)):
            raise ValueError("duplicate multi-index")
        keep = values > 0
        self._dims = dims
        self._indices = indices[keep]
        self._values = values[keep]
        self._indices.setflags(write=False)
        self._values.setflags(write=False)

        self._dense = None
        if int(np.prod(dims)) <= DENSE_LIMIT:
            dense = np.zeros(dims)
            dense[tuple(self._indices.T)] = self._values
            dense.setflags(write=False)
            self._dense = dense

    @classmethod
    def from_dense(cls, array):
        """Build a tensor from a dense nonnegative array."""
        array = np.asarray(array, dtype=float)
        if array.ndim < 2:
            raise DimensionError("tensor order must be at least 2")
        if not np.all(np.isfinite(array)):
            raise ValueError("tensor entries must be finite")
        idx = np.argwhere(array != 0)
        return cls(array.shape, idx, array[tuple(idx.T)])

    @classmethod
    def from_entries(cls, dims, entries):
        """Build a tensor from ``(multi_index, value)`` pairs."""
        entries = list(entries)
        if not entries:
            return cls(dims, np.zeros((0, len(dims)), dtype=np.int64), [])
        idx = [tuple(e[0]) for e in entries]
        vals = [e[1] for e in entries]
        return cls(dims, idx, vals)

    @property
    def order(self):
        return len(self._dims)

    @property
    def dims(self):
        return self._dims

    @property
    def nnz(self):
        return self._values.shape[0]

    @property
    def indices(self):
        """Sorted zero-based multi-indices of nonzero entries, shape (nnz, m)."""
        return self._indices

    @property
    def values(self):
        return self._values

    @property
    def is_dense(self):
        return self._dense is not None

    def to_dense(self):
        if self._dense is not None:
            return self._dense.copy()
        dense = np.zeros(self._dims)
        dense[tuple(self._indices.T)] = self._values
        return dense

    def entries(self):
        """Iterate over ``(multi_index, value)`` in sorted order."""
        for idx, val in zip(self._indices, self._values):
            yield tuple(int(i) for i in idx), float(val)

    def __eq__(self, other):
        if not isinstance(other, NonnegTensor):
            return NotImplemented
        return (
            self._dims == other._dims
            and np.array_equal(self._indices, other._indices)
            and np.array_equal(self._values, other._values)
        )

    def __hash__(self):
        return hash((self._dims, self._indices.tobytes(), self._values.tobytes()))

    def __repr__(self):
        return f"NonnegTensor(dims={self._dims}, nnz={self.nnz})"


def _check_vectors(tensor, ys, skip=None):
    if len(ys) != tensor.order:
        raise DimensionError(f"expected {tensor.order} vectors, got {len(ys)}")
    out = []
    for k, (y, n) in enumerate(zip(ys, tensor.dims)):
        if k == skip:
            out.append(None)
            continue
        y = np.asarray(y, dtype=float)
        if y.shape != (n,):
            raise DimensionError(f"vector {k} has shape {y.shape}, expected ({n},)")
        if not np.all(np.isfinite(y)):
            raise ValueError(f"vector {k} has non-finite entries")
        out.append(y)
    return out


def contract_mode(tensor, i, ys):
    """Contract every mode except ``i`` against the given vectors.

    Parameters
    ----------
    tensor : NonnegTensor
    i : int
        Zero-based free mode.
    ys : sequence of array_like
        One vector per mode; the entry at position ``i`` is ignored and may
        be ``None``.

    Returns
    -------
    numpy.ndarray of shape (n_i,)
        Entry ``j`` is the sum over all other indices of
        ``t[j_1, ..., j, ..., j_m] * prod_{k != i} ys[k][j_k]``.
    """
    m = tensor.order
    if not 0 <= i < m:
        raise DimensionError(f"mode {i} out of range for order {m}")
    ys = _check_vectors(tensor, ys, skip=i)
    if tensor.is_dense:
        letters = string.ascii_letters[:m]
        operands = [tensor._dense]
        subs = [letters]
        for k in range(m):
            if k != i:
                operands.append(ys[k])
                subs.append(letters[k])
        return np.einsum(",".join(subs) + "->" + letters[i], *operands)
    prod = tensor.values.copy()
    for k in range(m):
        if k != i:
            prod *= ys[k][tensor.indices[:, k]]
    return np.bincount(tensor.indices[:, i], weights=prod, minlength=tensor.dims[i])


def multilinear_form(tensor, ys):
    """Evaluate ``sum t[j_1..j_m] y_1[j_1] ... y_m[j_m]``."""
    ys = _check_vectors(tensor, ys)
    m = tensor.order
    if tensor.is_dense:
        letters = string.ascii_letters[:m]
        subs = ",".join([letters] + list(letters))
        return float(np.einsum(subs + "->", tensor._dense, *ys))
    prod = tensor.values.copy()
    for k in range(m):
        prod *= ys[k][tensor.indices[:, k]]
    return float(np.sum(prod))
