"""Tensor text files and deterministic JSON reports.

Tensor files look like::

    # comment
    tensor 3 2 2 2
    1 1 1 0.5
    2 1 2 1.25

The header gives the order and mode sizes; each further line holds one
1-based multi-index and a nonnegative value.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .tensor import NonnegTensor


class TensorFileError(ValueError):
    """Malformed tensor file."""


def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_tensor(text):
    """Parse tensor-file text into a :class:`NonnegTensor`."""
    lines = [(n, _strip(raw)) for n, raw in enumerate(text.splitlines(), start=1)]
    lines = [(n, s) for n, s in lines if s]
    if not lines:
        raise TensorFileError("empty tensor file")
    lineno, header = lines[0]
    parts = header.split()
    if parts[0] != "tensor" or len(parts) < 2:
        raise TensorFileError(f"line {lineno}: header must start with 'tensor <m>'")
    try:
        m = int(parts[1])
        dims = [int(v) for v in parts[2:]]
    except ValueError:
        raise TensorFileError(f"line {lineno}: malformed header") from None
    if m < 2 or len(dims) != m or any(n <= 0 for n in dims):
        raise TensorFileError(f"line {lineno}: header needs order m >= 2 and m positive sizes")
    seen = set()
    idx, vals = [], []
    for lineno, s in lines[1:]:
        parts = s.split()
        if len(parts) != m + 1:
            raise TensorFileError(f"line {lineno}: expected {m} indices and a value")
        try:
            ix = tuple(int(v) - 1 for v in parts[:m])
            val = float(parts[m])
        except ValueError:
            raise TensorFileError(f"line {lineno}: malformed entry") from None
        if any(not 0 <= j < n for j, n in zip(ix, dims)):
            raise TensorFileError(f"line {lineno}: index out of range")
        if not (math.isfinite(val) and val >= 0):
            raise TensorFileError(f"line {lineno}: value must be finite and nonnegative")
        if ix in seen:
            raise TensorFileError(f"line {lineno}: duplicate index")
        seen.add(ix)
        idx.append(ix)
        vals.append(val)
    return NonnegTensor(dims, np.array(idx, dtype=np.int64).reshape(-1, m), vals)


def read_tensor(path):
    with open(path, encoding="utf-8") as fh:
        return parse_tensor(fh.read())


def format_tensor(tensor):
    lines = ["tensor " + " ".join(str(v) for v in (tensor.order, *tensor.dims))]
    for ix, val in tensor.entries():
        lines.append(" ".join(str(j + 1) for j in ix) + " " + _num(val))
    return "\n".join(lines) + "\n"


def write_tensor(tensor, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_tensor(tensor))


def _num(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = "%.17g" % x
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_json(obj, indent=2):
    """Serialize with every float written to 17 significant digits.

    Key order is preserved, so equal inputs give byte-identical output.
    """
    return _emit(obj, indent, 0) + "\n"


def parse_json(text):
    return json.loads(text)
