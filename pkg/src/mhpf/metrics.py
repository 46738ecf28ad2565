"""Weighted Hilbert and Thompson metrics on products of open orthants.

Both are evaluated through ``ln x - ln y`` so that iterates with a large
dynamic range do not overflow.  An argument touching the boundary (a zero
coordinate) yields ``inf`` rather than an exception.
"""

import numpy as np


def _log_ratios(b, x, y):
    b = np.asarray(b, dtype=float)
    if len(x) != len(y) or len(x) != b.shape[0]:
        raise ValueError("weights and block vectors must have the same number of blocks")
    if np.any(b <= 0):
        raise ValueError("weights must be positive")
    diffs = []
    for i, (xi, yi) in enumerate(zip(x, y)):
        xi = np.asarray(xi, dtype=float)
        yi = np.asarray(yi, dtype=float)
        if xi.shape != yi.shape:
            raise ValueError(f"block {i} shapes differ: {xi.shape} vs {yi.shape}")
        if np.any(xi < 0) or np.any(yi < 0):
            raise ValueError("metrics are defined on the nonnegative cone only")
        if np.any(xi == 0) or np.any(yi == 0):
            return b, None
        diffs.append(np.log(xi) - np.log(yi))
    return b, diffs


def hilbert_metric(b, x, y):
    """``sum_i b_i ln(max_j x_ij/y_ij * max_l y_il/x_il)``.

    Invariant under positive rescaling of each block of either argument.

    Examples
    --------
    >>> import numpy as np
    >>> round(hilbert_metric([1.0], [np.array([1.0, 2.0])], [np.array([2.0, 2.0])]), 12)
    0.69314718056
    """
    b, diffs = _log_ratios(b, x, y)
    if diffs is None:
        return np.inf
    return float(sum(bi * (np.max(di) - np.min(di)) for bi, di in zip(b, diffs)))


def thompson_metric(b, x, y):
    """``sum_i b_i max_j |ln x_ij - ln y_ij|``."""
    b, diffs = _log_ratios(b, x, y)
    if diffs is None:
        return np.inf
    return float(sum(bi * np.max(np.abs(di)) for bi, di in zip(b, diffs)))
