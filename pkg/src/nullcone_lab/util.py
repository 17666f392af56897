"""Small numerics helpers shared across modules."""

from __future__ import annotations

import functools

import numpy as np

# einsum that factors multi-operand contractions into BLAS-able pairs
ein = functools.partial(np.einsum, optimize=True)


def hermite_weights(w):
    """Cubic Hermite basis values at parameter w in [0, 1]."""
    w2, w3 = w * w, w * w * w
    return 2 * w3 - 3 * w2 + 1, w3 - 2 * w2 + w, -2 * w3 + 3 * w2, w3 - w2


def simpson_cumulative(y, x):
    """Cumulative integral of samples y over knots x (Simpson on uniform pairs)."""
    y = np.asarray(y)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(y, dtype=float)
    for i in range(1, len(x)):
        h = x[i] - x[i - 1]
        if i >= 2 and abs((x[i] - x[i - 1]) - (x[i - 1] - x[i - 2])) < 1e-12 * abs(h):
            out[i] = out[i - 2] + ((x[i] - x[i - 2]) / 6.0) * (
                y[i - 2] + 4.0 * y[i - 1] + y[i]
            )
        else:
            out[i] = out[i - 1] + 0.5 * h * (y[i - 1] + y[i])
    return out
