"""Discrete Hardy-Littlewood maximal function on a time interval."""

from __future__ import annotations

import numpy as np

__all__ = ["maximal_function", "maximal_function_bruteforce"]


def _cumtrapz(f, t):
    out = np.zeros_like(f, dtype=float)
    out[1:] = np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))
    return out


def maximal_function(f, t):
    """M(f)(t_i) = max over knots t0 != t_i of |int_{t0}^{t_i} f| / |t_i - t0|.

    Window averages use the trapezoid rule; the point value itself is a
    window limit, so M(f) >= f at every knot for continuous samples.
    """
    f = np.asarray(f, dtype=float)
    t = np.asarray(t, dtype=float)
    cum = _cumtrapz(f, t)
    num = np.abs(cum[:, None] - cum[None, :])
    den = np.abs(t[:, None] - t[None, :])
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = num / den
    np.fill_diagonal(ratios, 0.0)
    out = np.max(ratios, axis=1)
    return np.maximum(out, f)


def maximal_function_bruteforce(f, t):
    """Reference O(N^2) loop implementation (oracle)."""
    f = np.asarray(f, dtype=float)
    t = np.asarray(t, dtype=float)
    n = len(t)
    out = np.zeros(n)
    for i in range(n):
        best = f[i]
        for j in range(n):
            if j == i:
                continue
            lo, hi = min(i, j), max(i, j)
            integral = 0.0
            for k in range(lo, hi):
                integral += 0.5 * (f[k] + f[k + 1]) * (t[k + 1] - t[k])
            best = max(best, abs(integral) / abs(t[i] - t[j]))
        out[i] = best
    return out
