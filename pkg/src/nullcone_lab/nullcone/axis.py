"""The timelike axis: integral curve of the unit normal T."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..spacetime.jet import foliation_split

__all__ = ["AxisCurve", "integrate_axis"]


@dataclass
class AxisCurve:
    """Samples of the axis position with lapse and shift along it."""

    t: np.ndarray            # (Nt,)
    x: np.ndarray            # (Nt, 3)
    n: np.ndarray            # (Nt,)
    v: np.ndarray            # (Nt, 3) coordinate velocity dx/dt = -shift
    truncated: bool = False
    provider: object = field(default=None, repr=False)

    def position(self, t):
        """Cubic Hermite interpolation of the axis position."""
        t = float(t)
        tk = self.t
        if t < tk[0] - 1e-12 or t > tk[-1] + 1e-12:
            raise ValueError(f"axis not integrated at t={t}")
        i = min(max(int(np.searchsorted(tk, t) - 1), 0), len(tk) - 2)
        h = tk[i + 1] - tk[i]
        u = (t - tk[i]) / h
        h00 = 2 * u**3 - 3 * u**2 + 1
        h10 = u**3 - 2 * u**2 + u
        h01 = -2 * u**3 + 3 * u**2
        h11 = u**3 - u**2
        return (
            h00 * self.x[i]
            + h10 * h * self.v[i]
            + h01 * self.x[i + 1]
            + h11 * h * self.v[i + 1]
        )

    def vertex_point(self, u):
        p = np.empty(4)
        p[0] = u
        p[1:] = self.position(u)
        return p


def integrate_axis(metric, t_range, x0=(0.0, 0.0, 0.0), dt=1e-3) -> AxisCurve:
    """Integrate dx/dt = -shift(t, x) (the axis follows T reparametrized by t)."""
    t0, t1 = float(t_range[0]), float(t_range[1])
    nsteps = max(1, int(round((t1 - t0) / dt)))
    dt = (t1 - t0) / nsteps
    ts = t0 + dt * np.arange(nsteps + 1)

    def vel(t, x):
        p = np.empty(4)
        p[0] = t
        p[1:] = x
        fol = foliation_split(metric.jet(p))
        return -fol.v, fol.n

    xs = np.empty((nsteps + 1, 3))
    ns = np.empty(nsteps + 1)
    vs = np.empty((nsteps + 1, 3))
    x = np.asarray(x0, dtype=float).copy()
    truncated = False
    for i, t in enumerate(ts):
        v, n = vel(t, x)
        xs[i], ns[i], vs[i] = x, n, v
        if i == nsteps:
            break
        k1 = v
        k2, _ = vel(t + dt / 2, x + dt / 2 * k1)
        k3, _ = vel(t + dt / 2, x + dt / 2 * k2)
        k4, _ = vel(t + dt, x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            truncated = True
            xs, ns, vs, ts = xs[: i + 1], ns[: i + 1], vs[: i + 1], ts[: i + 1]
            break
    return AxisCurve(t=ts, x=xs, n=ns, v=vs, truncated=truncated, provider=metric)
