"""Analytic metric providers with exact coordinate 2-jets.

A provider is any object exposing ``jet(points) -> MetricJet`` for a batch of
points of shape (..., 4).  Analytic providers carry exact derivatives, which
keeps curvature free of differencing noise.  The module also maintains the
named preset catalogue addressable from the CLI.
"""

from __future__ import annotations

import numpy as np

from .jet import MetricJet

MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])


def _sym4(mat):
    m = np.asarray(mat, dtype=float)
    if m.shape != (4, 4) or not np.allclose(m, m.T):
        raise ValueError("pattern must be a symmetric 4x4 matrix")
    return m


class MetricProvider:
    """Base provider: batched jets plus a couple of capability flags."""

    name = "metric"
    is_flat = False          # curvature vanishes identically
    is_constant = False      # metric components independent of the point
    t_domain: tuple[float, float] | None = None

    def jet(self, points) -> MetricJet:
        raise NotImplementedError

    def values(self, points) -> np.ndarray:
        """Metric components only; override when a cheaper path exists."""
        return self.jet(points).H

    def jet_at(self, t, x) -> MetricJet:
        p = np.empty(4)
        p[0] = t
        p[1:] = x
        return self.jet(p)


class Minkowski(MetricProvider):
    name = "minkowski"
    is_flat = True
    is_constant = True

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        base = points.shape[:-1]
        H = np.broadcast_to(MINKOWSKI, base + (4, 4)).copy()
        dH = np.zeros(base + (4, 4, 4))
        d2H = np.zeros(base + (4, 4, 4, 4))
        return MetricJet(H, dH, d2H)


class ConstantMetric(MetricProvider):
    """Arbitrary constant Lorentzian metric; curvature vanishes identically."""

    is_flat = True
    is_constant = True

    def __init__(self, H0, name="constant"):
        self.H0 = _sym4(H0)
        self.name = name

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        base = points.shape[:-1]
        H = np.broadcast_to(self.H0, base + (4, 4)).copy()
        return MetricJet(H, np.zeros(base + (4, 4, 4)), np.zeros(base + (4, 4, 4, 4)))


def rescaled_lapse(n0=2.0):
    """H = -n0^2 dt^2 + delta_ij dx^i dx^j."""
    H0 = np.diag([-float(n0) ** 2, 1.0, 1.0, 1.0])
    return ConstantMetric(H0, name=f"rescaled_lapse_{n0:g}")


class ScalarBumpMetric(MetricProvider):
    """m + sum_b f_b(t, x) P_b for Gaussian bump profiles f_b.

    f(t,x) = amp * exp(-|x-c|^2 / w^2) * (1 + eps * sin(om * t + ph)).
    """

    def __init__(self, bumps, name="gauss_bump"):
        # bumps: list of dicts with keys amp, center(3), width, pattern(4x4),
        # eps, omega, phase
        self.name = name
        self.bumps = []
        for b in bumps:
            self.bumps.append(
                dict(
                    amp=float(b["amp"]),
                    center=np.asarray(b["center"], dtype=float),
                    width=float(b["width"]),
                    pattern=_sym4(b["pattern"]),
                    eps=float(b.get("eps", 0.0)),
                    omega=float(b.get("omega", 0.0)),
                    phase=float(b.get("phase", 0.0)),
                )
            )

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        base = points.shape[:-1]
        H = np.broadcast_to(MINKOWSKI, base + (4, 4)).copy()
        dH = np.zeros(base + (4, 4, 4))
        d2H = np.zeros(base + (4, 4, 4, 4))
        t = points[..., 0]
        x = points[..., 1:]
        for b in self.bumps:
            u = x - b["center"]
            r2 = np.einsum("...i,...i->...", u, u)
            g = np.exp(-r2 / b["width"] ** 2)
            osc = 1.0 + b["eps"] * np.sin(b["omega"] * t + b["phase"])
            dosc = b["eps"] * b["omega"] * np.cos(b["omega"] * t + b["phase"])
            d2osc = -b["eps"] * b["omega"] ** 2 * np.sin(b["omega"] * t + b["phase"])
            # spatial jet of g
            dg = (-2.0 / b["width"] ** 2) * u * g[..., None]
            d2g = (-2.0 / b["width"] ** 2) * (
                np.eye(3) * g[..., None, None]
                + np.einsum("...i,...j->...ij", u, dg)
            )
            f = b["amp"] * g * osc
            df = np.zeros(base + (4,))
            df[..., 0] = b["amp"] * g * dosc
            df[..., 1:] = b["amp"] * dg * osc[..., None]
            d2f = np.zeros(base + (4, 4))
            d2f[..., 0, 0] = b["amp"] * g * d2osc
            d2f[..., 0, 1:] = b["amp"] * dg * dosc[..., None]
            d2f[..., 1:, 0] = d2f[..., 0, 1:]
            d2f[..., 1:, 1:] = b["amp"] * d2g * osc[..., None, None]
            P = b["pattern"]
            H += np.einsum("...,ab->...ab", f, P)
            dH += np.einsum("...g,ab->...gab", df, P)
            d2H += np.einsum("...gd,ab->...gdab", d2f, P)
        return MetricJet(H, dH, d2H)


def gaussian_bump(amp=5e-3, width=1.6, center=(0.35, -0.25, 0.3), t_eps=0.35):
    """The workhorse curved test metric: two offset anisotropic bumps."""
    P1 = np.array(
        [
            [0.9, 0.25, -0.2, 0.1],
            [0.25, 0.6, 0.15, 0.0],
            [-0.2, 0.15, -0.45, 0.1],
            [0.1, 0.0, 0.1, 0.7],
        ]
    )
    P2 = np.array(
        [
            [-0.4, 0.1, 0.2, -0.15],
            [0.1, 0.5, -0.1, 0.2],
            [0.2, -0.1, 0.65, 0.05],
            [-0.15, 0.2, 0.05, -0.3],
        ]
    )
    c = np.asarray(center, dtype=float)
    bumps = [
        dict(amp=amp, center=c, width=width, pattern=P1, eps=t_eps, omega=1.3, phase=0.4),
        dict(amp=0.6 * amp, center=-0.8 * c + 0.1, width=1.2 * width, pattern=P2,
             eps=0.5 * t_eps, omega=0.9, phase=-0.7),
    ]
    return ScalarBumpMetric(bumps, name="gauss_bump")


class StaticLapseMetric(MetricProvider):
    """H = -n(x)^2 dt^2 + delta, with n = 1 + amp * exp(-|x-c|^2/w^2)."""

    name = "static_lapse"

    def __init__(self, amp=0.05, center=(0.4, -0.3, 0.2), width=1.5):
        self.amp = float(amp)
        self.center = np.asarray(center, dtype=float)
        self.width = float(width)

    def lapse(self, x):
        u = np.asarray(x, dtype=float) - self.center
        r2 = np.einsum("...i,...i->...", u, u)
        return 1.0 + self.amp * np.exp(-r2 / self.width**2)

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        base = points.shape[:-1]
        x = points[..., 1:]
        u = x - self.center
        r2 = np.einsum("...i,...i->...", u, u)
        g = np.exp(-r2 / self.width**2)
        n = 1.0 + self.amp * g
        dg = (-2.0 / self.width**2) * u * g[..., None]
        d2g = (-2.0 / self.width**2) * (
            np.eye(3) * g[..., None, None] + np.einsum("...i,...j->...ij", u, dg)
        )
        H = np.broadcast_to(MINKOWSKI, base + (4, 4)).copy()
        dH = np.zeros(base + (4, 4, 4))
        d2H = np.zeros(base + (4, 4, 4, 4))
        H[..., 0, 0] = -(n**2)
        dH[..., 1:, 0, 0] = -2.0 * n[..., None] * self.amp * dg
        d2H[..., 1:, 1:, 0, 0] = -2.0 * self.amp * (
            np.einsum("...i,...j->...ij", dg, dg) * self.amp + n[..., None, None] * d2g
        )
        return MetricJet(H, dH, d2H)


class ConformalQuadratic(MetricProvider):
    """H = exp(2 phi) m with phi = 1/2 x^T q x + p . x (exact jets)."""

    name = "conformal_quadratic"

    def __init__(self, q=None, p=None):
        self.q = _sym4(q) if q is not None else np.zeros((4, 4))
        self.p = np.zeros(4) if p is None else np.asarray(p, dtype=float)

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        base = points.shape[:-1]
        phi = 0.5 * np.einsum("...a,ab,...b->...", points, self.q, points) + points @ self.p
        dphi = np.einsum("ab,...b->...a", self.q, points) + self.p
        e = np.exp(2.0 * phi)
        H = np.einsum("...,ab->...ab", e, MINKOWSKI)
        dH = 2.0 * np.einsum("...g,...ab->...gab", dphi, H)
        d2H = 2.0 * np.einsum("gd,...ab->...gdab", self.q, H) + 4.0 * np.einsum(
            "...g,...d,...ab->...gdab", dphi, dphi, H
        )
        return MetricJet(H, dH, d2H)


class WeakSchwarzschild(MetricProvider):
    """Softened weak-field metric -(1-2M/rho) dt^2 + (1+2M/rho) delta."""

    name = "weak_schwarzschild"

    def __init__(self, mass=0.02, soften=0.6):
        self.mass = float(mass)
        self.soften = float(soften)

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        base = points.shape[:-1]
        x = points[..., 1:]
        rho = np.sqrt(np.einsum("...i,...i->...", x, x) + self.soften**2)
        f = 2.0 * self.mass / rho
        df = -2.0 * self.mass * x / rho[..., None] ** 3
        d2f = 2.0 * self.mass * (
            3.0 * np.einsum("...i,...j->...ij", x, x) / rho[..., None, None] ** 5
            - np.eye(3) / rho[..., None, None] ** 3
        )
        H = np.broadcast_to(MINKOWSKI, base + (4, 4)).copy()
        dH = np.zeros(base + (4, 4, 4))
        d2H = np.zeros(base + (4, 4, 4, 4))
        H[..., 0, 0] = -1.0 + f
        for i in range(3):
            H[..., 1 + i, 1 + i] = 1.0 + f
        dH[..., 1:, 0, 0] = df
        d2H[..., 1:, 1:, 0, 0] = d2f
        for i in range(3):
            dH[..., 1:, 1 + i, 1 + i] = df
            d2H[..., 1:, 1:, 1 + i, 1 + i] = d2f
        return MetricJet(H, dH, d2H)


class TrigMetric(MetricProvider):
    """m + sum_k P_k a_k cos(k . x + phase_k) over a finite mode list.

    ``kvecs`` has shape (M, 4) (the 0 slot is the time frequency), ``amps``
    (M,), ``patterns`` (M, 4, 4) symmetric, ``phases`` (M,).  Exact jets; the
    evaluation cost is linear in the number of modes.
    """

    def __init__(self, kvecs, amps, patterns, phases, name="trig_metric", base=None):
        self.kvecs = np.atleast_2d(np.asarray(kvecs, dtype=float))
        self.amps = np.atleast_1d(np.asarray(amps, dtype=float))
        self.patterns = np.asarray(patterns, dtype=float).reshape(-1, 4, 4)
        self.phases = np.atleast_1d(np.asarray(phases, dtype=float))
        self.base = MINKOWSKI if base is None else _sym4(base)
        self.name = name

    def nmodes(self):
        return len(self.amps)

    def rescaled(self, amp_scale, k_scale, name=None):
        """New provider with amplitudes scaled per mode and k -> k_scale * k."""
        return TrigMetric(
            self.kvecs * k_scale,
            self.amps * amp_scale,
            self.patterns,
            self.phases,
            name=name or self.name,
            base=self.base,
        )

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        base = points.shape[:-1]
        th = np.einsum("...a,ma->...m", points, self.kvecs) + self.phases
        c = np.cos(th) * self.amps
        s = np.sin(th) * self.amps
        H = np.broadcast_to(self.base, base + (4, 4)).copy()
        H += np.einsum("...m,mab->...ab", c, self.patterns)
        dH = -np.einsum("...m,mg,mab->...gab", s, self.kvecs, self.patterns)
        d2H = -np.einsum("...m,mg,md,mab->...gdab", c, self.kvecs, self.kvecs, self.patterns)
        return MetricJet(H, dH, d2H)

    def values(self, points):
        points = np.asarray(points, dtype=float)
        th = np.einsum("...a,ma->...m", points, self.kvecs) + self.phases
        c = np.cos(th) * self.amps
        H = np.broadcast_to(self.base, points.shape[:-1] + (4, 4)).copy()
        H += np.einsum("...m,mab->...ab", c, self.patterns)
        return H


def single_mode(amplitude=1e-3, kvec=(0.0, 3.0, 0.0, 0.0), pattern=None, phase=0.3):
    """One spatial mode; handy for frequency-bookkeeping checks."""
    if pattern is None:
        pattern = np.diag([0.0, 1.0, -0.5, 0.25])
        pattern[0, 1] = pattern[1, 0] = 0.35
    return TrigMetric(
        np.asarray(kvec, dtype=float)[None, :],
        [amplitude],
        [np.asarray(pattern, dtype=float)],
        [phase],
        name="single_mode",
    )


# ---------------------------------------------------------------------------
# preset catalogue

def _make_synthetic(**kw):
    from ..lp_filter.synth import synthesize_rough_metric

    return synthesize_rough_metric(
        gamma=kw.get("gamma", 1.0),
        amplitude=kw.get("amplitude", 1e-2),
        seed=int(kw.get("seed", 7)),
    )


PRESETS = {
    "minkowski": lambda **kw: Minkowski(),
    "rescaled_lapse": lambda **kw: rescaled_lapse(kw.get("n0", 2.0)),
    "gauss_bump": lambda **kw: gaussian_bump(**kw),
    "static_lapse": lambda **kw: StaticLapseMetric(**kw),
    "conformal_quadratic": lambda **kw: ConformalQuadratic(**kw),
    "weak_schwarzschild": lambda **kw: WeakSchwarzschild(**kw),
    "single_mode": lambda **kw: single_mode(**kw),
    "synthetic": _make_synthetic,
}


def get_preset(name, **kwargs) -> MetricProvider:
    if name not in PRESETS:
        raise KeyError(f"unknown metric preset {name!r}; have {sorted(PRESETS)}")
    return PRESETS[name](**kwargs)
