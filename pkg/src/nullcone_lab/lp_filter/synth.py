"""Random metric synthesis with prescribed spectral regularity.

The perturbation is a sparse sum of integer-frequency waves (so the result is
2 pi periodic), with per-shell amplitudes calibrated so the dyadic shell
energy of the gradient falls off like mu^(-2 gamma).  Each mode travels at
unit speed (temporal frequency = |k|), which keeps time derivatives in the
same class.
"""

from __future__ import annotations

import numpy as np

from ..errors import NotLorentzianError
from ..spacetime.providers import TrigMetric
from .cutoff import dyadic_range

__all__ = ["synthesize_rough_metric", "shell_gradient_energies", "fit_loglog_slope"]


def _shell_lattice(mu, rng, max_modes):
    """Sample integer wave vectors with mu/2 < |k| <= mu."""
    kmax = int(np.ceil(mu))
    axis = np.arange(-kmax, kmax + 1)
    kx, ky, kz = np.meshgrid(axis, axis, axis, indexing="ij")
    k = np.stack([kx.ravel(), ky.ravel(), kz.ravel()], axis=1)
    mag = np.linalg.norm(k, axis=1)
    sel = k[(mag > mu / 2.0) & (mag <= mu)]
    if len(sel) == 0:
        return sel
    if len(sel) > max_modes:
        idx = rng.choice(len(sel), size=max_modes, replace=False)
        sel = sel[np.sort(idx)]
    return sel


def synthesize_rough_metric(
    gamma=1.0,
    amplitude=1e-2,
    seed=7,
    shells_max=64,
    modes_per_shell=20,
    check_signature=True,
):
    """Minkowski plus a random wave sum with shell amplitudes ~ |k|^-(5/2+gamma)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    rng = np.random.default_rng(int(seed))
    kvecs, amps, patterns, phases = [], [], [], []
    for mu in dyadic_range(1.0, float(shells_max)):
        sel = _shell_lattice(mu, rng, modes_per_shell)
        if len(sel) == 0:
            continue
        nk = len(sel)
        for k in sel:
            mag = float(np.linalg.norm(k))
            # calibrated so the shell L2 energy matches the dense |k| power law
            amp = amplitude * mag ** (-(1.0 + gamma)) / np.sqrt(nk)
            sym = rng.normal(size=(4, 4))
            sym = (sym + sym.T) / 2.0
            sym /= np.linalg.norm(sym)
            om = mag * rng.choice([-1.0, 1.0])
            kvecs.append([om, float(k[0]), float(k[1]), float(k[2])])
            amps.append(amp)
            patterns.append(sym)
            phases.append(rng.uniform(0.0, 2.0 * np.pi))
    prov = TrigMetric(
        np.array(kvecs), np.array(amps), np.array(patterns), np.array(phases),
        name=f"synthetic_g{gamma:g}_s{seed}",
    )
    if check_signature:
        ax = np.linspace(0.0, 2.0 * np.pi, 7)[:-1]
        tt, xx, yy, zz = np.meshgrid(np.linspace(0.0, 1.0, 4), ax, ax, ax, indexing="ij")
        pts = np.stack([tt, xx, yy, zz], axis=-1).reshape(-1, 4)
        H = prov.values(pts)
        w = np.linalg.eigvalsh(H)
        if not (np.all(w[:, 0] < 0) and np.all(w[:, 1:] > 0)):
            raise NotLorentzianError("amplitude too large: Lorentzian signature lost")
    return prov


def shell_gradient_energies(prov: TrigMetric, shells):
    """Dyadic shell energies of the metric gradient, sum over components.

    For a trig-polynomial metric the shell energy is exact:
    E_mu = sum_{k in shell} 1/2 a_k^2 |k|^2 |P_k|_F^2 (spatial |k|).
    """
    mags = np.linalg.norm(prov.kvecs[:, 1:], axis=1)
    full = np.einsum("mab,mab->m", prov.patterns, prov.patterns)
    weights = 0.5 * prov.amps**2 * mags**2 * full
    out = []
    for mu in shells:
        sel = (mags > mu / 2.0) & (mags <= mu)
        out.append(float(np.sum(weights[sel])))
    return np.array(out)


def fit_loglog_slope(x, y):
    """Least-squares slope of log2 y against log2 x, with a 95% CI half-width."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y > 0
    if keep.sum() < 2:
        raise ValueError("need at least two positive samples to fit a slope")
    lx, ly = np.log2(x[keep]), np.log2(y[keep])
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    slope = float(coef[0])
    npts = len(lx)
    if npts > 2 and res.size:
        s2 = float(res[0]) / (npts - 2)
        var = s2 / float(np.sum((lx - lx.mean()) ** 2))
        ci = 1.96 * np.sqrt(var)
    else:
        ci = 0.0
    return slope, ci
