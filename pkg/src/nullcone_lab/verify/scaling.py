"""Scaling-exponent sweeps over the dyadic regularization parameter.

Norms of the low-passed, parabolically rescaled family are measured on
sample grids (and optionally on cone sections) for each dyadic value, then
fitted in log2-log2.  Theory slopes are recorded next to the fits; the
smallness offset in the theory exponents is itself unspecified, so the fits
bracket a family of slopes rather than a single number.
"""

from __future__ import annotations

import numpy as np

from ..lp_filter.microlocal import microlocalize
from ..lp_filter.synth import fit_loglog_slope
from ..spacetime.jet import coordinate_grad_norm, curvature
from .report import ScalingFit

__all__ = ["scaling_study", "sample_points"]


def sample_points(lam, n_x=12, n_t=9, t_end=1.0, box=None):
    """Deterministic sample grid in the rescaled variables."""
    box = 2.0 * np.pi * lam if box is None else box
    ax = (np.arange(n_x) + 0.31) * (box / n_x)
    tt = np.linspace(0.0, t_end, n_t)
    T, X, Y, Z = np.meshgrid(tt, ax, ax, ax, indexing="ij")
    return np.stack([T, X, Y, Z], axis=-1)


def scaling_study(g, lams, t_end=1.0, n_x=12, n_t=9, include_hessian=True,
                  include_ricci=True):
    """Measure norm families of H_lam over the dyadic list and fit slopes.

    Returns a list of ScalingFit.  Requires at least four dyadic values.
    """
    lams = sorted(float(l) for l in lams)
    if len(lams) < 4:
        raise ValueError("need at least 4 dyadic values to fit a slope")
    sup_dH, l2t_dH, sup_d2H, l1t_ric = [], [], [], []
    for lam in lams:
        fam = microlocalize(g, lam)
        prov = fam.provider()
        pts = sample_points(lam, n_x=n_x, n_t=n_t, t_end=t_end)
        jet = prov.jet(pts)
        dh = coordinate_grad_norm(jet.dH)           # (n_t, nx, nx, nx)
        per_t = np.max(dh.reshape(dh.shape[0], -1), axis=1)
        sup_dH.append(float(np.max(per_t)))
        l2t_dH.append(float(np.sqrt(np.trapezoid(per_t**2, np.linspace(0, t_end, n_t)))))
        if include_hessian:
            d2 = np.max(np.abs(jet.d2H), axis=(-4, -3, -2, -1))
            sup_d2H.append(float(np.max(d2)))
        if include_ricci:
            cv = curvature(jet)
            ric = np.max(np.abs(cv.ric), axis=(-2, -1))
            per_t_r = np.max(ric.reshape(ric.shape[0], -1), axis=1)
            l1t_ric.append(float(np.trapezoid(per_t_r, np.linspace(0, t_end, n_t))))

    fits = []

    def add(name, vals, theory):
        arr = np.asarray(vals)
        if np.all(arr == 0.0):
            fits.append(ScalingFit(name, lams, list(vals), np.nan, np.nan, theory))
            return
        slope, ci = fit_loglog_slope(lams, arr)
        fits.append(ScalingFit(name, lams, list(vals), slope, ci, theory))

    add("grad_linf_t_linf_x", sup_dH, -0.5)
    add("grad_l2_t_linf_x", l2t_dH, -0.5)
    if include_hessian:
        add("hessian_linf", sup_d2H, -0.5)
    if include_ricci:
        add("ricci_l1_t_linf_x", l1t_ric, -1.0)
    return fits
