"""Pointwise deviation budget Theta and its norms."""

from __future__ import annotations

import numpy as np

from .direct import grad_metric_norm
from .fields import ThetaField

__all__ = ["theta_field", "theta_lq_norm", "theta_lq_norm_sorted", "l2t_linf_norm"]


def theta_field(sec, coeffs, mu_slash=None) -> ThetaField:
    """Assemble the deviation budget from coefficients on a section."""
    return ThetaField(
        expansion_vs_r=coeffs.trchi - 2.0 / sec.radius,
        expansion_vs_s=coeffs.trchi - 2.0 / sec.s,
        shear_mag=np.sqrt(np.sum(coeffs.shear**2, axis=(-2, -1))),
        torsion_mag=np.sqrt(np.sum(coeffs.torsion**2, axis=-1)),
        grad_metric=grad_metric_norm(sec),
        mu_slash_mag=(
            np.sqrt(np.sum(mu_slash**2, axis=-1)) if mu_slash is not None else None
        ),
    )


def theta_lq_norm(sec, theta_total, q=2.5):
    """L^q(S) norm by direct quadrature."""
    return float(sec.quad(np.abs(theta_total) ** q)) ** (1.0 / q)


def theta_lq_norm_sorted(sec, theta_total, q=2.5):
    """Same norm accumulated over nodes sorted by magnitude (dual oracle)."""
    vals = (np.abs(theta_total) ** q * sec.quad_weight).ravel()
    order = np.argsort(vals)
    return float(np.sum(vals[order])) ** (1.0 / q)


def l2t_linf_norm(times, sups):
    """L^2 in t of per-time sup values, trapezoid rule."""
    times = np.asarray(times, dtype=float)
    sups = np.asarray(sups, dtype=float)
    return float(np.sqrt(np.trapezoid(sups**2, times)))
