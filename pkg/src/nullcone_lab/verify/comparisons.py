"""Comparison measurements: affine parameter, null lapse, radius, area.

All inequalities here hold with unspecified universal constants, so every
check records the measured constant (LHS scale over the comparison scale)
instead of asserting a bound.  The area bracket 2 pi s^2 <= A <= 8 pi s^2 is
the one hard window asserted by the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coefficients.direct import direct_coefficients, grad_metric_norm
from ..surface_calc.maximal import maximal_function

__all__ = ["ComparisonReport", "check_comparisons"]


@dataclass
class ComparisonReport:
    u: float
    t: float
    area: float
    radius: float
    s_mean: float
    area_bracket_ok: bool
    sntu_constant: float      # |n(t-u) - s| <= C s^2 M(dH)
    lapse_constant: float     # |b - n| <= C s M(dH)
    radius_constant: float    # |r - s| <= C s^2 M^3(sup|trchi - 2/s|)
    transport_constant: float  # |b - b0| <= C s M(sup|b kbar|)
    maxdev: dict

    def __str__(self):
        ok = "ok" if self.area_bracket_ok else "VIOLATED"
        return (
            f"(u={self.u:g}, t={self.t:g}) area bracket {ok}; empirical C: "
            f"affine {self.sntu_constant:.3g}, lapse {self.lapse_constant:.3g}, "
            f"radius {self.radius_constant:.3g}, transport {self.transport_constant:.3g}"
        )


def check_comparisons(fam, u, times):
    """Measure the comparison constants on every requested section of cone u."""
    secs = [fam.section(u, t) for t in times]
    coeffs = [direct_coefficients(s) for s in secs]

    tgrid = np.array(times)
    sup_dh = np.array([float(np.max(grad_metric_norm(s))) for s in secs])
    m_dh = maximal_function(sup_dh, tgrid) if len(times) > 1 else sup_dh
    sup_y = np.array(
        [float(np.max(np.abs(c.trchi - 2.0 / s.s))) for s, c in zip(secs, coeffs)]
    )
    m3_y = sup_y.copy()
    for _ in range(3):
        m3_y = maximal_function(m3_y, tgrid) if len(times) > 1 else m3_y
    sup_bk = np.array(
        [float(np.max(np.abs(s.b * c.kbar_nn))) for s, c in zip(secs, coeffs)]
    )
    m_bk = maximal_function(sup_bk, tgrid) if len(times) > 1 else sup_bk

    out = []
    for i, (s, c) in enumerate(zip(secs, coeffs)):
        smean = float(np.mean(s.s))
        area_ok = bool(
            2.0 * np.pi * smean**2 <= s.area <= 8.0 * np.pi * smean**2
        )
        ntu = s.fol.n * (s.t - s.u)
        dev_affine = float(np.max(np.abs(ntu - s.s)))
        denom = float(np.max(s.s) ** 2) * max(m_dh[i], 1e-300)
        c_affine = dev_affine / denom
        dev_lapse = float(np.max(np.abs(s.b - s.fol.n)))
        c_lapse = dev_lapse / (float(np.max(s.s)) * max(m_dh[i], 1e-300))
        dev_radius = abs(s.radius - smean)
        c_radius = dev_radius / (smean**2 * max(m3_y[i], 1e-300))
        dev_b = float(np.max(np.abs(s.b - fam.cones[u].n_vertex)))
        c_transport = dev_b / (float(np.max(s.s)) * max(m_bk[i], 1e-300))
        out.append(
            ComparisonReport(
                u=u, t=s.t, area=s.area, radius=s.radius, s_mean=smean,
                area_bracket_ok=area_ok, sntu_constant=c_affine,
                lapse_constant=c_lapse, radius_constant=c_radius,
                transport_constant=c_transport,
                maxdev={
                    "affine": dev_affine, "lapse": dev_lapse,
                    "radius": dev_radius, "transport": dev_b,
                    "m_dh": float(m_dh[i]),
                },
            )
        )
    return out
