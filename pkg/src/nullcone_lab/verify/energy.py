"""Closed energy budget for the scalar wave operator on a cone-bounded region.

For a test field psi, the current P = Q(., T) with Q the field's
energy-momentum tensor satisfies

    div P = (box psi) T(psi) + 1/2 Q^{ab} pi_ab,     pi = deformation of T,

so the flux through the region boundary balances the bulk integral.  The
region is the annulus between two outgoing cones u_outer < u_inner cut by
two time slices: every boundary piece is then an explicit quadrature (the
axis neighborhood, where generators start at a finite offset, never enters).
The reported residual is the budget defect over the largest term.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from ..nullcone.axis import integrate_axis
from ..nullcone.bundle import launch_cone
from ..nullcone.directions import DirectionGrid
from ..surface_calc.section import section
from ..util import ein

__all__ = ["check_energy_flux", "simpson"]


def _eps4():
    e = np.zeros((4, 4, 4, 4))

    def sign(p):
        s = 1
        p = list(p)
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    s = -s
        return s

    for p in permutations(range(4)):
        e[p] = sign(p)
    return e


EPS4 = _eps4()


def simpson(vals, xs):
    vals = np.asarray(vals, dtype=float)
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    if n == 1:
        return float(vals[0])
    if n % 2 == 0:
        return simpson(vals[:-1], xs[:-1]) + 0.5 * (xs[-1] - xs[-2]) * (
            vals[-1] + vals[-2]
        )
    h = xs[1] - xs[0]
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((h / 3.0) * np.sum(w * vals))


def _field_data(sec, psi):
    val, grad, hess = psi(sec.X)
    jet = sec.jet
    box = ein("...ab,...ab->...", jet.Hinv, hess) - ein(
        "...ab,...rab,...r->...", jet.Hinv, sec.Gamma, grad
    )
    return val, grad, box


def _Q(sec, grad):
    H = sec.jet.H
    gup = ein("...ab,...b->...a", sec.jet.Hinv, grad)
    norm2 = np.sum(grad * gup, axis=-1)
    return ein("...a,...b->...ab", grad, grad) - 0.5 * H * norm2[..., None, None]


def _deformation(sec):
    """pi_ab = D_a T_b + D_b T_a for the unit slice normal."""
    n = sec.fol.n
    dn = sec.dn
    jet = sec.jet
    hinv = sec.fol.hinv
    dh = jet.dH[..., 1:, 1:]
    dH0 = jet.dH[..., 0, 1:]
    dhinv = -np.matmul(np.matmul(hinv[..., None, :, :], dh), hinv[..., None, :, :])
    b0 = jet.H[..., 0, 1:]
    dv = np.matmul(dhinv, b0[..., None, :, None])[..., 0] + np.matmul(dH0, hinv)
    dT = np.zeros(sec.X.shape[:-1] + (4, 4))
    dT[..., 0] = -dn / n[..., None] ** 2
    dT[..., 1:] = (
        -dv / n[..., None, None]
        + sec.fol.v[..., None, :] * dn[..., :, None] / n[..., None, None] ** 2
    )
    T = sec.fol.T
    DT = dT + ein("...rgm,...m->...gr", sec.Gamma, T)
    DT_low = ein("...gr,...rb->...gb", DT, sec.jet.H)
    return DT_low + np.swapaxes(DT_low, -1, -2)


def check_energy_flux(provider, u_outer, u_inner, t0, t1, psi, n_theta=12,
                      n_u=17, n_t=17, dt=2e-3, s0=1e-3, axis=None):
    """Evaluate the energy budget on the annulus between two cones."""
    if not (u_outer < u_inner < t0 < t1):
        raise ValueError("need u_outer < u_inner < t0 < t1")
    grid = DirectionGrid(n_theta)
    if axis is None:
        axis = integrate_axis(provider, (min(0.0, u_outer), t1 + 2 * dt),
                              dt=max(dt, 1e-3))
    tq = np.linspace(t0, t1, n_t)
    uq = np.linspace(u_outer, u_inner, n_u)
    cones = {uu: launch_cone(provider, axis, uu, grid, s0=s0, dt=dt, t_end=t1,
                             snapshot_times=list(tq), transport=False)
             for uu in uq}
    secs = {(uu, t): section(cones[uu], t) for uu in uq for t in tq}

    def slice_energy(t):
        vals = []
        for uu in uq:
            sec = secs[(uu, t)]
            _, grad, _ = _field_data(sec, psi)
            Q = _Q(sec, grad)
            P_low = ein("...ab,...b->...a", Q, sec.fol.T)
            P_up = ein("...ab,...b->...a", sec.jet.Hinv, P_low)
            vals.append(sec.quad(sec.fol.n * sec.b * P_up[..., 0]))
        return simpson(vals, uq)

    def cone_flux(uu):
        vals = []
        for t in tq:
            sec = secs[(uu, t)]
            _, grad, _ = _field_data(sec, psi)
            Q = _Q(sec, grad)
            P_low = ein("...ab,...b->...a", Q, sec.fol.T)
            P_up = ein("...ab,...b->...a", sec.jet.Hinv, P_low)
            dtX = sec.fol.n[..., None] * sec.L
            m = ein("abcd,...b,...c,...d->...a", EPS4, dtX, sec.Xth, sec.Xph)
            detH = -np.linalg.det(sec.jet.H)
            m = m * np.sqrt(np.maximum(detH, 0.0))[..., None]
            vals.append(sec.ops.integrate(np.sum(P_up * m, axis=-1)))
        return simpson(vals, tq)

    def bulk():
        vals_t = []
        for t in tq:
            vals_u = []
            for uu in uq:
                sec = secs[(uu, t)]
                _, grad, box = _field_data(sec, psi)
                Q = _Q(sec, grad)
                Tpsi = np.sum(sec.fol.T * grad, axis=-1)
                pi = _deformation(sec)
                Qup = ein("...am,...bn,...mn->...ab", sec.jet.Hinv, sec.jet.Hinv, Q)
                dens = box * Tpsi + 0.5 * np.sum(Qup * pi, axis=(-2, -1))
                vals_u.append(sec.quad(sec.fol.n * sec.b * dens))
            vals_t.append(simpson(vals_u, uq))
        return simpson(vals_t, tq)

    top = slice_energy(t1)
    bottom = slice_energy(t0)
    flux_outer = cone_flux(uq[0])
    flux_inner = cone_flux(uq[-1])
    vol = bulk()
    residual = top - bottom - flux_outer + flux_inner - vol
    scale = max(abs(top), abs(bottom), abs(flux_outer), abs(flux_inner),
                abs(vol), 1e-300)
    return {
        "top": top, "bottom": bottom, "cone_flux": -flux_outer,
        "inner_flux": -flux_inner, "bulk": vol,
        "residual": residual, "relative": residual / scale,
    }
