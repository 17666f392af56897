"""Residual evaluations of the transport, elliptic and commutation relations.

Every check computes both sides from independently assembled ingredients:
time derivatives come from section-cluster stencils on direct-route fields,
spatial terms from the intrinsic operators, curvature from the metric 2-jet.
Failures surface as report rows, never exceptions.
"""

from __future__ import annotations

import numpy as np

from ..coefficients.direct import direct_coefficients, slice_curvature_pieces
from ..coefficients.mass_aspect import (
    lbar_derivative,
    mass_aspect,
    normal_derivative,
    outgoing_derivative,
    time_derivative,
)
from ..util import ein
from .report import ResidualReport, residual_from_fields

__all__ = [
    "check_transport_eqs",
    "check_elliptic_eqs",
    "check_commutation",
    "check_mu_transport",
]


def _mid(cluster):
    return cluster[len(cluster) // 2]


def check_transport_eqs(fam, u, t, tol=np.inf, source_ablation=None):
    """Residuals of the four outgoing transport equations at (u, t).

    ``source_ablation`` optionally maps term names to scale factors, used by
    the sensitivity tests to verify every right-hand-side term is live.
    """
    tsecs = fam.t_cluster(u, t)
    coeffs = [direct_coefficients(s) for s in tsecs]
    sec = _mid(tsecs)
    c0 = _mid(coeffs)
    n = sec.fol.n
    fc = sec.fcurv
    ab = source_ablation or {}

    out = []
    # null lapse: L(b) = -b kbar_NN
    lhs = time_derivative(tsecs, [c.b for c in coeffs]) / n
    rhs = -sec.b * c0.kbar_nn * ab.get("kbar_b", 1.0)
    out.append(residual_from_fields("transport_null_lapse", sec, lhs, rhs, tol, dt=fam.dt))

    # focusing: L(trchi) + trchi^2/2 = -|shear|^2 - kbar_NN trchi - Ric(L,L)
    shear2 = np.sum(c0.shear**2, axis=(-2, -1))
    lhs = time_derivative(tsecs, [c.trchi for c in coeffs]) / n + 0.5 * c0.trchi**2
    rhs = (
        -shear2 * ab.get("shear2", 1.0)
        - c0.kbar_nn * c0.trchi * ab.get("kbar_trchi", 1.0)
        - fc.ric_ll * ab.get("ric_ll", 1.0)
    )
    out.append(residual_from_fields("transport_expansion", sec, lhs, rhs, tol, dt=fam.dt))

    # shear (trace-free Riccati): D4 shear + trchi shear = -kbar_NN shear - alpha_hat
    dshear = time_derivative(tsecs, [c.shear for c in coeffs]) / n[..., None, None]
    lhs = dshear + c0.trchi[..., None, None] * c0.shear
    rhs = (
        -c0.kbar_nn[..., None, None] * c0.shear * ab.get("kbar_shear", 1.0)
        - fc.alpha_hat() * ab.get("alpha_hat", 1.0)
    )
    out.append(residual_from_fields("transport_shear", sec, lhs, rhs, tol, dt=fam.dt))

    # torsion: D4 eta + trchi/2 eta =
    #          -(kbar_AN + eta) . shear - trchi/2 kbar_AN + beta/2
    deta = time_derivative(tsecs, [c.torsion for c in coeffs]) / n[..., None]
    lhs = deta + 0.5 * c0.trchi[..., None] * c0.torsion
    src = ein("...AB,...B->...A", c0.shear, c0.kbar_an + c0.torsion)
    rhs = (
        -src * ab.get("shear_eta", 1.0)
        - 0.5 * c0.trchi[..., None] * c0.kbar_an * ab.get("trchi_kan", 1.0)
        + 0.5 * fc.beta() * ab.get("beta", 1.0)
    )
    out.append(residual_from_fields("transport_torsion", sec, lhs, rhs, tol, dt=fam.dt))
    return out


def check_elliptic_eqs(sec, coeffs=None, mu=None, tol=np.inf, dt=0.0):
    """Codazzi, div/curl of the torsion, and the Gauss relation on a section."""
    c = coeffs or direct_coefficients(sec)
    fc = sec.fcurv
    out = []

    # Codazzi: (div shear)_A + shear_AB k_BN
    #          = (grad_A trchi + k_AN trchi)/2 - sum_B R(e_B, L, e_A, e_B)
    div_shear = sec.div2(c.shear)
    lhs = div_shear + ein("...AB,...B->...A", c.shear, c.k_an)
    cod = fc.riem_balab()
    rhs = 0.5 * (sec.grad_scalar(c.trchi) + c.k_an * c.trchi[..., None]) - cod
    out.append(residual_from_fields("codazzi_shear", sec, lhs, rhs, tol, dt=dt))

    # div torsion (needs the mass aspect)
    if mu is not None:
        pieces = slice_curvature_pieces(sec)
        kchi = np.sum(
            c.meta["k_ab"] * (c.shear + 0.5 * c.trchi[..., None, None] * np.eye(2)),
            axis=(-2, -1),
        )
        tr_mixed = fc.riem_albl_ab()
        lhs = sec.div1(c.torsion)
        rhs = 0.5 * (
            mu
            - 2.0 * np.sum(c.torsion**2, axis=-1)
            - np.sum(c.shear**2, axis=(-2, -1))
            - 2.0 * kchi
        ) - 0.5 * (tr_mixed[..., 0, 0] + tr_mixed[..., 1, 1])
        out.append(residual_from_fields("div_torsion", sec, lhs, rhs, tol, dt=dt))

    # curl torsion: curl eta = -eps^{AB} (k . shear)_AB
    #               + eps^{AB} R(e_B, L, e_A, Lbar) / 2
    kab = c.meta["k_ab"]
    chihat = c.shear
    eps_kchi = (
        kab[..., 0, 0] * chihat[..., 0, 1] + kab[..., 0, 1] * chihat[..., 1, 1]
        - kab[..., 1, 0] * chihat[..., 0, 0] - kab[..., 1, 1] * chihat[..., 1, 0]
    )
    riem_b4a3 = ein(
        "...rsmn,...Br,...s,...Am,...n->...AB",
        sec.curv.riem, sec.eA, sec.L, sec.eA, sec.Lbar,
    )
    eps_r = riem_b4a3[..., 0, 1] - riem_b4a3[..., 1, 0]
    lhs = sec.curl1(c.torsion)
    rhs = -eps_kchi + 0.5 * eps_r
    out.append(residual_from_fields("curl_torsion", sec, lhs, rhs, tol, dt=dt))

    # Gauss: 2K = shear.shearbar - trchi trchibar / 2 + sum_AB R(eA,eB,eA,eB)
    K = sec.gauss_curvature()
    rabab = fc.riem_abcd()
    riem_sum = np.zeros_like(K)
    for A in range(2):
        for B in range(2):
            riem_sum = riem_sum + rabab[..., A, B, A, B]
    lhs = 2.0 * K
    rhs = (
        np.sum(c.shear * c.shearbar, axis=(-2, -1))
        - 0.5 * c.trchi * c.trchibar
        + riem_sum
    )
    out.append(residual_from_fields("gauss_curvature", sec, lhs, rhs, tol, dt=dt))
    return out


def check_commutation(fam, u, t, ambient_form=None, scalar_fn=None, tol=np.inf):
    """Commutation residuals for a tangential 1-form and for a scalar.

    The 1-form is the tangential projection of an analytic ambient co-vector
    field; the scalar check uses the transversal stencil for the ingoing
    derivative, so it exercises the cross-cone machinery as well.
    """
    if ambient_form is None:
        def ambient_form(X):
            V = np.zeros(X.shape)
            V[..., 1] = 0.4 + 0.3 * X[..., 3]
            V[..., 2] = -0.2 * X[..., 1]
            V[..., 3] = 0.25 + 0.1 * X[..., 2]
            return V
    if scalar_fn is None:
        def scalar_fn(X):
            return X[..., 1]

        def scalar_grad(X):
            g = np.zeros(X.shape)
            g[..., 1] = 1.0
            return g
    else:
        scalar_fn, scalar_grad = scalar_fn

    tsecs = fam.t_cluster(u, t)
    sec = _mid(tsecs)
    coeffs = direct_coefficients(sec)
    n = sec.fol.n
    out = []

    # --- 1-form commutation: grad_B (D4 Pi)_A - D4 (grad_B Pi)_A
    Pis = [s.project1(ambient_form(s.X)) for s in tsecs]
    nabPis = [s.nabla1(p) for s, p in zip(tsecs, Pis)]
    Pi = _mid(Pis)
    d4Pi = time_derivative(tsecs, Pis) / n[..., None]
    d4nabPi = time_derivative(tsecs, nabPis) / n[..., None, None]
    lhs = sec.nabla1(d4Pi) - d4nabPi
    # full null second form chi = shear + trchi/2 delta
    chi = coeffs.shear + 0.5 * coeffs.trchi[..., None, None] * np.eye(2)
    nabPi = sec.nabla1(Pi)
    gradn = sec.grad_scalar(n)
    riem_ca4b = ein(
        "...rsmn,...Cr,...As,...m,...Bn->...BCA",
        sec.curv.riem, sec.eA, sec.eA, sec.L, sec.eA,
    )
    kbar = coeffs.kbar_an
    t1 = ein("...AB,...C,...C->...BA", chi, kbar, Pi)
    t2 = ein("...BC,...A,...C->...BA", chi, kbar, Pi)
    t3 = ein("...BCA,...C->...BA", riem_ca4b, Pi)
    rhs = (
        ein("...BC,...CA->...BA", chi, nabPi)
        - (gradn / n[..., None])[..., :, None] * d4Pi[..., None, :]
        + t1 - t2 + t3
    )
    out.append(
        residual_from_fields("commute_d4_grad_1form", sec, lhs, rhs, tol, dt=fam.dt)
    )

    # --- scalar commutation with the transversal direction
    usecs = fam.u_cluster(u, t)
    fvals_u = [scalar_fn(s.X) for s in usecs]
    f = scalar_fn(sec.X)
    gradf_amb = scalar_grad(sec.X)
    Nf = [
        np.sum((s.L - s.fol.T)[..., 1:] * scalar_grad(s.X)[..., 1:], axis=-1)
        for s in usecs
    ]
    W = [s.to_ambient1(s.grad_scalar(scalar_fn(s.X))) for s in usecs]
    # D_N W on the center section from the u cluster
    mid = len(usecs) // 2
    s0 = usecs[mid]
    us = np.array([s.u for s in usecs])
    du = us[1] - us[0]
    if len(usecs) == 5:
        coef = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * du)
    else:
        coef = np.array([-1.0, 0.0, 1.0]) / (2.0 * du)
    dWdu = sum(cc * w for cc, w in zip(coef, W) if cc != 0.0)
    Y = sum(cc * s.X for cc, s in zip(coef, usecs) if cc != 0.0)
    DYW = dWdu + ein("...rmn,...m,...n->...r", s0.Gamma, Y, W[mid])
    N4 = s0.L - s0.fol.T
    yN = ein("...ab,...a,...b->...", s0.jet.H, Y, N4)
    YA = s0.project1(Y)
    DeAW = s0.cov_d_vector(W[mid])
    DNW = (DYW - ein("...A,...Ar->...r", YA, DeAW)) / yN[..., None]
    lhs_s = s0.project1(DNW) - s0.grad_scalar(Nf[mid])
    c0 = direct_coefficients(s0)
    chibar = c0.shearbar + 0.5 * c0.trchibar[..., None, None] * np.eye(2)
    chi0 = c0.shear + 0.5 * c0.trchi[..., None, None] * np.eye(2)
    rhs_s = (c0.torsion - c0.k_an) * Nf[mid][..., None] - 0.5 * ein(
        "...AB,...B->...A", chi0 - chibar, s0.grad_scalar(f)
    )
    out.append(
        residual_from_fields("commute_normal_grad_scalar", s0, lhs_s, rhs_s, tol,
                             dt=fam.dt)
    )
    return out


def check_mu_transport(fam, u, t, tol=np.inf):
    """Residual of the mass-aspect transport equation at (u, t).

    The equation is assembled from the focusing equation, the mass-aspect
    definition and the frame commutator, so every right-hand-side term is an
    independently computable field:

        L(mu) + trchi mu = 2 (etabar - eta) . grad trchi - Lbar(|shear|^2)
            - Lbar(Ric_LL) + (trchi + 2 zeta)(Ric_LL + |shear|^2)
            + kbar_NN trchi^2 + 2 zeta kbar_NN trchi
            - [Lbar(kbar_NN) + L(zeta)] trchi

    with zeta = k_NN + N(n)/n.  The ingoing derivative of
    Ric(L,L) is evaluated both by transversal differencing and through the
    contracted Bianchi identity; the report carries their difference.
    """
    def trchi_of(s):
        return direct_coefficients(s).trchi

    tsecs = fam.t_cluster(u, t)
    sec = _mid(tsecs)
    mus = []
    for s in tsecs:
        sub_t = fam.t_cluster(u, s.t)
        sub_u = fam.u_cluster(u, s.t)
        mus.append(
            mass_aspect(sub_t, sub_u, [trchi_of(x) for x in sub_t],
                        [trchi_of(x) for x in sub_u])
        )
    mu = mus[len(tsecs) // 2]
    c = direct_coefficients(sec)
    n = sec.fol.n
    fc = sec.fcurv
    pieces = slice_curvature_pieces(sec)
    usecs = fam.u_cluster(u, t)

    lhs = time_derivative(tsecs, mus) / n + c.trchi * mu

    def lbar_of(field_fn):
        ft = [field_fn(s) for s in tsecs]
        fu = [field_fn(s) for s in usecs]
        return lbar_derivative(tsecs, usecs, ft, fu)

    def shear2_of(s):
        cc = direct_coefficients(s)
        return np.sum(cc.shear**2, axis=(-2, -1))

    def kappa_of(s):
        return slice_curvature_pieces(s)["kbar_nn"]

    def zeta_of(s):
        ps = slice_curvature_pieces(s)
        return ps["k_nn"] + ps["N_n"] / s.fol.n

    lbar_shear2 = lbar_of(shear2_of)
    lbar_kappa = lbar_of(kappa_of)
    L_zeta = outgoing_derivative(tsecs, [zeta_of(s) for s in tsecs])

    # ingoing derivative of Ric(L,L): raw route and Bianchi rewrite
    lbar_ric_raw = lbar_of(lambda s: s.fcurv.ric_ll)
    ric_la = fc.ric_la()
    ric_ab = fc.ric_ab()
    chi = c.shear + 0.5 * c.trchi[..., None, None] * np.eye(2)
    L_ricllb = outgoing_derivative(tsecs, [s.fcurv.ric_llb for s in tsecs])
    L_scal = outgoing_derivative(tsecs, [s.fcurv.scalar for s in tsecs])
    lbar_ric_bianchi = (
        -L_ricllb - L_scal
        + 2.0 * np.sum(c.torsion_conj * ric_la, axis=-1)
        + 2.0 * (
            sec.div1(ric_la)
            - np.sum(chi * ric_ab, axis=(-2, -1))
            + np.sum(c.k_an * ric_la, axis=-1)
            - 0.5 * c.trchi * fc.ric_llb
            - 0.5 * c.trchibar * fc.ric_ll
        )
        + 4.0 * np.sum(c.torsion * ric_la, axis=-1)
        + 2.0 * (pieces["k_nn"] + pieces["N_n"] / n) * fc.ric_ll
    )

    zeta = pieces["k_nn"] + pieces["N_n"] / n
    shear2 = np.sum(c.shear**2, axis=(-2, -1))
    grad_trchi = sec.grad_scalar(c.trchi)
    rhs_common = (
        2.0 * np.sum((c.torsion_conj - c.torsion) * grad_trchi, axis=-1)
        - lbar_shear2
        + (c.trchi + 2.0 * zeta) * (fc.ric_ll + shear2)
        + c.kbar_nn * c.trchi**2
        + 2.0 * zeta * c.kbar_nn * c.trchi
        - (lbar_kappa + L_zeta) * c.trchi
    )
    rhs = rhs_common - lbar_ric_bianchi
    rhs_raw = rhs_common - lbar_ric_raw

    rep = residual_from_fields("transport_mass_aspect", sec, lhs, rhs, tol, dt=fam.dt)
    rep.meta["raw_vs_bianchi_sup"] = float(
        np.max(np.abs(lbar_ric_raw - lbar_ric_bianchi))
    )
    rep.meta["raw_residual_sup"] = float(np.max(np.abs(lhs - rhs_raw)))
    return rep
