"""Discretized time sections of a null cone with intrinsic calculus.

A SphereSection carries the embedding of S_{t,u} on the direction grid, the
ambient metric jet at every node, the induced chart metric, the propagated
orthonormal tangent frame and any transported fields.  Frame components of
tangential tensors are differentiated by converting to ambient components
(single-valued across the poles), taking chart derivatives there and
projecting back; the frame itself is never differentiated through a pole.
"""

from __future__ import annotations

import numpy as np

from ..errors import SectionUnavailableError
from ..spacetime.jet import christoffel, foliation_split, lapse_gradient
from ..util import ein
from .grid_ops import SphereOps

__all__ = ["SphereSection", "section", "section_from_embedding"]

CAUSTIC_COND = 1.0e6


class SphereSection:
    def __init__(self, ops: SphereOps, provider, X, L, eA, s, b, u=0.0, t=0.0,
                 extras=None, require_regular=True):
        self.ops = ops
        self.provider = provider
        self.u = float(u)
        self.t = float(t)
        self.X = X
        self.L = L
        self.eA = eA
        self.s = s
        self.b = b
        self.extras = extras or {}

        self.jet = provider.jet(X)
        self.fol = foliation_split(self.jet, validate=False)
        self.dn = lapse_gradient(self.jet, self.fol)
        self.C, self.Gamma = christoffel(self.jet)
        self.Lbar = 2.0 * self.fol.T - L

        # chart tangents and induced metric
        self.Xth = np.stack([ops.dtheta(X[..., m]) for m in range(4)], axis=-1)
        self.Xph = np.stack([ops.dphi(X[..., m]) for m in range(4)], axis=-1)
        H = self.jet.H
        g11 = ein("...ab,...a,...b->...", H, self.Xth, self.Xth)
        g12 = ein("...ab,...a,...b->...", H, self.Xth, self.Xph)
        g22 = ein("...ab,...a,...b->...", H, self.Xph, self.Xph)
        self.gamma_chart = np.stack(
            [np.stack([g11, g12], axis=-1), np.stack([g12, g22], axis=-1)], axis=-2
        )
        det = g11 * g22 - g12**2
        tr = g11 + g22
        disc = np.sqrt(np.maximum(tr**2 - 4.0 * det, 0.0))
        lam_max = 0.5 * (tr + disc)
        lam_min = 0.5 * (tr - disc)
        self.caustic = bool(
            np.any(det <= 0.0) or np.any(lam_max > CAUSTIC_COND * np.maximum(lam_min, 0.0))
        )
        if require_regular and self.caustic:
            raise SectionUnavailableError(
                f"section unavailable at t={t}: degenerate induced metric (caustic)"
            )
        self.sqrtg = np.sqrt(np.maximum(det, 0.0))
        self.gamma_inv = np.empty_like(self.gamma_chart)
        self.gamma_inv[..., 0, 0] = g22
        self.gamma_inv[..., 1, 1] = g11
        self.gamma_inv[..., 0, 1] = -g12
        self.gamma_inv[..., 1, 0] = -g12
        self.gamma_inv /= np.maximum(det, 1e-300)[..., None, None]

        # frame -> chart coefficients: e_A = cA[A, a] d_a X
        mA = np.stack(
            [
                ein("...ab,...Aa,...b->...A", H, eA, self.Xth),
                ein("...ab,...Aa,...b->...A", H, eA, self.Xph),
            ],
            axis=-1,
        )
        self.cA = ein("...ab,...Ab->...Aa", self.gamma_inv, mA)
        self.eA_low = ein("...ab,...Ab->...Aa", H, eA)

        self.area = float(ops.integrate(self.sqrtg))
        self.radius = float(np.sqrt(self.area / (4.0 * np.pi)))
        # per-node quadrature weight: quad(f) == sum(f * quad_weight)
        self.quad_weight = (
            self.sqrtg * ops._theta_weights[:, None] * (2.0 * np.pi / ops.n_phi)
        )

    @property
    def nlapse(self):
        return self.fol.n

    @property
    def curv(self):
        if not hasattr(self, "_curv"):
            from ..spacetime.jet import curvature

            self._curv = curvature(self.jet)
        return self._curv

    @property
    def fcurv(self):
        if not hasattr(self, "_fcurv"):
            from ..spacetime.jet import frame_curvature

            self._fcurv = frame_curvature(self.curv, self.L, self.Lbar, self.eA)
        return self._fcurv

    # -- quadrature ------------------------------------------------------
    def quad(self, f):
        """Integral of a node field over the section (area measure)."""
        return self.ops.integrate(f * self.sqrtg)

    def average(self, f):
        return self.quad(f) / (4.0 * np.pi * self.radius**2)

    def lq_norm(self, f, q):
        return float(self.quad(np.abs(f) ** q)) ** (1.0 / q)

    # -- derivatives -----------------------------------------------------
    def chart_derivs(self, f, parity=1):
        return self.ops.dtheta(f, parity=parity), self.ops.dphi(f)

    def frame_d(self, f, parity=1):
        """e_A(f) for a chart-scalar field f; returns (..., 2)."""
        dth, dph = self.chart_derivs(f, parity)
        return self.cA[..., 0] * dth[..., None] + self.cA[..., 1] * dph[..., None]

    def grad_scalar(self, f):
        """Tangential gradient in frame components."""
        return self.frame_d(f)

    def to_ambient1(self, xi):
        return ein("...A,...Am->...m", xi, self.eA)

    def to_ambient2(self, T):
        return ein("...AB,...Am,...Bn->...mn", T, self.eA, self.eA)

    def project1(self, vec):
        """Ambient vector -> tangential frame components."""
        return ein("...a,...Aa->...A", vec, self.eA_low)

    def directional_ambient(self, F):
        """e_A(F^c) componentwise for a trailing-component field F (..., C).

        Returns (..., A, C); the single batched stencil/FFT call per axis is
        what keeps the Hodge solves cheap.
        """
        dth = self.ops.dtheta(F)
        dph = self.ops.dphi(F)
        return (
            self.cA[..., 0][..., :, None] * dth[..., None, :]
            + self.cA[..., 1][..., :, None] * dph[..., None, :]
        )

    def directional_ambient_T(self, W):
        """Exact transpose of directional_ambient: (..., A, C) -> (..., C)."""
        a0 = np.sum(self.cA[..., 0][..., :, None] * W, axis=-2)
        a1 = np.sum(self.cA[..., 1][..., :, None] * W, axis=-2)
        return self.ops.dtheta_T(a0) - self.ops.dphi(a1)

    def cov_d_vector(self, v):
        """D_{e_A} v for an ambient vector field on the section: (..., A, r)."""
        dv = self.directional_ambient(v)
        return dv + ein("...rmn,...Am,...n->...Ar", self.Gamma, self.eA, v)

    def nabla1(self, xi):
        """Covariant derivative of a tangential 1-form: out[A, B] = nab_A xi_B."""
        v = self.to_ambient1(xi)
        dv = self.directional_ambient(v)
        dv = dv + ein("...rmn,...Am,...n->...Ar", self.Gamma, self.eA, v)
        return ein("...Aa,...Ba->...AB", dv, self.eA_low)

    def nabla2(self, T):
        """Covariant derivative of a tangential 2-tensor: out[A, B, C]."""
        W = self.to_ambient2(T)
        dW = self.directional_ambient(W.reshape(W.shape[:-2] + (16,)))
        dW = dW.reshape(dW.shape[:-1] + (4, 4))
        dW = dW + ein("...rak,...Aa,...kn->...Arn", self.Gamma, self.eA, W)
        dW = dW + ein("...rak,...Aa,...mk->...Amr", self.Gamma, self.eA, W)
        return ein("...Amn,...Bm,...Cn->...ABC", dW, self.eA_low, self.eA_low)

    # exact discrete transposes (plain dot product), for least-squares solves
    def frame_d_T(self, w, parity=1):
        a0 = np.sum(self.cA[..., 0] * w, axis=-1)
        a1 = np.sum(self.cA[..., 1] * w, axis=-1)
        return self.ops.dtheta_T(a0, parity=parity) - self.ops.dphi(a1)

    def nabla1_T(self, g):
        """Transpose of nabla1: (..., A, B) cotangent -> (..., A) cotangent."""
        dvc = ein("...AB,...Ba->...Aa", g, self.eA_low)
        vc = ein("...Ar,...rmn,...Am->...n", dvc, self.Gamma, self.eA)
        vc += self.directional_ambient_T(dvc)
        return ein("...m,...Am->...A", vc, self.eA)

    def nabla2_T(self, g):
        """Transpose of nabla2: (..., A, B, C) cotangent -> (..., A, B)."""
        dWc = ein("...ABC,...Bm,...Cn->...Amn", g, self.eA_low, self.eA_low)
        Wc = ein("...Arn,...rak,...Aa->...kn", dWc, self.Gamma, self.eA)
        Wc += ein("...Amr,...rak,...Aa->...mk", dWc, self.Gamma, self.eA)
        flat = self.directional_ambient_T(dWc.reshape(dWc.shape[:-2] + (16,)))
        Wc += flat.reshape(Wc.shape)
        return ein("...mn,...Am,...Bn->...AB", Wc, self.eA, self.eA)

    def div1(self, xi):
        nab = self.nabla1(xi)
        return nab[..., 0, 0] + nab[..., 1, 1]

    def curl1(self, xi):
        nab = self.nabla1(xi)
        return nab[..., 0, 1] - nab[..., 1, 0]

    def div2(self, T):
        nab = self.nabla2(T)
        return nab[..., 0, 0, :] + nab[..., 1, 1, :]

    def curl2(self, T):
        nab = self.nabla2(T)
        return nab[..., 0, 1, :] - nab[..., 1, 0, :]

    def laplacian(self, f):
        return self.div1(self.grad_scalar(f))

    def underresolved(self, f, tol=1e-3):
        return self.ops.phi_spectral_tail(f) > tol

    # -- curvature ---------------------------------------------------------
    def gauss_curvature(self):
        """Intrinsic Gauss curvature from the chart metric."""
        g = self.gamma_chart
        ginv = self.gamma_inv
        # chart derivatives with pole parities: theta index flips sign
        par = {(0, 0): 1, (0, 1): -1, (1, 0): -1, (1, 1): 1}
        dg = np.zeros(g.shape[:-2] + (2, 2, 2))  # [c, a, b] = d_c g_ab
        for a in range(2):
            for b in range(2):
                dth, dph = self.chart_derivs(g[..., a, b], parity=par[(a, b)])
                dg[..., 0, a, b] = dth
                dg[..., 1, a, b] = dph
        # Gamma^c_ab = 1/2 g^cd (d_a g_db + d_b g_da - d_d g_ab)
        Cl = 0.5 * (
            np.einsum("...adb->...dab", dg)
            + np.einsum("...bda->...dab", dg)
            - np.einsum("...dab->...dab", dg)
        )
        Gam = ein("...cd,...dab->...cab", ginv, Cl)
        # parity of Gamma^c_ab: (-1)^(number of theta indices)
        gpar = {}
        for c in range(2):
            for a in range(2):
                for b in range(2):
                    gpar[(c, a, b)] = (-1) ** ((c == 0) + (a == 0) + (b == 0))
        # R^t_{p t p} = d_t Gam^t_pp - d_p Gam^t_tp + Gam^t_te Gam^e_pp
        #              - Gam^t_pe Gam^e_tp   (t = theta slot 0, p = phi slot 1)
        dth_Gtpp = self.ops.dtheta(Gam[..., 0, 1, 1], parity=gpar[(0, 1, 1)])
        dph_Gttp = self.ops.dphi(Gam[..., 0, 0, 1])
        quad = (
            Gam[..., 0, 0, 0] * Gam[..., 0, 1, 1]
            + Gam[..., 0, 0, 1] * Gam[..., 1, 1, 1]
            - Gam[..., 0, 1, 0] * Gam[..., 0, 0, 1]
            - Gam[..., 0, 1, 1] * Gam[..., 1, 0, 1]
        )
        Rup = dth_Gtpp - dph_Gttp + quad
        # K = g_{0c} R^c_{101} / det; with R^1_{101} analogous
        det = self.sqrtg**2
        R_low = g[..., 0, 0] * Rup + g[..., 0, 1] * (
            self.ops.dtheta(Gam[..., 1, 1, 1], parity=gpar[(1, 1, 1)])
            - self.ops.dphi(Gam[..., 1, 0, 1])
            + Gam[..., 1, 0, 0] * Gam[..., 0, 1, 1]
            + Gam[..., 1, 0, 1] * Gam[..., 1, 1, 1]
            - Gam[..., 1, 1, 0] * Gam[..., 0, 0, 1]
            - Gam[..., 1, 1, 1] * Gam[..., 1, 0, 1]
        )
        return R_low / det


def section(cone, t, interpolate=False) -> SphereSection:
    """Assemble the S_{t,u} section of a cone at coordinate time t."""
    if cone.truncated_at is not None and t > cone.truncated_at:
        raise SectionUnavailableError(
            f"section unavailable: cone truncated at t={cone.truncated_at}"
        )
    snap = cone.snapshot_at(t, interpolate=interpolate)
    grid = cone.grid
    ops = SphereOps(grid.n_theta)
    uf = grid.unflat
    extras = {"kbar_nn": uf(snap.kbar_nn), "n": uf(snap.n)}
    if snap.trchi_transport is not None:
        extras["trchi_transport"] = uf(snap.trchi_transport)
        extras["shear_transport"] = uf(snap.shear_transport)
        extras["torsion_transport"] = uf(snap.torsion_transport)
    return SphereSection(
        ops, cone.provider, uf(snap.X), uf(snap.L), uf(snap.eA), uf(snap.s),
        uf(snap.b), u=cone.u, t=snap.t, extras=extras,
    )


def section_from_embedding(provider, n_theta, embed, t=0.0, u=0.0, s_field=None):
    """Manufactured section from an analytic embedding (theta, phi) -> x(3).

    Builds the outward normal and a chart-aligned orthonormal tangential
    frame directly from the embedding; useful for operator tests on round or
    distorted spheres without running a cone.
    """
    ops = SphereOps(n_theta)
    th = ops.theta[:, None] * np.ones((1, ops.n_phi))
    ph = np.ones((n_theta, 1)) * ops.phi[None, :]
    x = embed(th, ph)  # (..., 3)
    X = np.zeros(x.shape[:-1] + (4,))
    X[..., 0] = t
    X[..., 1:] = x

    jet = provider.jet(X)
    fol = foliation_split(jet, validate=False)
    Xth = np.stack([ops.dtheta(X[..., m]) for m in range(4)], axis=-1)
    Xph = np.stack([ops.dphi(X[..., m]) for m in range(4)], axis=-1)
    # outward normal within the slice: h-raise of the covector eps_jkl dX^k dX^l
    m_cov = np.cross(Xth[..., 1:], Xph[..., 1:])
    N = ein("...ij,...j->...i", fol.hinv, m_cov)
    nrm = np.sqrt(ein("...ij,...i,...j->...", fol.h, N, N))
    N /= nrm[..., None]
    # orient outward relative to the embedding centroid
    cen = np.mean(x.reshape(-1, 3), axis=0)
    flip = np.sign(np.sum((x - cen) * N, axis=-1))
    N *= flip[..., None]

    L = fol.T.copy()
    L[..., 1:] += N

    # frame from chart tangents, orthonormalized in H
    e1 = Xth.copy()
    e1[..., 0] = 0.0
    H = jet.H
    n1 = np.sqrt(ein("...ab,...a,...b->...", H, e1, e1))
    e1 /= n1[..., None]
    e2 = Xph.copy()
    e2[..., 0] = 0.0
    c = ein("...ab,...a,...b->...", H, e2, e1)
    e2 -= c[..., None] * e1
    n2 = np.sqrt(ein("...ab,...a,...b->...", H, e2, e2))
    e2 /= n2[..., None]
    eA = np.stack([e1, e2], axis=-2)

    s = s_field if s_field is not None else np.full(th.shape, np.nan)
    b = fol.n.copy()
    return SphereSection(ops, provider, X, L, eA, s, b, u=u, t=t)
