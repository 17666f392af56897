"""Pointwise metric 2-jets, 3+1 split, Christoffel symbols and curvature.

Conventions used throughout the package:

* coordinates x^0 = t, x^1..x^3 spatial; signature (-,+,+,+);
* ``H`` has shape (..., 4, 4), ``dH[..., g, a, b] = d_g H_ab``,
  ``d2H[..., g, d, a, b] = d^2_{gd} H_ab`` (symmetric in g,d and in a,b);
* lowered Riemann tensor ``riem[..., r, s, m, n] = R_{rsmn}`` with
  ``Ric_{sn} = H^{rm} R_{rsmn}`` and the sign fixed so that the round sphere
  has positive Gauss curvature (the expansion of an outgoing flat-space cone
  then satisfies the focusing transport equation with a minus sign on Ric(L,L)).

All operations broadcast over leading axes, so a whole bundle of points can be
processed in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..util import ein
from ..errors import DegenerateSlicingError, EllipticityError, NotLorentzianError

__all__ = [
    "MetricJet",
    "FoliationData",
    "CurvatureAtPoint",
    "FrameCurvature",
    "coordinate_grad_norm",
    "christoffel",
    "foliation_split",
    "curvature",
    "frame_curvature",
]


def inv3(h):
    """Batched closed-form inverse of 3x3 matrices (much faster than LAPACK)."""
    a, b, c = h[..., 0, 0], h[..., 0, 1], h[..., 0, 2]
    d, e, f = h[..., 1, 1], h[..., 1, 2], h[..., 2, 2]
    A = d * f - e * e
    B = c * e - b * f
    C = b * e - c * d
    det = a * A + b * B + c * C
    out = np.empty_like(h)
    out[..., 0, 0] = A
    out[..., 0, 1] = out[..., 1, 0] = B
    out[..., 0, 2] = out[..., 2, 0] = C
    out[..., 1, 1] = a * f - c * c
    out[..., 1, 2] = out[..., 2, 1] = b * c - a * e
    out[..., 2, 2] = a * d - b * b
    out /= det[..., None, None]
    return out


def inv4_lorentzian(H):
    """Batched inverse of a 3+1-block symmetric metric via the Schur complement."""
    h = H[..., 1:, 1:]
    hinv = inv3(h)
    b = H[..., 0, 1:]
    hb = ein("...ij,...j->...i", hinv, b)
    s = H[..., 0, 0] - ein("...i,...i->...", b, hb)
    out = np.empty_like(H)
    out[..., 0, 0] = 1.0 / s
    out[..., 0, 1:] = -hb / s[..., None]
    out[..., 1:, 0] = out[..., 0, 1:]
    out[..., 1:, 1:] = hinv + ein("...i,...j->...ij", hb, hb) / s[..., None, None]
    return out


@dataclass
class MetricJet:
    """Metric components with first and second coordinate derivatives."""

    H: np.ndarray
    dH: np.ndarray
    d2H: np.ndarray
    _Hinv: np.ndarray | None = field(default=None, repr=False)

    @property
    def Hinv(self) -> np.ndarray:
        if self._Hinv is None:
            self._Hinv = inv4_lorentzian(self.H)
        return self._Hinv

    def check_symmetry(self, tol=1e-12):
        """Verify index symmetries of the stored arrays."""
        ok = (
            np.allclose(self.H, np.swapaxes(self.H, -1, -2), atol=tol)
            and np.allclose(self.dH, np.swapaxes(self.dH, -1, -2), atol=tol)
            and np.allclose(self.d2H, np.swapaxes(self.d2H, -1, -2), atol=tol)
            and np.allclose(self.d2H, np.swapaxes(self.d2H, -4, -3), atol=tol)
        )
        return bool(ok)

    def check_signature(self):
        """One negative and three positive eigenvalues at every point."""
        w = np.linalg.eigvalsh(self.H)
        return bool(np.all(w[..., 0] < 0) and np.all(w[..., 1:] > 0))


@dataclass
class FoliationData:
    """Lapse, shift, induced metric, extrinsic curvature, unit normal."""

    n: np.ndarray
    v: np.ndarray          # shift with raised index, shape (..., 3)
    h: np.ndarray          # induced metric, shape (..., 3, 3)
    k: np.ndarray          # extrinsic curvature, shape (..., 3, 3)
    T: np.ndarray          # unit future normal, shape (..., 4)
    hinv: np.ndarray

    def shift_norm2(self):
        return ein("...i,...ij,...j->...", self.v, self.h, self.v)


@dataclass
class CurvatureAtPoint:
    """Lowered Riemann tensor with Ricci and scalar contractions."""

    riem: np.ndarray       # (..., 4, 4, 4, 4)
    ric: np.ndarray        # (..., 4, 4)
    scalar: np.ndarray     # (...,)


def coordinate_grad_norm(dH: np.ndarray) -> np.ndarray:
    """max_{g,a,b} |d_g H_ab|, the coordinate norm of the metric gradient."""
    return np.max(np.abs(dH), axis=(-3, -2, -1))


def christoffel(jet: MetricJet):
    """Return (lowered C_{l,m,n}, raised Gamma^r_{mn})."""
    dH = jet.dH
    # C[l, m, n] = 1/2 (d_m H_ln + d_n H_lm - d_l H_mn)
    nd = dH.ndim
    perm = tuple(range(nd - 3))
    # C[l, m, n] = 1/2 (dH[m, l, n] + dH[n, l, m] - dH[l, m, n])
    C = 0.5 * (
        np.transpose(dH, perm + (nd - 2, nd - 3, nd - 1))
        + np.transpose(dH, perm + (nd - 2, nd - 1, nd - 3))
        - dH
    )
    base = C.shape[:-3]
    Gamma = np.matmul(jet.Hinv, C.reshape(base + (4, 16))).reshape(base + (4, 4, 4))
    return C, Gamma


def foliation_split(
    jet: MetricJet, ellipticity_c: float | None = None, validate: bool = True
) -> FoliationData:
    """Split the metric 2-jet into lapse, shift, induced metric and k.

    n^2 = -1/H^00 (inverse metric), v^i = h^ij H_0j, h_ij = H_ij and
    k_ij = -(1/2n) (d_t h_ij - Lie_v h_ij).  Raises if the signature or the
    slicing degenerates; with ``ellipticity_c`` set, also enforces the uniform
    ellipticity bound c |xi|^2 <= h_ij xi^i xi^j <= c^-1 |xi|^2.  Integrator
    hot paths pass ``validate=False`` and check at snapshot times instead.
    """
    H, dH = jet.H, jet.dH
    h = H[..., 1:, 1:]
    hinv = inv3(h)
    b0 = H[..., 0, 1:]
    v = np.matmul(hinv, b0[..., None])[..., 0]
    schur = H[..., 0, 0] - np.matmul(b0[..., None, :], v[..., None])[..., 0, 0]
    if validate:
        hw = np.linalg.eigvalsh(h)
        if np.any(hw[..., 0] <= 0):
            raise NotLorentzianError("induced spatial metric is not positive definite")
        if np.any(schur >= 0):
            raise NotLorentzianError("time direction is not timelike (H^00 >= 0)")
    with np.errstate(invalid="ignore"):
        n = np.sqrt(-schur)        # schur = H00 - |v|^2_h = -n^2
    if validate:
        gap = -schur - np.matmul(
            np.matmul(v[..., None, :], h), v[..., None]
        )[..., 0, 0] + np.matmul(b0[..., None, :], v[..., None])[..., 0, 0]
        # gap = n^2 - |v|^2_h
        if np.any(gap <= 0):
            raise DegenerateSlicingError("n^2 - |v|^2_h <= 0: degenerate slicing")
        if ellipticity_c is not None:
            lo = float(np.min(hw[..., 0]))
            hi = float(np.max(hw[..., -1]))
            if lo < ellipticity_c or hi > 1.0 / ellipticity_c or np.any(gap < ellipticity_c):
                raise EllipticityError(
                    f"uniform ellipticity violated: eig(h) in [{lo:.3g}, {hi:.3g}], "
                    f"min(n^2-|v|^2) = {float(np.min(gap)):.3g}, c = {ellipticity_c}"
                )

    # Lie_v h_ij = v^k d_k h_ij + h_kj d_i v^k + h_ik d_j v^k, with
    # d_k v^i = d_k(h^ij) H_0j + h^ij d_k H_0j and d h^-1 = -h^-1 (dh) h^-1.
    dh = dH[..., 1:, 1:, 1:]                      # d_k h_ij, k spatial
    dth = dH[..., 0, 1:, 1:]                      # d_t h_ij
    dH0 = dH[..., 1:, 0, 1:]                      # d_k H_0j
    hinv_b = hinv[..., None, :, :]
    dhinv = -np.matmul(np.matmul(hinv_b, dh), hinv_b)
    dv = np.matmul(dhinv, b0[..., None, :, None])[..., 0] + np.matmul(dH0, hinv)
    # dv[..., k, i] = d_k v^i
    adv = np.matmul(dv, h)                         # [i, j] = d_i v^k h_kj
    lie = np.sum(v[..., :, None, None] * dh, axis=-3) + adv + np.swapaxes(adv, -1, -2)
    k = -(dth - lie) / (2.0 * n)[..., None, None]

    T = np.zeros(H.shape[:-1])
    T[..., 0] = 1.0 / n
    T[..., 1:] = -v / n[..., None]
    return FoliationData(n=n, v=v, h=h, k=k, T=T, hinv=hinv)


def lapse_gradient(jet: MetricJet, fol: FoliationData) -> np.ndarray:
    """Coordinate gradient d_g n, from n = (-H^00)^(-1/2)."""
    x0 = jet.Hinv[..., 0, :]
    w = np.matmul(jet.dH, x0[..., None, :, None])[..., 0]   # [g, a]
    dHup00 = -np.sum(w * x0[..., None, :], axis=-1)
    return 0.5 * fol.n[..., None] ** 3 * dHup00


def riemann_lowered(jet: MetricJet) -> np.ndarray:
    """Lowered Riemann tensor R_{rsmn} from the metric 2-jet.

    R_{rsmn} = 1/2 (d2_{ms} H_{rn} + d2_{nr} H_{ms}
                    - d2_{mr} H_{ns} - d2_{ns} H_{rm})
               + H^{lt} (C_{tms} C_{lnr} - C_{tns} C_{lmr})
    """
    d2H = jet.d2H
    C, _ = christoffel(jet)
    term2 = 0.5 * (
        ein("...msrn->...rsmn", d2H)
        + ein("...nrms->...rsmn", d2H)
        - ein("...mrns->...rsmn", d2H)
        - ein("...nsrm->...rsmn", d2H)
    )
    CC = ein("...lt,...tms,...lnr->...rsmn", jet.Hinv, C, C)
    CC -= ein("...lt,...tns,...lmr->...rsmn", jet.Hinv, C, C)
    return term2 + CC


def null_transport_sources(jet: MetricJet, C, L, Lbar, eA):
    """Ric(L,L), trace-free R(L,e_A,L,e_B) and R(L,e_A,Lbar,L), contracted.

    Evaluates the curvature sources of the coefficient transport equations by
    contracting the metric 2-jet with the frame directly, never forming the
    full Riemann tensor (that array would dominate the integrator cost).
    ``C`` is the lowered Christoffel from :func:`christoffel`.
    """
    d2H = jet.d2H
    Hinv = jet.Hinv
    Lcol = L[..., :, None]
    # E[g,d,a] = d2H[g,d,a,b] L^b and its L-contractions; d2H is symmetric in
    # (g,d) and (a,b), so these cover every slot pattern that appears.
    E = np.matmul(d2H, L[..., None, None, :, None])[..., 0]
    EL = np.matmul(E, L[..., None, :, None])[..., 0]                 # d2.L^a L^b
    M = np.matmul(np.swapaxes(E, -1, -2), L[..., None, :, None])[..., 0]  # d2.L^d L^b
    P = np.matmul(np.moveaxis(d2H, -3, -1), L[..., None, None, :, None])[..., 0]
    PL = np.sum(P * L[..., :, None, None], axis=-3)                  # d2.L^g L^d

    eAT = np.swapaxes(eA, -1, -2)

    def sandwich(mat):
        return np.matmul(np.matmul(eA, mat), eAT)

    def mv(mat, vec):
        return np.matmul(mat, vec[..., None])[..., 0]

    # second-derivative parts
    ric_t2 = 0.5 * (
        2.0 * np.sum(M * Hinv, axis=(-2, -1))
        - np.sum(EL * Hinv, axis=(-2, -1))
        - np.sum(PL * Hinv, axis=(-2, -1))
    )
    r_lalb_t2 = 0.5 * (
        sandwich(M) + sandwich(np.swapaxes(M, -1, -2)) - sandwich(PL) - sandwich(EL)
    )
    t1 = np.matmul(eA, mv(EL, Lbar)[..., None])[..., 0]
    t2 = np.matmul(eA, mv(PL, Lbar)[..., None])[..., 0]
    t3 = np.matmul(eA, mv(np.swapaxes(M, -1, -2), Lbar)[..., None])[..., 0]
    t4 = np.matmul(eA, mv(M, Lbar)[..., None])[..., 0]
    beta_t2 = 0.5 * (t1 + t2 - t3 - t4)

    # Christoffel-squared parts; C is symmetric in its last two slots, so a
    # single contraction X = C.L serves every quadratic term.
    X = np.matmul(C, Lcol[..., None, :, :])[..., 0]          # [l, m]
    Xlb = np.matmul(C, Lbar[..., None, :, None])[..., 0]
    w1 = mv(X, L)                                            # C.L.L per leg
    w2 = np.sum(C * Hinv[..., None, :, :], axis=(-2, -1))
    w3 = mv(Hinv, w1)

    q1 = np.sum(np.matmul(Hinv, X) * np.matmul(X, Hinv), axis=(-2, -1))
    q2 = np.sum(w2 * w3, axis=-1)
    ric_qq = q1 - q2

    CA1 = np.matmul(X, eAT)                                  # [t, A]
    qa = np.matmul(np.swapaxes(CA1, -1, -2), np.matmul(Hinv, CA1))
    K1 = np.matmul(C, eAT[..., None, :, :])                  # [t, n, A]
    K = np.matmul(np.swapaxes(K1, -1, -2), eAT[..., None, :, :])  # [t, A, B]
    qb = np.sum(w3[..., :, None, None] * K, axis=-3)
    r_lalb_qq = qa - np.swapaxes(qb, -1, -2)

    CAb = np.matmul(Xlb, eAT)
    qa2 = mv(np.swapaxes(CAb, -1, -2), w3)
    z2 = mv(X, Lbar)
    qb2 = mv(np.swapaxes(CA1, -1, -2), mv(Hinv, z2))
    beta_qq = qa2 - qb2

    ric_ll = ric_t2 + ric_qq
    r_lalb = r_lalb_t2 + r_lalb_qq
    tr = r_lalb[..., 0, 0] + r_lalb[..., 1, 1]
    ahat = r_lalb.copy()
    ahat[..., 0, 0] -= 0.5 * tr
    ahat[..., 1, 1] -= 0.5 * tr
    beta = beta_t2 + beta_qq
    return ric_ll, ahat, beta


def curvature(jet: MetricJet) -> CurvatureAtPoint:
    """Full lowered Riemann tensor plus Ricci and scalar curvature."""
    riem = riemann_lowered(jet)
    ric = ein("...rm,...rsmn->...sn", jet.Hinv, riem)
    scal = ein("...sn,...sn->...", jet.Hinv, ric)
    return CurvatureAtPoint(riem=riem, ric=ric, scalar=scal)


class FrameCurvature:
    """Curvature components relative to a null frame (L, Lbar, e_1, e_2).

    ``l`` is the outgoing null vector, ``lb`` the ingoing one, ``eA`` the two
    tangential frame legs with shape (..., 2, 4).  Component helpers return
    arrays broadcast over the leading axes.
    """

    def __init__(self, curv: CurvatureAtPoint, l, lb, eA):
        if not (np.all(np.isfinite(l)) and np.all(np.isfinite(lb)) and np.all(np.isfinite(eA))):
            raise ValueError("non-finite frame components")
        self.curv = curv
        self.l = np.asarray(l)
        self.lb = np.asarray(lb)
        self.eA = np.asarray(eA)

    def component(self, a, b, c, d):
        """R(a,b,c,d) for explicit 4-vectors."""
        return ein("...rsmn,...r,...s,...m,...n->...", self.curv.riem, a, b, c, d)

    def _vec(self, key, A=0):
        if key == "l":
            return self.l
        if key == "lb":
            return self.lb
        return self.eA[..., A, :]

    # Ricci / scalar pieces
    def ric(self, a, b):
        return ein("...sn,...s,...n->...", self.curv.ric, a, b)

    @property
    def ric_ll(self):
        return self.ric(self.l, self.l)

    @property
    def ric_llb(self):
        return self.ric(self.l, self.lb)

    @property
    def scalar(self):
        return self.curv.scalar

    @property
    def w_aux(self):
        """Scalar curvature plus the mixed null Ricci component."""
        return self.curv.scalar + self.ric_llb

    # Riemann pieces used by the structure equations
    def riem_lalb(self):
        """R(L, e_A, L, e_B), shape (..., 2, 2)."""
        return ein(
            "...rsmn,...r,...As,...m,...Bn->...AB",
            self.curv.riem, self.l, self.eA, self.l, self.eA,
        )

    def alpha_hat(self):
        """Trace-free part of R(L, e_A, L, e_B)."""
        m = self.riem_lalb()
        tr = m[..., 0, 0] + m[..., 1, 1]
        out = m.copy()
        out[..., 0, 0] -= 0.5 * tr
        out[..., 1, 1] -= 0.5 * tr
        return out

    def beta(self):
        """R(L, e_A, Lbar, L), shape (..., 2)."""
        return ein(
            "...rsmn,...r,...As,...m,...n->...A",
            self.curv.riem, self.l, self.eA, self.lb, self.l,
        )

    def riem_balab(self):
        """sum_B R(e_B, L, e_A, e_B), shape (..., 2) (Codazzi source)."""
        return ein(
            "...rsmn,...Br,...s,...Am,...Bn->...A",
            self.curv.riem, self.eA, self.l, self.eA, self.eA,
        )

    def riem_albl_ab(self):
        """R(e_A, L, Lbar, e_B), shape (..., 2, 2)."""
        return ein(
            "...rsmn,...Ar,...s,...m,...Bn->...AB",
            self.curv.riem, self.eA, self.l, self.lb, self.eA,
        )

    def riem_abcd(self):
        """R(e_A, e_B, e_C, e_D), shape (..., 2, 2, 2, 2)."""
        return ein(
            "...rsmn,...Ar,...Bs,...Cm,...Dn->...ABCD",
            self.curv.riem, self.eA, self.eA, self.eA, self.eA,
        )

    def riem_lblb(self):
        """R(Lbar, L, Lbar, L) scalar component."""
        return self.component(self.lb, self.l, self.lb, self.l)

    def ric_la(self):
        """Ric(L, e_A), shape (..., 2)."""
        return ein("...sn,...s,...An->...A", self.curv.ric, self.l, self.eA)

    def ric_ab(self):
        """Ric(e_A, e_B), shape (..., 2, 2)."""
        return ein("...sn,...As,...Bn->...AB", self.curv.ric, self.eA, self.eA)


def frame_curvature(curv: CurvatureAtPoint, l, lb, eA) -> FrameCurvature:
    """Bundle curvature components relative to a canonical null frame."""
    return FrameCurvature(curv, l, lb, eA)
