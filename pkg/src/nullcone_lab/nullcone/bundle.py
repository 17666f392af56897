"""Outgoing null geodesic bundles and their transported fields.

One fixed-step RK4 loop advances, for every generator of a cone at once:

* the trajectory X and the scaled generator V = n L (normalized to V^0 = 1
  and re-projected onto the null cone after every step),
* the affine parameter s of the canonical generator L (ds/dt = n),
* the tangential frame e_A in the gauge where its projected derivative along
  L vanishes (re-orthonormalized after every step),
* log of the null lapse b,
* optionally the transported coefficient fields: the expansion (stored as
  the deviation y = trchi - 2/s), the shear in the propagated frame, and the
  torsion 1-form, driven by frame-contracted curvature.

Snapshots of the full state are recorded at requested coordinate times;
sections and residual checks operate on snapshots only, which keeps memory
flat no matter how small the time step is.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SectionUnavailableError
from ..util import ein
from ..spacetime.jet import (
    FoliationData,
    christoffel,
    foliation_split,
    lapse_gradient,
    null_transport_sources,
)
from .axis import AxisCurve
from .directions import DirectionGrid

__all__ = [
    "Cone",
    "ConeSnapshot",
    "launch_cone",
    "transport_null_lapse",
    "propagate_frame",
]

BLOWUP_Y = -1.0e4


@dataclass
class ConeSnapshot:
    """State of every generator of one cone at a fixed coordinate time."""

    t: float
    X: np.ndarray            # (Ng, 4)
    L: np.ndarray            # (Ng, 4) canonical null generator, L^0 = 1/n
    s: np.ndarray            # (Ng,)
    eA: np.ndarray           # (Ng, 2, 4)
    b: np.ndarray            # (Ng,)
    kbar_nn: np.ndarray      # (Ng,)
    n: np.ndarray            # (Ng,)
    trchi_transport: np.ndarray | None = None
    shear_transport: np.ndarray | None = None   # (Ng, 2, 2)
    torsion_transport: np.ndarray | None = None  # (Ng, 2)


@dataclass
class Cone:
    """A family of outgoing null generators from one vertex."""

    u: float
    grid: DirectionGrid
    s0: float
    dt: float
    provider: object
    axis: AxisCurve
    vertex: np.ndarray
    n_vertex: float
    snapshots: list = field(default_factory=list)
    truncated_at: float | None = None
    caustic_at: float | None = None

    @property
    def times(self):
        return np.array([s.t for s in self.snapshots])

    def snapshot_at(self, t, interpolate=False):
        ts = self.times
        hit = np.nonzero(np.abs(ts - t) <= 1e-10 * max(1.0, abs(t)))[0]
        if hit.size:
            return self.snapshots[int(hit[0])]
        if not interpolate:
            raise SectionUnavailableError(
                f"no snapshot stored at t={t}; have {ts.tolist()}"
            )
        if t < ts[0] or t > ts[-1]:
            raise SectionUnavailableError(f"t={t} outside stored range")
        i = int(np.searchsorted(ts, t)) - 1
        a, b = self.snapshots[i], self.snapshots[i + 1]
        h = b.t - a.t
        w = (t - a.t) / h
        # Hermite for the trajectory (dX/dt = n L), linear for the rest
        h00 = 2 * w**3 - 3 * w**2 + 1
        h10 = w**3 - 2 * w**2 + w
        h01 = -2 * w**3 + 3 * w**2
        h11 = w**3 - w**2
        va = a.n[:, None] * a.L
        vb = b.n[:, None] * b.L
        X = h00 * a.X + h10 * h * va + h01 * b.X + h11 * h * vb
        s = h00 * a.s + h10 * h * a.n + h01 * b.s + h11 * h * b.n

        def lin(fa, fb):
            if fa is None or fb is None:
                return None
            return (1 - w) * fa + w * fb

        return ConeSnapshot(
            t=float(t), X=X, L=lin(a.L, b.L), s=s, eA=lin(a.eA, b.eA),
            b=lin(a.b, b.b), kbar_nn=lin(a.kbar_nn, b.kbar_nn), n=lin(a.n, b.n),
            trchi_transport=lin(a.trchi_transport, b.trchi_transport),
            shear_transport=lin(a.shear_transport, b.shear_transport),
            torsion_transport=lin(a.torsion_transport, b.torsion_transport),
        )


def _project_null(H, V):
    """Rescale the spatial part of V (V^0 kept) so that H(V, V) = 0."""
    a = ein("...ij,...i,...j->...", H[..., 1:, 1:], V[..., 1:], V[..., 1:])
    b = ein("...i,...i->...", H[..., 0, 1:], V[..., 1:]) * V[..., 0]
    c = H[..., 0, 0] * V[..., 0] ** 2
    disc = np.sqrt(np.maximum(b**2 - a * c, 0.0))
    sig = (-b + disc) / a
    out = V.copy()
    out[..., 1:] *= sig[..., None]
    return out


def _project_frame(H, T, L, eA):
    """S-tangent projection and Gram-Schmidt of the tangential frame."""
    Lbar = 2.0 * T - L
    out = eA.copy()
    for A in range(2):
        W = out[..., A, :]
        w4 = ein("...ab,...a,...b->...", H, W, L)
        w3 = ein("...ab,...a,...b->...", H, W, Lbar)
        W = W + 0.5 * w4[..., None] * Lbar + 0.5 * w3[..., None] * L
        W[..., 0] = 0.0
        out[..., A, :] = W
    # Gram-Schmidt in the induced metric
    W1 = out[..., 0, :]
    n1 = np.sqrt(ein("...ab,...a,...b->...", H, W1, W1))
    W1 = W1 / n1[..., None]
    W2 = out[..., 1, :]
    cross = ein("...ab,...a,...b->...", H, W2, W1)
    W2 = W2 - cross[..., None] * W1
    n2 = np.sqrt(ein("...ab,...a,...b->...", H, W2, W2))
    W2 = W2 / n2[..., None]
    return np.stack([W1, W2], axis=-2)


class _State:
    __slots__ = ("X", "V", "s", "eA", "lnb", "y", "c", "eta")

    def __init__(self, X, V, s, eA, lnb, y, c, eta):
        self.X, self.V, self.s, self.eA = X, V, s, eA
        self.lnb, self.y, self.c, self.eta = lnb, y, c, eta

    def axpy(self, h, d):
        return _State(
            self.X + h * d.X, self.V + h * d.V, self.s + h * d.s,
            self.eA + h * d.eA, self.lnb + h * d.lnb, self.y + h * d.y,
            self.c + h * d.c, self.eta + h * d.eta,
        )


def _rhs(provider, st: _State, transport, source_override):
    const = getattr(provider, "is_constant", False)
    V0 = st.V[..., 0]
    dX = st.V / V0[..., None]

    if const:
        jet = None
        cache = getattr(provider, "_const_env", None)
        if cache is None:
            jet1 = provider.jet(np.zeros((1, 4)))
            cache = (jet1.H[0], foliation_split(jet1))
            provider._const_env = cache
        _, fol1 = cache
        n = np.broadcast_to(fol1.n[0], st.s.shape)
        T = np.broadcast_to(fol1.T[0], st.V.shape)
        L = st.V / (n * V0)[..., None]
        dV = np.zeros_like(st.V)
        kNN = np.zeros_like(n)
        kAN = np.zeros_like(st.eta)
        kbar_nn = kNN
        deA = np.zeros_like(st.eA)
        dlnb = np.zeros_like(st.lnb)
    else:
        jet = provider.jet(st.X)
        C, Gamma = christoffel(jet)
        fol = foliation_split(jet, validate=False)
        dn = lapse_gradient(jet, fol)
        n = fol.n
        T = fol.T
        L = st.V / (n * V0)[..., None]
        GV = np.matmul(Gamma, st.V[..., None, :, None])[..., 0]      # [r, m]
        dV = -np.matmul(GV, st.V[..., :, None])[..., 0] / V0[..., None]

        N4 = L - T
        Ni = N4[..., 1:]
        eAi = st.eA[..., 1:]
        kN = np.matmul(fol.k, Ni[..., :, None])[..., 0]
        kNN = np.sum(Ni * kN, axis=-1)
        kAN = np.matmul(eAi, kN[..., :, None])[..., 0]
        dns = dn[..., 1:]
        kbar_nn = kNN - np.sum(Ni * dns, axis=-1) / n
        kbar_an = kAN - np.matmul(eAi, dns[..., :, None])[..., 0] / n[..., None]

        # frame gauge: D_L e_A = etabar_A L with etabar = -kbar_AN
        GL = np.matmul(Gamma, L[..., None, :, None])[..., 0]          # [r, n]
        deA = -n[..., None, None] * (
            np.matmul(st.eA, np.swapaxes(GL, -1, -2))
            + kbar_an[..., :, None] * L[..., None, :]
        )
        dlnb = -n * kbar_nn

    ds = n
    if not transport:
        zero = np.zeros_like(st.y)
        return _State(dX, dV, ds, deA, dlnb, zero, np.zeros_like(st.c),
                      np.zeros_like(st.eta)), kbar_nn, n, L

    if provider.is_flat:
        ric_ll = np.zeros_like(st.y)
        ahat = np.zeros(st.c.shape[:-1] + (2, 2))
        beta = np.zeros_like(st.eta)
    else:
        Lbar = 2.0 * T - L
        ric_ll, ahat, beta = null_transport_sources(jet, C, L, Lbar, st.eA)
    if source_override is not None:
        ric_ll, ahat, beta = source_override(st, ric_ll, ahat, beta)

    trchi = st.y + 2.0 / st.s
    c1, c2 = st.c[..., 0], st.c[..., 1]
    shear2 = 2.0 * (c1**2 + c2**2)
    dy = n * (
        -0.5 * st.y**2 - (2.0 / st.s) * st.y - shear2 - kbar_nn * trchi - ric_ll
    )
    # trace-free Riccati: D_L shear + trchi shear = -kbar_NN shear - alpha_hat
    damp = -(trchi + kbar_nn)
    dc = np.stack(
        [n * (damp * c1 - ahat[..., 0, 0]), n * (damp * c2 - ahat[..., 0, 1])],
        axis=-1,
    )
    # torsion transport: D_L eta_A + 1/2 trchi eta_A =
    #   -(kbar_BN + eta_B) shear_AB - 1/2 trchi kbar_AN + 1/2 beta_A
    if const:
        kbar_an = kAN
    kpe = kbar_an + st.eta
    src = np.stack(
        [c1 * kpe[..., 0] + c2 * kpe[..., 1], c2 * kpe[..., 0] - c1 * kpe[..., 1]],
        axis=-1,
    )
    deta = n[..., None] * (
        -0.5 * trchi[..., None] * st.eta - src - 0.5 * trchi[..., None] * kbar_an
        + 0.5 * beta
    )
    return _State(dX, dV, ds, deA, dlnb, dy, dc, deta), kbar_nn, n, L


def _normalize(provider, st: _State):
    if getattr(provider, "is_constant", False):
        cache = getattr(provider, "_const_env", None)
        if cache is None:
            jet1 = provider.jet(np.zeros((1, 4)))
            cache = (jet1.H[0], foliation_split(jet1))
            provider._const_env = cache
        H0, fol1 = cache
        base = st.X.shape[:-1]
        H = np.broadcast_to(H0, base + (4, 4))
        n = np.broadcast_to(fol1.n[0], base)
        T = np.broadcast_to(fol1.T[0], base + (4,))
        fol = FoliationData(
            n=n, v=np.broadcast_to(fol1.v[0], base + (3,)),
            h=np.broadcast_to(fol1.h[0], base + (3, 3)),
            k=np.broadcast_to(fol1.k[0], base + (3, 3)), T=T,
            hinv=np.broadcast_to(fol1.hinv[0], base + (3, 3)),
        )
    else:
        jet = provider.jet(st.X)
        fol = foliation_split(jet, validate=False)
        H = jet.H
    V = st.V / st.V[..., 0:1]
    V = _project_null(H, V)
    L = V / fol.n[..., None]
    eA = _project_frame(H, fol.T, L, st.eA)
    return _State(st.X, V, st.s, eA, st.lnb, st.y, st.c, st.eta), fol, L


def launch_cone(
    provider,
    axis: AxisCurve,
    u,
    grid: DirectionGrid,
    s0=1e-3,
    dt=1e-3,
    t_end=1.0,
    snapshot_times=None,
    transport=True,
    source_override=None,
    frame_rotation=0.0,
    keep_all_knots=False,
) -> Cone:
    """Integrate the outgoing bundle from the vertex at axis time u."""
    vertex = axis.vertex_point(u)
    jet_v = provider.jet(vertex)
    fol_v = foliation_split(jet_v)
    n_v = float(fol_v.n)
    h_v = fol_v.h

    d = grid.flat(grid.omega)
    norm = np.sqrt(ein("ij,...i,...j->...", h_v, d, d))
    N0 = d / norm[..., None]
    Ng = grid.ngen
    L0 = np.zeros((Ng, 4))
    L0[:] = fol_v.T
    L0[:, 1:] += N0

    X = vertex[None, :] + s0 * L0
    V = L0 / L0[:, 0:1]

    E1r, E2r = grid.rotated_initial_tangents(frame_rotation)
    eA = np.zeros((Ng, 2, 4))
    for A, E in enumerate((grid.flat(E1r), grid.flat(E2r))):
        W = E - ein("ij,...i,...j->...", h_v, E, N0)[..., None] * N0
        eA[:, A, 1:] = W
    # orthonormalize in h at the vertex
    g11 = ein("ij,...i,...j->...", h_v, eA[:, 0, 1:], eA[:, 0, 1:])
    eA[:, 0, 1:] /= np.sqrt(g11)[..., None]
    g12 = ein("ij,...i,...j->...", h_v, eA[:, 1, 1:], eA[:, 0, 1:])
    eA[:, 1, 1:] -= g12[..., None] * eA[:, 0, 1:]
    g22 = ein("ij,...i,...j->...", h_v, eA[:, 1, 1:], eA[:, 1, 1:])
    eA[:, 1, 1:] /= np.sqrt(g22)[..., None]

    # null-lapse initial value: b(s0) = n_v exp(-int_0^s0 kbar_NN), with the
    # integral approximated at the offset point (the bias would otherwise be
    # frozen into b and leak into the torsion via grad log b)
    jet0 = provider.jet(X)
    fol0 = foliation_split(jet0, validate=False)
    dn0 = lapse_gradient(jet0, fol0)
    N0_4 = L0 / (fol0.n * L0[:, 0])[:, None] - fol0.T
    kN0 = np.matmul(fol0.k, N0_4[..., 1:, None])[..., 0]
    kbar0 = np.sum(N0_4[..., 1:] * kN0, axis=-1) - np.sum(
        N0_4[..., 1:] * dn0[..., 1:], axis=-1
    ) / fol0.n
    lnb0 = -float(s0) * kbar0

    st = _State(
        X, V, np.full(Ng, float(s0)), eA, lnb0, np.zeros(Ng),
        np.zeros((Ng, 2)), np.zeros((Ng, 2)),
    )
    st, fol, L = _normalize(provider, st)

    cone = Cone(
        u=float(u), grid=grid, s0=float(s0), dt=float(dt), provider=provider,
        axis=axis, vertex=vertex, n_vertex=n_v,
    )

    t = float(vertex[0] + s0 * L0[0, 0])
    if snapshot_times is None:
        snapshot_times = []
    events = sorted({float(tt) for tt in snapshot_times if t < tt <= t_end} | {float(t_end)})

    def store(tcur, state, foliation, Lcur):
        trchi = state.y + 2.0 / state.s
        c1, c2 = state.c[..., 0], state.c[..., 1]
        shear = np.stack(
            [np.stack([c1, c2], axis=-1), np.stack([c2, -c1], axis=-1)], axis=-2
        )
        if getattr(provider, "is_constant", False):
            kbar = np.zeros_like(state.s)
        else:
            jet = provider.jet(state.X)
            dn = lapse_gradient(jet, foliation)
            N4 = Lcur - foliation.T
            kNN = ein("...ij,...i,...j->...", foliation.k, N4[..., 1:], N4[..., 1:])
            kbar = kNN - ein("...i,...i->...", N4[..., 1:], dn[..., 1:]) / foliation.n
        cone.snapshots.append(
            ConeSnapshot(
                t=float(tcur), X=state.X.copy(), L=Lcur.copy(), s=state.s.copy(),
                eA=state.eA.copy(), b=n_v * np.exp(state.lnb),
                kbar_nn=kbar, n=np.array(foliation.n, copy=True),
                trchi_transport=trchi if transport else None,
                shear_transport=shear if transport else None,
                torsion_transport=state.eta.copy() if transport else None,
            )
        )

    if keep_all_knots:
        store(t, st, fol, L)

    for tev in events:
        nsteps = max(1, int(np.ceil((tev - t) / dt - 1e-12)))
        h_uniform = (tev - t) / nsteps
        for _ in range(nsteps):
            # near-vertex substepping keeps the stiff 1/s transport accurate
            smin = float(np.min(st.s))
            nsub = int(min(64, max(1, np.ceil(6.0 * h_uniform / max(smin, 1e-12)))))
            h = h_uniform / nsub
            for _ in range(nsub):
                k1, *_ = _rhs(provider, st, transport, source_override)
                k2, *_ = _rhs(provider, st.axpy(0.5 * h, k1), transport, source_override)
                k3, *_ = _rhs(provider, st.axpy(0.5 * h, k2), transport, source_override)
                k4, *_ = _rhs(provider, st.axpy(h, k3), transport, source_override)
                newX = st.X + (h / 6.0) * (k1.X + 2 * k2.X + 2 * k3.X + k4.X)
                st = _State(
                    newX,
                    st.V + (h / 6.0) * (k1.V + 2 * k2.V + 2 * k3.V + k4.V),
                    st.s + (h / 6.0) * (k1.s + 2 * k2.s + 2 * k3.s + k4.s),
                    st.eA + (h / 6.0) * (k1.eA + 2 * k2.eA + 2 * k3.eA + k4.eA),
                    st.lnb + (h / 6.0) * (k1.lnb + 2 * k2.lnb + 2 * k3.lnb + k4.lnb),
                    st.y + (h / 6.0) * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
                    st.c + (h / 6.0) * (k1.c + 2 * k2.c + 2 * k3.c + k4.c),
                    st.eta + (h / 6.0) * (k1.eta + 2 * k2.eta + 2 * k3.eta + k4.eta),
                )
            t += h_uniform
            st, fol, L = _normalize(provider, st)
            bad = not np.all(np.isfinite(st.X)) or (transport and np.any(st.y < BLOWUP_Y))
            if bad:
                cone.truncated_at = t
                store(t, st, fol, L)
                return cone
            if keep_all_knots:
                store(t, st, fol, L)
        t = tev
        if not keep_all_knots:
            store(t, st, fol, L)
    return cone


def transport_null_lapse(cone: Cone):
    """Null lapse from the closed-form integral b = n_v exp(-int kbar_NN ds).

    Uses the stored snapshot knots as the quadrature grid (composite Simpson
    on uniform knots, trapezoid fallback), independent of the ODE route that
    filled ``snapshot.b`` during integration.  Returns one array per snapshot.
    """
    ts = cone.times
    if len(ts) < 2:
        raise ValueError("need at least two snapshots")
    integrand = np.stack([s.kbar_nn * s.n for s in cone.snapshots])  # d/dt factor
    ng = integrand.shape[1]
    acc = np.zeros((len(ts), ng))
    for i in range(1, len(ts)):
        h = ts[i] - ts[i - 1]
        if i >= 2 and abs((ts[i] - ts[i - 1]) - (ts[i - 1] - ts[i - 2])) < 1e-12:
            # Simpson correction over the last pair of uniform intervals
            acc[i] = acc[i - 2] + (h / 3.0) * (
                integrand[i - 2] + 4.0 * integrand[i - 1] + integrand[i]
            )
        else:
            acc[i] = acc[i - 1] + 0.5 * h * (integrand[i - 1] + integrand[i])
    return [cone.n_vertex * np.exp(-acc[i]) for i in range(len(ts))]


def propagate_frame(cone: Cone, frame_rotation=0.0, reorthonormalize=True):
    """Re-propagate the tangential frame along the stored snapshot knots.

    Runs the same projected-transport gauge as the main integrator but on the
    snapshot grid (RK4 with Hermite-interpolated trajectory), so it can be
    used as an independent check, to study re-orthonormalization drift, or to
    produce a frame rotated at the vertex.  Returns a list of (Ng, 2, 4)
    arrays aligned with ``cone.snapshots``.
    """
    provider = cone.provider
    snaps = cone.snapshots
    if len(snaps) < 2:
        raise ValueError("need at least two snapshots")

    def traj(i, w):
        a, b = snaps[i], snaps[i + 1]
        h = b.t - a.t
        va, vb = a.n[:, None] * a.L, b.n[:, None] * b.L
        h00 = 2 * w**3 - 3 * w**2 + 1
        h10 = w**3 - 2 * w**2 + w
        h01 = -2 * w**3 + 3 * w**2
        h11 = w**3 - w**2
        X = h00 * a.X + h10 * h * va + h01 * b.X + h11 * h * vb
        dh00 = (6 * w**2 - 6 * w) / h
        dh10 = (3 * w**2 - 4 * w + 1)
        dh01 = (-6 * w**2 + 6 * w) / h
        dh11 = (3 * w**2 - 2 * w)
        dX = dh00 * a.X + dh10 * va + dh01 * b.X + dh11 * vb
        return X, dX

    eA = snaps[0].eA.copy()
    if frame_rotation:
        c, s = np.cos(frame_rotation), np.sin(frame_rotation)
        e1 = c * eA[:, 0] + s * eA[:, 1]
        e2 = -s * eA[:, 0] + c * eA[:, 1]
        eA = np.stack([e1, e2], axis=1)
    out = [eA.copy()]

    def rhs(X, dX, eA):
        jet = provider.jet(X)
        _, Gamma = christoffel(jet)
        fol = foliation_split(jet, validate=False)
        dn = lapse_gradient(jet, fol)
        L = dX / fol.n[..., None]
        N4 = L - fol.T
        kAN = ein("...ij,...Ai,...j->...A", fol.k, eA[..., 1:], N4[..., 1:])
        kbar_an = kAN - ein(
            "...Ai,...i->...A", eA[..., 1:], dn[..., 1:]
        ) / fol.n[..., None]
        return -ein("...rmn,...m,...An->...Ar", Gamma, dX, eA) - (
            fol.n[..., None, None] * kbar_an[..., :, None] * L[..., None, :]
        )

    for i in range(len(snaps) - 1):
        h = snaps[i + 1].t - snaps[i].t
        X0, d0 = traj(i, 0.0)
        Xm, dm = traj(i, 0.5)
        X1, d1 = traj(i, 1.0)
        k1 = rhs(X0, d0, eA)
        k2 = rhs(Xm, dm, eA + 0.5 * h * k1)
        k3 = rhs(Xm, dm, eA + 0.5 * h * k2)
        k4 = rhs(X1, d1, eA + h * k3)
        eA = eA + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if reorthonormalize:
            jet = provider.jet(snaps[i + 1].X)
            fol = foliation_split(jet, validate=False)
            eA = _project_frame(jet.H, fol.T, snaps[i + 1].L, eA)
        out.append(eA.copy())
    return out
