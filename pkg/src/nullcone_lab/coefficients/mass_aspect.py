"""Mass aspect function and its Hodge companion.

Transversal derivatives are built from neighboring cones (u +/- du) at fixed
time: the connecting vector Y = dX/du decomposes against the section normal
and frame, giving N(f); derivatives along the ingoing direction then follow
from Lbar = L - 2N without ever differencing frame-dependent quantities
across cones.
"""

from __future__ import annotations

import numpy as np

from ..errors import StencilUnavailableError
from ..util import ein
from .direct import slice_curvature_pieces

__all__ = [
    "time_derivative",
    "normal_derivative",
    "lbar_derivative",
    "mass_aspect",
    "mu_slash",
]


def time_derivative(t_sections, f_values):
    """d/dt at fixed generator from a uniform odd cluster of sections."""
    m = len(t_sections)
    if m < 3 or m % 2 == 0:
        raise StencilUnavailableError("need an odd cluster of >= 3 sections")
    ts = np.array([s.t for s in t_sections])
    dts = np.diff(ts)
    if not np.allclose(dts, dts[0], rtol=1e-8):
        raise StencilUnavailableError("cluster times must be uniform")
    delta = dts[0]
    mid = m // 2
    if m >= 5:
        idx = [mid - 2, mid - 1, mid + 1, mid + 2]
        coef = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * delta)
    else:
        idx = [mid - 1, mid + 1]
        coef = np.array([-1.0, 1.0]) / (2.0 * delta)
    return sum(c * f_values[i] for c, i in zip(coef, idx))


def outgoing_derivative(t_sections, f_values):
    """L(f) = n^-1 d/dt along generators."""
    mid = len(t_sections) // 2
    return time_derivative(t_sections, f_values) / t_sections[mid].fol.n


def normal_derivative(u_sections, f_values):
    """N(f) at the center section from neighbor cones at fixed time.

    Takes a 3-point (u +/- du) or 5-point (u +/- 2du) uniform cluster; the
    5-point form is fourth order in du.
    """
    m = len(u_sections)
    if m not in (3, 5):
        raise StencilUnavailableError("need a 3- or 5-point u cluster")
    mid = m // 2
    s0 = u_sections[mid]
    us = np.array([s.u for s in u_sections])
    dus = np.diff(us)
    if np.any(dus <= 0) or not np.allclose(dus, dus[0], rtol=1e-8):
        raise StencilUnavailableError("u cluster must be uniform increasing")
    du = dus[0]
    if m == 3:
        coef = np.array([-1.0, 0.0, 1.0]) / (2.0 * du)
    else:
        coef = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * du)
    fu = sum(c * f for c, f in zip(coef, f_values) if c != 0.0)
    Y = sum(c * s.X for c, s in zip(coef, u_sections) if c != 0.0)
    N4 = s0.L - s0.fol.T
    yN = ein("...ab,...a,...b->...", s0.jet.H, Y, N4)
    YA = s0.project1(Y)
    gradf = s0.grad_scalar(f_values[mid])
    return (fu - np.sum(YA * gradf, axis=-1)) / yN


def lbar_derivative(t_sections, u_sections, f_t_values, f_u_values):
    """Lbar(f) = L(f) - 2 N(f) for a scalar field given on both clusters."""
    return outgoing_derivative(t_sections, f_t_values) - 2.0 * normal_derivative(
        u_sections, f_u_values
    )


def mass_aspect(t_sections, u_sections, trchi_t, trchi_u):
    """mu = Lbar(trchi) - trchi^2/2 - (k_NN + n^-1 N(n)) trchi at the center."""
    s0 = t_sections[len(t_sections) // 2]
    trchi = trchi_t[len(t_sections) // 2]
    lbar_tr = lbar_derivative(t_sections, u_sections, trchi_t, trchi_u)
    pieces = slice_curvature_pieces(s0)
    lapse_term = pieces["k_nn"] + pieces["N_n"] / s0.fol.n
    return lbar_tr - 0.5 * trchi**2 - lapse_term * trchi


def mu_slash(sec, mu, w, tol=1e-11, maxiter=6000):
    """Solve div musl = mu - w, curl musl = 0 (mean projected out).

    Returns (musl, removed_mean, solution record).  The closed-surface
    compatibility forces the source mean to vanish; its measured value is a
    diagnostic of the surrounding discretization.
    """
    from ..surface_calc.hodge import hodge_solve

    F = mu - w
    mean = float(sec.quad(F)) / sec.area
    sol = hodge_solve(
        sec, F - mean, np.zeros_like(F), rank=1, tol=tol, maxiter=maxiter,
        require_compatible=False,
    )
    return sol.xi, mean, sol
