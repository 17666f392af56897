"""div/curl (Hodge) systems on sections, solved by conjugate gradients.

The first-order system  div xi = F, curl xi = G  (trace-free symmetric for
rank 2) is solved in the least-squares sense through the normal equations
A^T W A x = A^T W d, where W is the quadrature weight and A^T is the exact
discrete transpose of the forward operator chain (stencils, FFTs and
pointwise frame contractions all transpose exactly).  The normal operator is
then symmetric positive semi-definite to machine precision and CG converges
to the minimum-norm least-squares solution; residual norms are reported so
incompatible data is visible rather than silent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import HodgeCompatibilityError

__all__ = ["HodgeSolution", "hodge_solve", "hodge_energy_identity"]


@dataclass
class HodgeSolution:
    xi: np.ndarray
    rank: int
    iterations: int
    residual_div: float
    residual_curl: float
    mean_removed: tuple


def _stf_from_pair(c):
    out = np.empty(c.shape[:-1] + (2, 2))
    out[..., 0, 0] = c[..., 0]
    out[..., 1, 1] = -c[..., 0]
    out[..., 0, 1] = c[..., 1]
    out[..., 1, 0] = c[..., 1]
    return out


def _pair_from_stf_T(M):
    return np.stack([M[..., 0, 0] - M[..., 1, 1], M[..., 0, 1] + M[..., 1, 0]], axis=-1)


def hodge_solve(sec, F, G, rank=1, tol=1e-13, atol=1e-300, maxiter=6000,
                require_compatible=True):
    """Solve div xi = F, curl xi = G for a tangential tensor of given rank.

    rank 1 returns the 1-form (..., 2); rank 2 returns the trace-free
    symmetric 2-tensor (..., 2, 2).
    """
    if rank not in (1, 2):
        raise ValueError("rank must be 1 or 2")
    w = sec.quad_weight

    means = ()
    if rank == 1:
        area = sec.area
        mF = float(sec.quad(F)) / area
        mG = float(sec.quad(G)) / area
        scale = max(float(np.max(np.abs(F))), float(np.max(np.abs(G))), 1e-300)
        if require_compatible and max(abs(mF), abs(mG)) > 1e-6 * scale + 1e-12:
            raise HodgeCompatibilityError(
                f"no solution: nonzero mean (div mean {mF:.3e}, curl mean {mG:.3e})"
            )
        F = F - mF
        G = G - mG
        means = (mF, mG)

        def fwd(x):
            nab = sec.nabla1(x)
            return nab[..., 0, 0] + nab[..., 1, 1], nab[..., 0, 1] - nab[..., 1, 0]

        def adjT(f, g):
            co = np.empty(f.shape + (2, 2))
            co[..., 0, 0] = f
            co[..., 1, 1] = f
            co[..., 0, 1] = g
            co[..., 1, 0] = -g
            return sec.nabla1_T(co)

        x = np.zeros(F.shape + (2,))
    else:
        def fwd(c):
            nab = sec.nabla2(_stf_from_pair(c))
            return (
                nab[..., 0, 0, :] + nab[..., 1, 1, :],
                nab[..., 0, 1, :] - nab[..., 1, 0, :],
            )

        def adjT(f, g):
            co = np.zeros(f.shape[:-1] + (2, 2, 2))
            co[..., 0, 0, :] = f
            co[..., 1, 1, :] = f
            co[..., 0, 1, :] = g
            co[..., 1, 0, :] = -g
            return _pair_from_stf_T(sec.nabla2_T(co))

        x = np.zeros(F.shape[:-1] + (2,))

    def wmul(f, g):
        if rank == 1:
            return w * f, w * g
        return w[..., None] * f, w[..., None] * g

    # Plain CG on the normal equations.  A diagonal preconditioner is
    # deliberately avoided: it mixes near-null polar modes into the Krylov
    # space and destroys the solution even when the residual looks small.
    rhs = adjT(*wmul(F, G))
    r = rhs.copy()
    p = r.copy()
    rs = float(np.sum(r * r))
    rhs_norm = np.sqrt(max(rs, 1e-300))
    it = 0
    for it in range(1, maxiter + 1):
        Af, Ag = fwd(p)
        q = adjT(*wmul(Af, Ag))
        denom = float(np.sum(p * q))
        if denom <= 0.0:
            break
        alpha = rs / denom
        x = x + alpha * p
        r = r - alpha * q
        rs_new = float(np.sum(r * r))
        if np.sqrt(rs_new) < tol * rhs_norm + atol:
            rs = rs_new
            break
        p = r + (rs_new / rs) * p
        rs = rs_new

    fF, fG = fwd(x)
    res_div = float(np.max(np.abs(fF - F)))
    res_curl = float(np.max(np.abs(fG - G)))
    xi = x if rank == 1 else _stf_from_pair(x)
    return HodgeSolution(
        xi=xi, rank=rank, iterations=it, residual_div=res_div,
        residual_curl=res_curl, mean_removed=means,
    )


def hodge_energy_identity(sec, xi, F, G, rank=1, K=None):
    """Both sides of the energy identity for a div/curl system.

    lhs = int |nab xi|^2 + rank * K |xi|^2 ;  rhs = int (|F|^2 + |G|^2).
    The curvature weight equals the tensor rank (1-forms carry K, trace-free
    symmetric 2-tensors 2K).
    """
    if K is None:
        K = sec.gauss_curvature()
    if rank == 1:
        nab = sec.nabla1(xi)
        lhs = sec.quad(np.sum(nab**2, axis=(-2, -1)) + K * np.sum(xi**2, axis=-1))
        rhs = sec.quad(F**2 + G**2)
    else:
        nab = sec.nabla2(xi)
        lhs = sec.quad(
            np.sum(nab**2, axis=(-3, -2, -1))
            + 2.0 * K * np.sum(xi**2, axis=(-2, -1))
        )
        rhs = sec.quad(np.sum(F**2, axis=-1) + np.sum(G**2, axis=-1))
    return float(lhs), float(rhs)
