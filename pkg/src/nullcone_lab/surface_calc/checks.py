"""Isoperimetric and trace-type measurements on sections.

Both are recorded as empirical constants (LHS / RHS), never asserted against
an analytic constant: the reference inequalities hold with unspecified
universal factors.
"""

from __future__ import annotations

import numpy as np

__all__ = ["isoperimetric_check", "trace_check", "area_radius_average"]


def area_radius_average(sec, fields=()):
    """Area, radius and area-averages of the requested node fields."""
    means = tuple(float(sec.average(f)) for f in fields)
    return sec.area, sec.radius, means


def isoperimetric_check(sec, f):
    """(int f^2)^(1/2) against int (|grad f| + |f|/r); returns both sides."""
    lhs = float(np.sqrt(sec.quad(f**2)))
    grad = sec.grad_scalar(f)
    rhs = float(sec.quad(np.sqrt(np.sum(grad**2, axis=-1)) + np.abs(f) / sec.radius))
    ratio = lhs / rhs if rhs > 0 else 0.0
    return lhs, rhs, ratio


def trace_check(target_sec, sections, f_fn, grad_fn):
    """Trace-type control of f on a section by the surrounding shell.

    ``sections`` lists SphereSections of the same cone family at the same t
    whose radii fall in [r/4, r] for the target_sec radius r, ordered by u.
    ``f_fn(X)`` and ``grad_fn(X)`` sample the ambient test function and its
    spatial gradient.  Returns (lhs, rhs) of

        |f|^2_{L2(S)} <= |N(f)|_{L2(shell)} |f|_{L2(shell)} + |f|^2_{L2(shell)} / r
    """
    r = target_sec.radius
    fS = f_fn(target_sec.X)
    lhs = float(target_sec.quad(fS**2))

    us = np.array([s.u for s in sections])
    order = np.argsort(us)
    sections = [sections[i] for i in order]
    us = us[order]
    f2, nf2, fl2 = [], [], []
    for s in sections:
        fv = f_fn(s.X)
        gv = grad_fn(s.X)  # (..., 3) spatial gradient
        T = s.fol.T
        Nvec = s.L - T
        Nf = np.sum(Nvec[..., 1:] * gv, axis=-1)
        # measure on the slice: b sqrt(gamma) du dtheta dphi
        f2.append(s.ops.integrate(fv**2 * s.b * s.sqrtg))
        nf2.append(s.ops.integrate(Nf**2 * s.b * s.sqrtg))
        fl2.append(s.ops.integrate(np.abs(fv) ** 2 * s.b * s.sqrtg))
    f2 = np.trapezoid(np.array(f2), us) if len(us) > 1 else float(f2[0])
    nf2 = np.trapezoid(np.array(nf2), us) if len(us) > 1 else float(nf2[0])
    shell_f = np.sqrt(abs(f2))
    shell_nf = np.sqrt(abs(nf2))
    rhs = shell_nf * shell_f + shell_f**2 / r
    return lhs, float(rhs)
