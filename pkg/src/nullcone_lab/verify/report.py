"""Residual and scaling-fit records with deterministic CSV output."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ResidualReport", "ScalingFit", "write_residual_csv", "write_scaling_csv",
           "residual_from_fields"]

RESIDUAL_COLUMNS = [
    "equation_id", "lambda", "u", "t", "N", "dt",
    "residual_sup", "residual_l2", "lhs_mag", "rhs_mag", "tol", "pass",
]
SCALING_COLUMNS = ["quantity", "slope", "ci_lo", "ci_hi", "theory_slope", "n_points"]


@dataclass
class ResidualReport:
    equation_id: str
    residual_sup: float
    residual_l2: float
    lhs_mag: float
    rhs_mag: float
    tol: float = np.inf
    u: float = 0.0
    t: float = 0.0
    N: int = 0
    dt: float = 0.0
    lam: float = 0.0
    meta: dict = field(default_factory=dict)
    flags: tuple = ()

    @property
    def passed(self):
        return bool(self.residual_sup <= self.tol)

    def row(self):
        return [
            self.equation_id, repr(self.lam), repr(self.u), repr(self.t),
            str(self.N), repr(self.dt), repr(self.residual_sup),
            repr(self.residual_l2), repr(self.lhs_mag), repr(self.rhs_mag),
            repr(self.tol), str(int(self.passed)),
        ]

    def __str__(self):
        status = "pass" if self.passed else ("FAIL" if np.isfinite(self.tol) else "info")
        return (f"[{status}] {self.equation_id}: sup={self.residual_sup:.3e} "
                f"l2={self.residual_l2:.3e} (|lhs|={self.lhs_mag:.3e}, "
                f"|rhs|={self.rhs_mag:.3e})")


def residual_from_fields(eq_id, sec, lhs, rhs, tol=np.inf, lam=0.0, dt=0.0, **meta):
    """Build a report from LHS/RHS node fields on a section."""
    res = lhs - rhs
    lastax = tuple(range(2, res.ndim))
    mag = np.abs(res) if res.ndim == 2 else np.sqrt(np.sum(res**2, axis=lastax))
    lmag = np.abs(lhs) if lhs.ndim == 2 else np.sqrt(np.sum(lhs**2, axis=lastax))
    rmag = np.abs(rhs) if rhs.ndim == 2 else np.sqrt(np.sum(rhs**2, axis=lastax))
    l2 = float(np.sqrt(sec.quad(mag**2) / sec.area))
    flags = ("underresolved",) if sec.underresolved(mag) else ()
    return ResidualReport(
        equation_id=eq_id, residual_sup=float(np.max(mag)), residual_l2=l2,
        lhs_mag=float(np.max(lmag)), rhs_mag=float(np.max(rmag)), tol=tol,
        u=sec.u, t=sec.t, N=sec.ops.n_theta, dt=dt, lam=lam, meta=dict(meta),
        flags=flags,
    )


@dataclass
class ScalingFit:
    quantity: str
    lams: list
    values: list
    slope: float
    ci: float
    theory_slope: float | None = None

    def row(self):
        lo, hi = self.slope - self.ci, self.slope + self.ci
        th = "" if self.theory_slope is None else repr(self.theory_slope)
        return [self.quantity, repr(self.slope), repr(lo), repr(hi), th,
                str(len(self.lams))]

    def __str__(self):
        th = "" if self.theory_slope is None else f" (theory {self.theory_slope:+.3f})"
        return (f"{self.quantity}: slope {self.slope:+.3f} +- {self.ci:.3f}"
                f"{th} over {len(self.lams)} dyadics")


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_residual_csv(path, reports):
    _write_csv(path, RESIDUAL_COLUMNS, [r.row() for r in reports])


def write_scaling_csv(path, fits):
    _write_csv(path, SCALING_COLUMNS, [f.row() for f in fits])
