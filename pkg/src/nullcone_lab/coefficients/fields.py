"""Containers for the connection coefficients of the null frame."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RicciCoefficientField", "ThetaField"]


@dataclass
class RicciCoefficientField:
    """Connection coefficients on one section, tagged by provenance.

    ``trchi`` is the expansion, ``shear`` its trace-free part (2x2 frame
    components), ``torsion`` the 1-form coupling the null pair, and the
    conjugate/transversal pieces follow the slice extrinsic curvature.
    """

    trchi: np.ndarray
    shear: np.ndarray            # (..., 2, 2) trace-free symmetric
    torsion: np.ndarray          # (..., 2)
    torsion_conj: np.ndarray | None = None   # (..., 2) = -kbar_AN
    xibar: np.ndarray | None = None          # (..., 2)
    kbar_nn: np.ndarray | None = None
    kbar_an: np.ndarray | None = None
    k_an: np.ndarray | None = None
    k_nn: np.ndarray | None = None
    b: np.ndarray | None = None
    trchibar: np.ndarray | None = None
    shearbar: np.ndarray | None = None
    mu: np.ndarray | None = None
    mu_slash: np.ndarray | None = None
    provenance: str = "direct"
    meta: dict = field(default_factory=dict)

    def shear_norm2(self):
        return np.sum(self.shear**2, axis=(-2, -1))

    def torsion_norm(self):
        return np.sqrt(np.sum(self.torsion**2, axis=-1))


@dataclass
class ThetaField:
    """Pointwise deviation budget and its retrievable summands."""

    expansion_vs_r: np.ndarray
    expansion_vs_s: np.ndarray
    shear_mag: np.ndarray
    torsion_mag: np.ndarray
    grad_metric: np.ndarray
    mu_slash_mag: np.ndarray | None = None

    @property
    def total(self):
        out = (
            np.abs(self.expansion_vs_r)
            + np.abs(self.expansion_vs_s)
            + self.shear_mag
            + self.torsion_mag
            + self.grad_metric
        )
        if self.mu_slash_mag is not None:
            out = out + self.mu_slash_mag
        return out
