"""Transport-route coefficients and focusing (blow-up) helpers."""

from __future__ import annotations

import numpy as np

from .direct import slice_curvature_pieces
from .fields import RicciCoefficientField

__all__ = [
    "transport_coefficients",
    "blowup_time_from_samples",
    "riccati_blowup_closed_form",
]


def transport_coefficients(sec) -> RicciCoefficientField:
    """Coefficients integrated along the generators, read off a section."""
    ex = sec.extras
    if "trchi_transport" not in ex:
        raise ValueError("section carries no transported fields; launch the "
                         "cone with transport=True")
    pieces = slice_curvature_pieces(sec)
    return RicciCoefficientField(
        trchi=ex["trchi_transport"],
        shear=ex["shear_transport"],
        torsion=ex["torsion_transport"],
        torsion_conj=-pieces["kbar_an"],
        kbar_nn=pieces["kbar_nn"],
        kbar_an=pieces["kbar_an"],
        k_an=pieces["k_an"],
        k_nn=pieces["k_nn"],
        b=sec.b,
        provenance="transport",
        meta={"N_n": pieces["N_n"]},
    )


def riccati_blowup_closed_form(c, trchi0, s_start):
    """Focusing time of d(trchi)/ds = -trchi^2/2 - c from constant c > 0."""
    om = np.sqrt(2.0 * c)
    return s_start + (2.0 / om) * (np.arctan(trchi0 / om) + np.pi / 2.0)


def blowup_time_from_samples(s, trchi, c, threshold=-25.0):
    """Refine the focusing time from samples entering the blow-up asymptote.

    Near the pole trchi = -2/tau + (c/3) tau + O(tau^3) with tau the
    remaining affine time; invert at the last sample below ``threshold``.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(trchi, dtype=float)
    idx = np.nonzero(y <= threshold)[0]
    if idx.size == 0:
        raise ValueError("no samples beyond the blow-up threshold")
    k = idx[0]
    yk, sk = y[k], s[k]
    # solve (c/3) tau^2 - yk tau - 2 = 0 for the positive root, stably
    a = c / 3.0
    disc = np.sqrt(yk**2 + 8.0 * a)
    tau = -2.0 / (0.5 * (yk - disc))
    return sk + tau
