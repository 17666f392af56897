"""Connection coefficients computed directly from section geometry."""

from __future__ import annotations

import numpy as np

from ..errors import StencilUnavailableError
from ..util import ein
from .fields import RicciCoefficientField

__all__ = [
    "slice_curvature_pieces",
    "chi_direct",
    "chibar_direct",
    "eta_direct",
    "direct_coefficients",
    "chi_from_evolution",
    "grad_metric_norm",
]


def slice_curvature_pieces(sec):
    """k_NN, k_AN, N(n), e_A(n) and the lapse-corrected combinations."""
    N4 = sec.L - sec.fol.T
    Ni = N4[..., 1:]
    kN = np.matmul(sec.fol.k, Ni[..., :, None])[..., 0]
    k_nn = np.sum(Ni * kN, axis=-1)
    k_an = np.matmul(sec.eA[..., 1:], kN[..., :, None])[..., 0]
    dns = sec.dn[..., 1:]
    Nn = np.sum(Ni * dns, axis=-1)
    An = np.matmul(sec.eA[..., 1:], dns[..., :, None])[..., 0]
    n = sec.fol.n
    return {
        "k_nn": k_nn,
        "k_an": k_an,
        "N_n": Nn,
        "A_n": An,
        "kbar_nn": k_nn - Nn / n,
        "kbar_an": k_an - An / n[..., None],
        "k_ab": ein("...ij,...Ai,...Bj->...AB", sec.fol.k, sec.eA[..., 1:], sec.eA[..., 1:]),
    }


def _split_second_form(chi):
    tr = chi[..., 0, 0] + chi[..., 1, 1]
    hat = 0.5 * (chi + np.swapaxes(chi, -1, -2))
    hat[..., 0, 0] -= 0.5 * tr
    hat[..., 1, 1] -= 0.5 * tr
    return tr, hat


def chi_direct(sec):
    """Null second fundamental form <D_A L, e_B>; returns (trchi, shear)."""
    DL = sec.cov_d_vector(sec.L)
    chi = ein("...Aa,...Ba->...AB", DL, sec.eA_low)
    return _split_second_form(chi)


def chibar_direct(sec):
    """Conjugate second form <D_A Lbar, e_B>; returns (trchibar, shearbar)."""
    DLb = sec.cov_d_vector(sec.Lbar)
    chib = ein("...Aa,...Ba->...AB", DLb, sec.eA_low)
    return _split_second_form(chib)


def eta_direct(sec, pieces=None):
    """Torsion 1-form from the null lapse: eta_A = b^-1 grad_A b + k_AN."""
    pieces = pieces or slice_curvature_pieces(sec)
    gradb = sec.grad_scalar(sec.b)
    return gradb / sec.b[..., None] + pieces["k_an"]


def direct_coefficients(sec) -> RicciCoefficientField:
    """All coefficients of the canonical null pair by direct contraction."""
    pieces = slice_curvature_pieces(sec)
    trchi, shear = chi_direct(sec)
    trchib, shearb = chibar_direct(sec)
    eta = eta_direct(sec, pieces)
    n = sec.fol.n
    torsion_conj = -pieces["kbar_an"]
    xibar = pieces["k_an"] + pieces["A_n"] / n[..., None] - eta
    return RicciCoefficientField(
        trchi=trchi, shear=shear, torsion=eta, torsion_conj=torsion_conj,
        xibar=xibar, kbar_nn=pieces["kbar_nn"], kbar_an=pieces["kbar_an"],
        k_an=pieces["k_an"], k_nn=pieces["k_nn"], b=sec.b,
        trchibar=trchib, shearbar=shearb, provenance="direct",
        meta={"k_ab": pieces["k_ab"], "N_n": pieces["N_n"]},
    )


def chi_from_evolution(sections):
    """Expansion and shear from the time derivative of the chart metric.

    ``sections`` is an odd-length, uniformly spaced time cluster of sections
    of the same cone (same generators); the null second form is half the
    n-scaled time derivative of gamma_ab in generator-following coordinates,
    evaluated at the center section.
    """
    m = len(sections)
    if m < 3 or m % 2 == 0:
        raise StencilUnavailableError("need an odd cluster of >= 3 sections")
    ts = np.array([s.t for s in sections])
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
    dgamma = sum(c * sections[i].gamma_chart for c, i in zip(coef, idx))
    sec = sections[mid]
    chi_chart = dgamma / (2.0 * sec.fol.n)[..., None, None]
    chi = ein("...Aa,...Bb,...ab->...AB", sec.cA, sec.cA, chi_chart)
    return _split_second_form(chi)


def grad_metric_norm(sec):
    """Pointwise coordinate norm max |d_g H_ab| on the section."""
    return np.max(np.abs(sec.jet.dH), axis=(-3, -2, -1))
