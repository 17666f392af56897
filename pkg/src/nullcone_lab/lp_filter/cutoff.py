"""Dyadic radial cutoff profiles and the derived Fourier multipliers.

The dyadic band profile chi is supported in the annulus 1/2 <= rho <= 2 and
tiles frequency space: sum_mu chi(rho/mu) = 1 for every rho > 0, with mu
running over the dyadics.  Two profiles are provided:

* ``indicator`` (default): chi = 1 on (1/2, 1].  The partition, the low-pass
  telescoping sum and operator idempotence are then exact in floating point.
* ``smoothstep``: a C^4 polynomial ramp.  Same telescoping algebra, but the
  low-pass multiplier takes intermediate values on its transition band, so
  re-application is not the identity there.
"""

from __future__ import annotations

import numpy as np

__all__ = ["DyadicCutoff", "dyadic_range"]


def _smoothstep4(x):
    """C^4 monotone ramp on [0, 1] (9th-degree polynomial)."""
    x = np.clip(x, 0.0, 1.0)
    return x**5 * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + x * 70.0))))


def dyadic_range(lo, hi):
    """Dyadic values mu with lo <= mu <= hi (lo, hi powers of two)."""
    out = []
    mu = lo
    while mu <= hi * (1 + 1e-12):
        out.append(mu)
        mu *= 2.0
    return out


class DyadicCutoff:
    """Radial dyadic profile with telescoping low-pass sums."""

    def __init__(self, profile="indicator"):
        if profile not in ("indicator", "smoothstep"):
            raise ValueError(f"unknown cutoff profile {profile!r}")
        self.profile = profile

    # phi is the mother low-pass: 1 below rho=1, 0 above rho=2 for smoothstep,
    # 1 on rho <= 1 for the indicator.  chi(rho) = phi(rho) - phi(2 rho).
    def phi(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.profile == "indicator":
            return (rho <= 1.0).astype(float)
        return 1.0 - _smoothstep4(rho - 1.0)

    def chi(self, rho):
        """Band profile for the unit dyadic annulus."""
        return self.phi(rho) - self.phi(2.0 * rho)

    def band_multiplier(self, xi_mag, mu):
        """chi(|xi| / mu) on an array of frequency magnitudes."""
        return self.chi(np.asarray(xi_mag, dtype=float) / float(mu))

    def below_multiplier(self, xi_mag, lam):
        """Multiplier of P_{<lam} = sum of bands mu < lam/2 (plus the mean).

        The dyadic sum telescopes to phi(|xi| / (lam/4)); zero frequency is
        kept.
        """
        xi_mag = np.asarray(xi_mag, dtype=float)
        out = self.phi(4.0 * xi_mag / float(lam))
        return np.where(xi_mag == 0.0, 1.0, out)

    def partition_values(self, xi_mag, mu_lo=None, mu_hi=None):
        """sum_mu chi(|xi|/mu) over the dyadics covering the given magnitudes."""
        xi_mag = np.asarray(xi_mag, dtype=float)
        pos = xi_mag[xi_mag > 0]
        if pos.size == 0:
            return np.ones_like(xi_mag)
        if mu_lo is None:
            mu_lo = 2.0 ** np.floor(np.log2(pos.min() / 2.0) - 1)
        if mu_hi is None:
            mu_hi = 2.0 ** np.ceil(np.log2(pos.max() * 2.0) + 1)
        total = np.zeros_like(xi_mag)
        for mu in dyadic_range(mu_lo, mu_hi):
            total += self.chi(xi_mag / mu)
        return np.where(xi_mag == 0.0, 1.0, total)

    def export_csv(self, path, rho_max=4.0, num=2049):
        """Dump (rho, chi(rho)) samples for audit."""
        rho = np.linspace(0.0, rho_max, num)
        vals = self.chi(rho)
        with open(path, "w") as fh:
            fh.write("rho,chi\n")
            for r, v in zip(rho, vals):
                fh.write(f"{r!r},{v!r}\n")
