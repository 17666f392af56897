"""Microlocalized metric families: low-pass filter plus parabolic rescale.

Given a base metric g and a dyadic lam, the regularized family is

    H_lam(t, x) = (P_{<lam} g)(t / lam, x / lam),

with the projection acting on the spatial variables of g only.  Dyadic
perturbation bands are G^(mu)(t, x) = (P_{mu lam} g)(t/lam, x/lam).

For trig-polynomial metrics (all built-in synthetic and mode presets) the
filter acts exactly on the mode list, so the derived providers stay analytic
with exact jets.  A gridded route (FFT filtering of sampled slices) is kept
alongside for spectral measurements and for file-based metrics.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..spacetime.providers import MetricProvider, TrigMetric
from .cutoff import DyadicCutoff, dyadic_range
from .grid import GridField

__all__ = ["MicrolocalFamily", "microlocalize"]


def _filtered_trig(g: TrigMetric, mult_fn, name) -> TrigMetric:
    mags = np.linalg.norm(g.kvecs[:, 1:], axis=1)
    mult = mult_fn(mags)
    keep = np.abs(mult * g.amps) > 0.0
    if not np.any(keep):
        keep = np.zeros(0, dtype=bool)
        return TrigMetric(
            np.zeros((0, 4)), np.zeros(0), np.zeros((0, 4, 4)), np.zeros(0),
            name=name, base=g.base,
        )
    return TrigMetric(
        g.kvecs[keep], (g.amps * mult)[keep], g.patterns[keep], g.phases[keep],
        name=name, base=g.base,
    )


class MicrolocalFamily:
    """Low-passed, parabolically rescaled family derived from a base metric."""

    def __init__(self, g: MetricProvider, lam, cutoff: DyadicCutoff | None = None):
        if lam <= 0 or 2.0 ** round(np.log2(lam)) != lam:
            raise ValueError(f"lam must be a positive dyadic, got {lam}")
        self.g = g
        self.lam = float(lam)
        self.cutoff = cutoff or DyadicCutoff()
        if not isinstance(g, TrigMetric):
            raise TypeError(
                "analytic microlocalization needs a trig-polynomial base metric; "
                "use gridded filtering for other providers"
            )

    def provider(self) -> TrigMetric:
        """Analytic provider for H_lam with exact jets."""
        filtered = _filtered_trig(
            self.g,
            lambda m: self.cutoff.below_multiplier(m, self.lam),
            name=f"{self.g.name}_Hlam{int(self.lam)}",
        )
        return filtered.rescaled(1.0, 1.0 / self.lam, name=filtered.name)

    def band(self, mu) -> TrigMetric:
        """Analytic provider for the dyadic perturbation band G^(mu), mu >= 1/2."""
        if mu < 0.5 or 2.0 ** round(np.log2(mu)) != mu:
            raise ValueError(f"mu must be a dyadic >= 1/2, got {mu}")
        filtered = _filtered_trig(
            self.g,
            lambda m: self.cutoff.band_multiplier(m, mu * self.lam),
            name=f"{self.g.name}_G{mu:g}_lam{int(self.lam)}",
        )
        out = filtered.rescaled(1.0, 1.0 / self.lam, name=filtered.name)
        out.base = np.zeros((4, 4))  # bands are perturbations, no background
        return out

    def band_range(self):
        """Dyadic mu covering every mode of the base metric, starting at 1/2."""
        mags = np.linalg.norm(self.g.kvecs[:, 1:], axis=1)
        if mags.size == 0:
            return []
        hi_band = 2.0 ** np.ceil(np.log2(mags.max() / self.lam))
        return dyadic_range(0.5, max(0.5, hi_band))

    def component_slices(self, comp, tvals, n, rescaled=True):
        """Sample one metric component of H_lam on a periodic grid.

        Returns a GridField with leading time axis.  With ``rescaled=False``
        the unrescaled low-pass (P_{<lam} g) is sampled on the base box
        instead; useful for spectral-support measurements in g's variables.
        """
        a, b = comp
        prov = self.provider() if rescaled else _filtered_trig(
            self.g, lambda m: self.cutoff.below_multiplier(m, self.lam), name="tmp"
        )
        box = 2.0 * np.pi * (self.lam if rescaled else 1.0)
        ax = np.arange(n) * (box / n)
        tt = np.asarray(tvals, dtype=float)
        pts = np.zeros((len(tt), n, n, n, 4))
        pts[..., 0] = tt[:, None, None, None]
        pts[..., 1] = ax[None, :, None, None]
        pts[..., 2] = ax[None, None, :, None]
        pts[..., 3] = ax[None, None, None, :]
        vals = prov.values(pts)[..., a, b]
        return GridField(vals, (box, box, box))


def microlocalize(g: MetricProvider, lam, cutoff: DyadicCutoff | None = None,
                  t_end: float | None = None) -> MicrolocalFamily:
    """Build the microlocalized family for a dyadic lam."""
    if t_end is not None and g.t_domain is not None:
        lo, hi = g.t_domain
        if t_end / lam > hi or 0.0 < lo:
            raise DomainError("rescaled sample out of domain")
    return MicrolocalFamily(g, lam, cutoff)
