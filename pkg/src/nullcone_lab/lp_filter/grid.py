"""Periodic grid fields and FFT-based dyadic projections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UnderResolvedError
from .cutoff import DyadicCutoff

__all__ = ["GridField", "project_below", "band_project", "spectral_energy"]


def _is_pow2(n):
    return n >= 2 and (n & (n - 1)) == 0


@dataclass
class GridField:
    """Real scalar samples on a periodic spatial grid (leading axes free).

    ``values`` has shape (..., Nx, Ny, Nz); ``box`` holds the three periods.
    Spatial frequencies are angular: xi = 2 pi k / L.
    """

    values: np.ndarray
    box: tuple[float, float, float] = (2.0 * np.pi,) * 3

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        dims = self.values.shape[-3:]
        if len(self.values.shape) < 3 or not all(_is_pow2(n) for n in dims):
            raise ValueError("grid dims must be powers of two")

    @property
    def dims(self):
        return self.values.shape[-3:]

    def freq_grids(self):
        """Angular frequency along each axis, rfft layout on the last axis."""
        nx, ny, nz = self.dims
        fx = 2.0 * np.pi * np.fft.fftfreq(nx, d=self.box[0] / nx)
        fy = 2.0 * np.pi * np.fft.fftfreq(ny, d=self.box[1] / ny)
        fz = 2.0 * np.pi * np.fft.rfftfreq(nz, d=self.box[2] / nz)
        return fx, fy, fz

    def freq_magnitude(self):
        fx, fy, fz = self.freq_grids()
        return np.sqrt(
            fx[:, None, None] ** 2 + fy[None, :, None] ** 2 + fz[None, None, :] ** 2
        )

    def nyquist(self):
        return min(
            np.pi * n / L for n, L in zip(self.dims, self.box)
        )

    def fft(self):
        return np.fft.rfftn(self.values, axes=(-3, -2, -1))

    def with_values(self, values):
        return GridField(values, self.box)


def _apply_multiplier(field: GridField, mult) -> GridField:
    spec = field.fft() * mult
    vals = np.fft.irfftn(spec, s=field.dims, axes=(-3, -2, -1))
    return field.with_values(vals)


def project_below(field: GridField, lam, cutoff: DyadicCutoff | None = None) -> GridField:
    """Low-pass dyadic projection P_{<lam} applied per slice."""
    if lam <= 0 or 2.0 ** round(np.log2(lam)) != lam:
        raise ValueError(f"lam must be a positive dyadic, got {lam}")
    if field.nyquist() <= 2.0 * lam:
        raise UnderResolvedError(
            f"under-resolved cutoff: Nyquist {field.nyquist():.3g} <= 2*lam = {2*lam:.3g}"
        )
    cutoff = cutoff or DyadicCutoff()
    return _apply_multiplier(field, cutoff.below_multiplier(field.freq_magnitude(), lam))


def band_project(field: GridField, mu, cutoff: DyadicCutoff | None = None) -> GridField:
    """Dyadic band projection P_mu applied per slice."""
    cutoff = cutoff or DyadicCutoff()
    return _apply_multiplier(field, cutoff.band_multiplier(field.freq_magnitude(), mu))


def spectral_energy(field: GridField):
    """Mean-square field value (Parseval-comparable grid energy)."""
    return float(np.mean(field.values**2))
