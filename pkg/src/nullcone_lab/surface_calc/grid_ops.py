"""Differential and quadrature operators on the equiangular sphere grid.

Grid layout: fields are arrays of shape (N_theta, N_phi, ...) on the pole-free
grid theta_i = pi (i + 1/2) / N, phi_j = 2 pi j / N_phi with N_phi = 2 N.

Derivatives in phi are spectral (FFT).  Derivatives in theta use high-order
centered stencils on the doubled grid obtained by continuing every field
across the poles: the point (theta, phi) with theta in (pi, 2 pi) is the
physical point (2 pi - theta, phi + pi), so a single-valued field continues
smoothly and the extended grid is exactly periodic.  Chart-based components
pick up a sign under the continuation, passed as ``parity``.

The quadrature is exact for integrands of the form sin(theta) q(theta) with
q a cosine polynomial below the grid resolution: the weights divide out
sin(theta) (the grid has no poles), take a discrete cosine transform and
integrate the cosine modes in closed form.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SphereOps", "stencil_weights"]


def stencil_weights(order):
    """Centered first-derivative weights of the given (even) order."""
    half = order // 2
    offsets = np.arange(-half, half + 1)
    # solve Vandermonde system for the first-derivative rule
    A = np.vander(offsets, increasing=True).T.astype(float)
    rhs = np.zeros(order + 1)
    rhs[1] = 1.0
    return offsets, np.linalg.solve(A, rhs)


class SphereOps:
    """Cached operators for one grid resolution."""

    _cache: dict = {}

    def __new__(cls, n_theta, theta_order=8):
        key = (int(n_theta), int(theta_order))
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj._init(*key)
            cls._cache[key] = obj
        return cls._cache[key]

    def _init(self, n_theta, theta_order):
        self.n_theta = n_theta
        self.n_phi = 2 * n_theta
        self.theta_order = theta_order
        self.h = np.pi / n_theta
        self.theta = (np.arange(n_theta) + 0.5) * self.h
        self.phi = np.arange(self.n_phi) * 2.0 * np.pi / self.n_phi
        self.offsets, w = stencil_weights(theta_order)
        self.stencil = w / self.h
        self.kphi = np.fft.rfftfreq(self.n_phi, d=1.0 / self.n_phi)
        self._theta_weights = self._build_theta_weights()

    def _build_theta_weights(self):
        N = self.n_theta
        k = np.arange(N)
        # closed-form integrals of cos(k theta) sin(theta) over (0, pi)
        Wk = np.zeros(N)
        for kk in k:
            if kk == 1:
                Wk[kk] = 0.0
            else:
                Wk[kk] = (1.0 + np.cos(kk * np.pi)) / (1.0 - kk**2)
        cos_mat = np.cos(np.outer(k, self.theta))          # (k, i)
        coeff = np.full(N, 2.0 / N)
        coeff[0] = 1.0 / N
        return (coeff[:, None] * cos_mat * Wk[:, None]).sum(axis=0) / np.sin(self.theta)

    # ------------------------------------------------------------------
    def extend(self, F, parity=1):
        """Continue a field across the poles onto the doubled theta grid."""
        tail = np.roll(F[::-1, ...], self.n_phi // 2, axis=1)
        if parity == -1:
            tail = -tail
        return np.concatenate([F, tail], axis=0)

    def dtheta(self, F, parity=1):
        """d/dtheta via centered stencils on the pole-extended grid."""
        G = self.extend(np.asarray(F, dtype=float), parity)
        out = np.zeros_like(G)
        for off, w in zip(self.offsets, self.stencil):
            if w == 0.0:
                continue
            out += w * np.roll(G, -int(off), axis=0)
        return out[: self.n_theta]

    def dphi(self, F):
        """d/dphi, spectral."""
        F = np.asarray(F, dtype=float)
        spec = np.fft.rfft(F, axis=1)
        shape = [1] * spec.ndim
        shape[1] = spec.shape[1]
        spec *= (1j * self.kphi).reshape(shape)
        return np.fft.irfft(spec, n=self.n_phi, axis=1)

    def fold(self, G, parity=1):
        """Exact transpose of :meth:`extend`: fold the doubled grid back."""
        head = G[: self.n_theta]
        tail = np.roll(G[self.n_theta:], -(self.n_phi // 2), axis=1)[::-1, ...]
        return head + (tail if parity == 1 else -tail)

    def dtheta_T(self, F, parity=1):
        """Exact discrete transpose of dtheta(. , parity) in the plain dot."""
        G = np.concatenate([np.asarray(F, dtype=float),
                            np.zeros_like(F)], axis=0)
        out = np.zeros_like(G)
        for off, w in zip(self.offsets, self.stencil):
            if w == 0.0:
                continue
            out += w * np.roll(G, int(off), axis=0)
        return self.fold(out, parity)

    # ------------------------------------------------------------------
    def integrate(self, F):
        """Integral over the sphere chart of F, for F = (area element) x field."""
        F = np.asarray(F)
        wt = self._theta_weights.reshape((self.n_theta,) + (1,) * (F.ndim - 1))
        return (2.0 * np.pi / self.n_phi) * np.sum(F * wt, axis=(0, 1))

    def phi_spectral_tail(self, F, frac=0.25):
        """Energy fraction in the top ``frac`` band of phi frequencies."""
        spec = np.abs(np.fft.rfft(np.asarray(F, dtype=float), axis=1)) ** 2
        total = spec.sum()
        if total == 0.0:
            return 0.0
        cut = int((1.0 - frac) * spec.shape[1])
        return float(spec[:, cut:].sum() / total)
