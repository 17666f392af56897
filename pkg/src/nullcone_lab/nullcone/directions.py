"""Equiangular direction grids on the sphere of outgoing directions.

The grid is (theta, phi) with shape (N, 2N): theta_i = pi (i + 1/2) / N
(half-cell offset, no exact poles) and phi_j = 2 pi j / (2N).
"""

from __future__ import annotations

import numpy as np

__all__ = ["DirectionGrid"]


class DirectionGrid:
    def __init__(self, n_theta=64):
        if n_theta < 4 or n_theta % 2:
            raise ValueError("n_theta must be an even integer >= 4")
        self.n_theta = int(n_theta)
        self.n_phi = 2 * self.n_theta
        self.theta = (np.arange(self.n_theta) + 0.5) * np.pi / self.n_theta
        self.phi = np.arange(self.n_phi) * 2.0 * np.pi / self.n_phi
        th = self.theta[:, None]
        ph = self.phi[None, :]
        st, ct = np.sin(th), np.cos(th)
        sp, cp = np.sin(ph), np.cos(ph)
        self.omega = np.stack(
            [st * cp, st * sp, np.broadcast_to(ct, (self.n_theta, self.n_phi))], axis=-1
        )
        # coordinate tangents of the parametrization (unnormalized)
        self.d_theta = np.stack(
            [ct * cp, ct * sp, np.broadcast_to(-st, (self.n_theta, self.n_phi))], axis=-1
        )
        self.d_phi = np.stack(
            [-st * sp, st * cp, np.zeros((self.n_theta, self.n_phi))], axis=-1
        )

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    @property
    def ngen(self):
        return self.n_theta * self.n_phi

    def flat(self, arr):
        """(N, 2N, ...) -> (ngen, ...)."""
        return np.reshape(arr, (self.ngen,) + arr.shape[2:])

    def unflat(self, arr):
        """(ngen, ...) -> (N, 2N, ...)."""
        return np.reshape(arr, self.shape + arr.shape[1:])

    def rotated_initial_tangents(self, angle=0.0):
        """Initial tangent pair, optionally rotated about the radial direction."""
        if angle == 0.0:
            return self.d_theta.copy(), self.d_phi.copy()
        c, s = np.cos(angle), np.sin(angle)
        st = np.sin(self.theta)[:, None, None]
        e1 = self.d_theta
        e2 = self.d_phi / np.where(st == 0.0, 1.0, st)
        return c * e1 + s * e2, -s * e1 + c * e2
