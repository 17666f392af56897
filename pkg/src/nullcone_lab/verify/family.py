"""Cone families: the shared scaffolding for residual checks.

A family integrates, for each requested vertex time u, the cone at u and its
two u +/- du neighbors, storing snapshots on time clusters around every
analysis time so that outgoing (t-stencil) and transversal (u-stencil)
derivatives are both available.
"""

from __future__ import annotations

import numpy as np

from ..nullcone.axis import integrate_axis
from ..nullcone.bundle import launch_cone
from ..nullcone.directions import DirectionGrid
from ..surface_calc.section import section

__all__ = ["ConeFamily", "cluster_times"]


def cluster_times(t, delta, width=2):
    return [t + j * delta for j in range(-width, width + 1)]


class ConeFamily:
    def __init__(
        self,
        provider,
        u_values,
        analysis_times,
        n_theta=16,
        dt=2e-3,
        s0=1e-3,
        du=None,
        cluster_delta=None,
        cluster_width=2,
        axis_x0=(0.0, 0.0, 0.0),
        transport=True,
        axis_dt=None,
        source_override=None,
    ):
        self.provider = provider
        self.u_values = list(u_values)
        self.analysis_times = list(analysis_times)
        self.n_theta = n_theta
        self.dt = float(dt)
        self.s0 = float(s0)
        self.du = float(du) if du is not None else 4.0 * float(dt)
        self.cluster_delta = float(cluster_delta) if cluster_delta else float(dt)
        self.cluster_width = int(cluster_width)
        self.grid = DirectionGrid(n_theta)
        self.transport = transport

        t_end = max(
            t + 2 * self.cluster_width * self.cluster_delta
            for t in self.analysis_times
        )
        u_min = min(self.u_values) - 2.5 * self.du
        self.axis = integrate_axis(
            provider, (min(0.0, u_min), t_end + 2 * self.dt),
            x0=axis_x0, dt=axis_dt or max(self.dt, 1e-3),
        )

        # store two cluster widths so cluster-valued fields (the mass aspect)
        # can themselves be differenced in time
        snap_times = sorted(
            {
                tt
                for t in self.analysis_times
                for tt in cluster_times(t, self.cluster_delta, 2 * self.cluster_width)
            }
        )
        self.u_stencil_points = 5
        self.cones = {}
        for u in self.u_values:
            offs = (-2, -1, 0, 1, 2) if self.u_stencil_points == 5 else (-1, 0, 1)
            for uu in (u + j * self.du for j in offs):
                if uu in self.cones:
                    continue
                self.cones[uu] = launch_cone(
                    provider, self.axis, uu, self.grid, s0=self.s0, dt=self.dt,
                    t_end=t_end, snapshot_times=[t for t in snap_times if t > uu],
                    transport=transport, source_override=source_override,
                )
        self._sections = {}

    def section(self, u, t):
        key = (u, t)
        if key not in self._sections:
            self._sections[key] = section(self.cones[u], t)
        return self._sections[key]

    def t_cluster(self, u, t):
        return [
            self.section(u, tt)
            for tt in cluster_times(t, self.cluster_delta, self.cluster_width)
        ]

    def u_cluster(self, u, t):
        offs = (-2, -1, 0, 1, 2) if self.u_stencil_points == 5 else (-1, 0, 1)
        return [self.section(u + j * self.du, t) for j in offs]

    def per_field_clusters(self, u, t, fn):
        """Evaluate fn(section) over both clusters; returns (tsecs, usecs, ft, fu)."""
        tsecs = self.t_cluster(u, t)
        usecs = self.u_cluster(u, t)
        ft = [fn(s) for s in tsecs]
        fu = [fn(s) for s in usecs]
        return tsecs, usecs, ft, fu
