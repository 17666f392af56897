"""Self-describing container for gridded metric fields.

Layout: a structured-text header (key: value lines, terminated by a line
containing only ``---``) followed by a flat little-endian float64 array of
shape [Nt, Nx, Ny, Nz, 10] holding the independent components H_ab in the
order (00, 01, 02, 03, 11, 12, 13, 22, 23, 33).

The reader returns a provider that evaluates jets by trigonometric
interpolation in space (exact for band-limited samples) and polynomial
stencil interpolation in time.
"""

from __future__ import annotations

import numpy as np

from .jet import MetricJet
from .providers import MetricProvider

__all__ = ["write_gridded_metric", "read_gridded_metric", "GriddedMetric",
           "sample_provider_to_grid", "COMPONENT_ORDER"]

COMPONENT_ORDER = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3),
                   (2, 2), (2, 3), (3, 3)]

MAGIC = "nullcone-lab gridded metric v1"


def write_gridded_metric(path, values, box, t_range):
    """values: (Nt, Nx, Ny, Nz, 10) float64 array."""
    values = np.ascontiguousarray(values, dtype="<f8")
    nt, nx, ny, nz, nc = values.shape
    if nc != 10:
        raise ValueError("last axis must hold the 10 independent components")
    with open(path, "wb") as fh:
        head = [
            MAGIC,
            f"dims: {nt} {nx} {ny} {nz} 10",
            f"box: {box[0]!r} {box[1]!r} {box[2]!r}",
            f"t_range: {t_range[0]!r} {t_range[1]!r}",
            "layout: little-endian float64, C order",
            "---",
        ]
        fh.write(("\n".join(head) + "\n").encode())
        fh.write(values.tobytes())


def read_gridded_metric(path):
    with open(path, "rb") as fh:
        header = []
        while True:
            line = fh.readline().decode().rstrip("\n")
            if line == "---":
                break
            header.append(line)
            if len(header) > 64:
                raise ValueError("malformed gridded-metric header")
        if not header or header[0] != MAGIC:
            raise ValueError("not a gridded metric container")
        meta = {}
        for line in header[1:]:
            if ":" in line:
                k, v = line.split(":", 1)
                meta[k.strip()] = v.strip()
        dims = tuple(int(x) for x in meta["dims"].split())
        box = tuple(float(x) for x in meta["box"].split())
        t0, t1 = (float(x) for x in meta["t_range"].split())
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(dims)
    return GriddedMetric(np.array(data), box, (t0, t1))


def sample_provider_to_grid(provider, nt, nx, box, t_range):
    """Sample any provider onto the container grid."""
    ax = [np.arange(nx) * (box[i] / nx) for i in range(3)]
    tt = np.linspace(t_range[0], t_range[1], nt)
    T, X, Y, Z = np.meshgrid(tt, *ax, indexing="ij")
    pts = np.stack([T, X, Y, Z], axis=-1)
    H = provider.values(pts)
    out = np.empty(H.shape[:-2] + (10,))
    for c, (a, b) in enumerate(COMPONENT_ORDER):
        out[..., c] = H[..., a, b]
    return out


class GriddedMetric(MetricProvider):
    """Provider backed by gridded samples.

    Spatial dependence is treated spectrally: the FFT coefficients give both
    interpolation and exact differentiation of the band-limited interpolant.
    Time dependence uses centered Lagrange stencils on the slice grid.
    """

    name = "gridded"

    def __init__(self, values, box, t_range, t_stencil=6):
        self.raw = values
        self.box = box
        self.t0, self.t1 = t_range
        self.nt = values.shape[0]
        self.dims = values.shape[1:4]
        self.t_domain = (self.t0, self.t1)
        self.t_stencil = t_stencil
        # spatial FFT per slice and component
        self.coef = np.fft.fftn(values, axes=(1, 2, 3)) / np.prod(self.dims)
        ks = [2.0 * np.pi * np.fft.fftfreq(n, d=L / n)
              for n, L in zip(self.dims, box)]
        self.kgrid = np.stack(np.meshgrid(*ks, indexing="ij"), axis=-1)

    def _slice_eval(self, it, x, derivs):
        """Evaluate slice it at points x (..., 3); returns value, dx, dxx."""
        phase = np.exp(1j * np.einsum("...i,klmi->...klm", x, self.kgrid))
        c = self.coef[it]  # (kx, ky, kz, 10)
        val = np.real(np.einsum("...klm,klmc->...c", phase, c))
        out = [val]
        if derivs >= 1:
            ik = 1j * self.kgrid
            d1 = np.real(
                np.einsum("...klm,klmi,klmc->...ic", phase, ik, c)
            )
            out.append(d1)
        if derivs >= 2:
            kk = -np.einsum("klmi,klmj->klmij", self.kgrid, self.kgrid)
            d2 = np.real(
                np.einsum("...klm,klmij,klmc->...ijc", phase, kk, c)
            )
            out.append(d2)
        return out

    def _t_weights(self, t, order_d):
        """Lagrange weights for value/derivative orders at time t."""
        m = min(self.t_stencil + 1, self.nt)
        dt = (self.t1 - self.t0) / max(self.nt - 1, 1)
        i0 = int(np.clip(round((t - self.t0) / dt) - m // 2, 0, self.nt - m))
        idx = np.arange(i0, i0 + m)
        ts = self.t0 + idx * dt
        V = np.vander(ts - t, increasing=True).T  # rows: powers
        rhs = np.zeros((3, m))
        rhs[0, 0] = 1.0
        if m > 1:
            rhs[1, 1] = 1.0
        if m > 2:
            rhs[2, 2] = 2.0
        w = np.linalg.solve(V, rhs[: min(3, m)].T).T
        return idx, w

    def jet(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        squeeze = points.ndim == 1
        base = points.shape[:-1]
        flat = points.reshape(-1, 4)
        H = np.zeros((len(flat), 4, 4))
        dH = np.zeros((len(flat), 4, 4, 4))
        d2H = np.zeros((len(flat), 4, 4, 4, 4))
        # group by time for shared stencils
        for t in np.unique(flat[:, 0]):
            selt = np.nonzero(flat[:, 0] == t)[0]
            idx, w = self._t_weights(t, 2)
            x = flat[selt, 1:]
            vals = np.zeros((len(selt), 10))
            d1 = np.zeros((len(selt), 3, 10))
            d2 = np.zeros((len(selt), 3, 3, 10))
            vt = np.zeros((len(selt), 10))
            vtt = np.zeros((len(selt), 10))
            vtx = np.zeros((len(selt), 3, 10))
            for j, it in enumerate(idx):
                v, g1, g2 = self._slice_eval(it, x, 2)
                vals += w[0, j] * v
                d1 += w[0, j] * g1
                d2 += w[0, j] * g2
                vt += w[1, j] * v
                vtt += w[2, j] * v
                vtx += w[1, j] * g1
            for c, (a, b) in enumerate(COMPONENT_ORDER):
                H[selt, a, b] = H[selt, b, a] = vals[:, c]
                dH[selt, 0, a, b] = dH[selt, 0, b, a] = vt[:, c]
                dH[selt, 1:, a, b] = dH[selt, 1:, b, a] = d1[..., c]
                d2H[selt, 0, 0, a, b] = d2H[selt, 0, 0, b, a] = vtt[:, c]
                d2H[selt, 0, 1:, a, b] = d2H[selt, 0, 1:, b, a] = vtx[..., c]
                d2H[selt, 1:, 0, a, b] = d2H[selt, 1:, 0, b, a] = vtx[..., c]
                d2H[selt, 1:, 1:, a, b] = d2H[selt, 1:, 1:, b, a] = d2[..., c]
        if squeeze and base == ():
            return MetricJet(H[0], dH[0], d2H[0])
        return MetricJet(
            H.reshape(base + (4, 4)), dH.reshape(base + (4, 4, 4)),
            d2H.reshape(base + (4, 4, 4, 4)),
        )
