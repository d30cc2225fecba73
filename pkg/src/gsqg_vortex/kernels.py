"""Green functions of (-Delta)^s in the plane, the N-fold rotation kernel, the
half-plane mirror kernel and the rotation-rate kernel kappa.

Potentials are evaluated directly (no cached tables) from the cells that carry
vorticity, in target chunks, so that refined windows with tens of thousands of
cells stay cheap when the support is a few thousand cells.  The singular
diagonal is replaced by the equal-area-disk mean of G_s.
"""
from __future__ import annotations

import numpy as np
from scipy.special import gamma

from .errors import SingularityError, UnsupportedError

_CHUNK = 2_000_000


def riesz_constant(s: float) -> float:
    """c_s = Gamma(1-s) / (2^{2s} pi Gamma(s)) for 1/2 <= s < 1."""
    if s >= 1:
        raise UnsupportedError("the Riesz constant is defined for s < 1")
    return float(gamma(1 - s) / (2 ** (2 * s) * np.pi * gamma(s)))


def _check_s(s: float) -> float:
    s = float(s)
    if not 0.5 <= s <= 1.0:
        raise ValueError(f"exponent s={s} outside [1/2, 1]")
    return s


def green_of_sq(s: float, d2):
    """G_s as a function of the squared distance (no singularity check)."""
    if s == 1.0:
        return np.log(d2) * (-1.0 / (4 * np.pi))
    return riesz_constant(s) * np.power(d2, s - 1.0)


def green_eval(s: float, z):
    """G_s(z) for displacements ``z`` (shape (..., 2)) or distances (scalar/1-d).

    (1/2pi) ln(1/|z|) for s=1 and c_s |z|^{2s-2} for s<1.
    """
    s = _check_s(s)
    z = np.asarray(z, dtype=float)
    d2 = np.sum(z * z, axis=-1) if z.ndim and z.shape[-1] == 2 else z * z
    if np.any(d2 == 0):
        raise SingularityError("G_s is singular at zero separation; use self_cell_value")
    return green_of_sq(s, d2)


def green_gradient_factor(s: float, d2):
    """g(d2) with grad G_s(z) = g(|z|^2) z."""
    if s == 1.0:
        return -1.0 / (2 * np.pi * d2)
    return riesz_constant(s) * (2 * s - 2) * np.power(d2, s - 2.0)


def self_cell_value(s: float, cell_measure):
    """Mean of G_s over the disk of area ``cell_measure`` centered at the singularity."""
    s = _check_s(s)
    m = np.asarray(cell_measure, dtype=float)
    if np.any(m <= 0):
        raise ValueError("cell measure must be positive")
    r = np.sqrt(m / np.pi)
    if s == 1.0:
        return np.log(1.0 / r) / (2 * np.pi) + 1.0 / (4 * np.pi)
    return riesz_constant(s) * r ** (2 * s - 2) / s


def _rotations(N: int):
    ang = 2 * np.pi * np.arange(N) / N
    c, s = np.cos(ang), np.sin(ang)
    c[0], s[0] = 1.0, 0.0
    return c, s


class KernelOperator:
    """Kernel bound to a grid.

    ``mode='rotation'`` sums G_s over the N rotated images of the source,
    ``mode='mirror'`` subtracts the image reflected across x1=0.
    """

    def __init__(self, s: float, grid=None, mode: str = "rotation", N: int | None = None):
        self.s = _check_s(s)
        if mode not in ("rotation", "mirror"):
            raise ValueError("mode must be 'rotation' or 'mirror'")
        self.mode = mode
        if mode == "rotation":
            if N is None:
                N = getattr(grid, "N", None)
            if N is None or int(N) < 1:
                raise ValueError("rotation mode needs a fold count N >= 1")
            self.N = int(N)
        else:
            self.N = None
        self.grid = grid
        self.c_s = riesz_constant(self.s) if self.s < 1 else 1.0 / (2 * np.pi)
        self._table = None

    # pointwise kernels -------------------------------------------------
    def _images(self, xs, ys):
        """Yield (image_x, image_y, is_direct) for the source images."""
        if self.mode == "mirror":
            yield xs, ys, True
            yield -xs, ys, False
            return
        c, s = _rotations(self.N)
        for k in range(self.N):
            yield c[k] * xs - s[k] * ys, s[k] * xs + c[k] * ys, k == 0

    def kernel(self, x, xp, self_measure=None):
        """Kernel at point pairs (broadcast over leading axes).

        Coincident pairs need ``self_measure`` for the self-cell value.
        """
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        x1, x2 = x[..., 0], x[..., 1]
        out = 0.0
        for ix, iy, direct in self._images(xp[..., 0], xp[..., 1]):
            d2 = (x1 - ix) ** 2 + (x2 - iy) ** 2
            zero = d2 == 0
            if np.any(zero):
                if not direct:
                    raise SingularityError("a kernel image coincides with the target point")
                if self_measure is None:
                    raise SingularityError("coincident points need a self-cell measure")
                val = green_of_sq(self.s, np.where(zero, 1.0, d2))
                val = np.where(zero, self_cell_value(self.s, self_measure), val)
            else:
                val = green_of_sq(self.s, d2)
            out = out + val if direct else (out + val if self.mode == "rotation" else out - val)
        return out

    # grid potentials ---------------------------------------------------
    def block(self, targets, sources) -> np.ndarray:
        """Kernel matrix between target and source cells, self-cell corrected."""
        g = self.grid
        t = np.asarray(targets, dtype=np.intp)
        sources = np.asarray(sources, dtype=np.intp)
        tx, ty = g.x[t][:, None], g.y[t][:, None]
        acc = np.zeros((t.size, sources.size))
        for ix, iy, direct in self._images(g.x[sources], g.y[sources]):
            d2 = (tx - ix) ** 2 + (ty - iy) ** 2
            if direct:
                same = t[:, None] == sources[None, :]
                d2[same] = 1.0
                val = green_of_sq(self.s, d2)
                if np.any(same):
                    selfv = np.broadcast_to(self_cell_value(self.s, g.measure[sources]), same.shape)
                    val[same] = selfv[same]
                acc += val
            else:
                if np.any(d2 == 0):
                    raise SingularityError("a kernel image coincides with a grid cell")
                if self.mode == "rotation":
                    acc += green_of_sq(self.s, d2)
                else:
                    acc -= green_of_sq(self.s, d2)
        return acc

    def potential(self, sources, weights, targets=None) -> np.ndarray:
        """sum_j K(x_i, x_j) w_j over the given source cells (w_j = omega_j m_j)."""
        sources = np.asarray(sources, dtype=np.intp)
        weights = np.asarray(weights, dtype=float)
        tidx = np.arange(self.grid.size) if targets is None else np.asarray(targets, dtype=np.intp)
        out = np.zeros(tidx.size)
        if sources.size == 0:
            return out
        step = max(1, _CHUNK // sources.size)
        for a in range(0, tidx.size, step):
            out[a : a + step] = self.block(tidx[a : a + step], sources) @ weights
        return out

    def induced_potential(self, values) -> np.ndarray:
        values = getattr(values, "values", values)
        src = np.flatnonzero(values)
        return self.potential(src, values[src] * self.grid.measure[src])

    def table(self) -> np.ndarray:
        """Dense symmetric kernel matrix on the grid (small grids only)."""
        if self._table is None:
            g = self.grid
            if g.size > 6000:
                raise MemoryError("dense kernel table limited to 6000 cells")
            idx = np.arange(g.size)
            K = self.block(idx, idx)
            K = 0.5 * (K + K.T)
            K.setflags(write=False)
            self._table = K
        return self._table

    def energy(self, values) -> float:
        """(1/2) sum_ij K_ij q_i q_j with q = omega*m."""
        values = getattr(values, "values", values)
        q = values * self.grid.measure
        src = np.flatnonzero(q)
        psi = self.potential(src, q[src], targets=src)
        return 0.5 * float(q[src] @ psi)


def induced_potential(op: KernelOperator, omega) -> np.ndarray:
    return op.induced_potential(omega)


def rotation_kernel(op: KernelOperator, x, xp, self_measure=None):
    if op.mode != "rotation":
        raise ValueError("operator is not in rotation mode")
    return op.kernel(x, xp, self_measure)


def mirror_kernel(op: KernelOperator, x, xp, self_measure=None):
    if op.mode != "mirror":
        raise ValueError("operator is not in mirror mode")
    return op.kernel(x, xp, self_measure)


def _k1_polar(r, th, rp, thp, N, images_only=False):
    c, s = _rotations(N)
    out = 0.0
    for k in range(1 if images_only else 0, N):
        phi = th - thp - 2 * np.pi * k / N
        d2 = r * r + rp * rp - 2 * r * rp * np.cos(phi)
        out = out - np.log(d2) / (4 * np.pi)
    return out


def kappa_eval(x, xp, N: int, s: float = 1.0, step: float = 1e-5, images_only: bool = False):
    """kappa(x, x') = -(1/2)((1/r) d_r K_1 + (1/r') d_r' K_1) by central differences.

    ``images_only`` drops the direct (k=0) term; its isotropic cell average
    vanishes, which is how same-cell pairs are treated.
    """
    if s != 1.0:
        raise UnsupportedError("kappa is defined for the logarithmic kernel only")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    r, th = np.hypot(x[..., 0], x[..., 1]), np.arctan2(x[..., 1], x[..., 0])
    rp, thp = np.hypot(xp[..., 0], xp[..., 1]), np.arctan2(xp[..., 1], xp[..., 0])
    dr = (_k1_polar(r + step, th, rp, thp, N, images_only) - _k1_polar(r - step, th, rp, thp, N, images_only)) / (2 * step)
    drp = (_k1_polar(r, th, rp + step, thp, N, images_only) - _k1_polar(r, th, rp - step, thp, N, images_only)) / (2 * step)
    return -0.5 * (dr / r + drp / rp)
