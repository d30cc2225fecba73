"""Computational domains: the polar sector for co-rotating vortices and the
disk window in the right half-plane for translating pairs.

Both grids are flat cell lists with centers ``x, y``, measures, a mirror
permutation for the reflection symmetry, and ``groups``: the rings (sector)
or columns (half-plane) inside which Steiner symmetrization acts.  Each group
lists its cells by increasing distance from the symmetry axis, positive side
first within each mirror pair.
"""
from __future__ import annotations

import numpy as np


def _symmetric_centers(half_width: float, n: int) -> np.ndarray:
    # build the positive half and mirror it so pairs are exact negatives
    step = 2.0 * half_width / n
    pos = (np.arange(n // 2) + 0.5) * step
    return np.concatenate([-pos[::-1], pos])


class CellGrid:
    kind = "cells"

    def __init__(self, x, y, measure, mirror, groups, cell_width):
        self.x = np.ascontiguousarray(x, dtype=float)
        self.y = np.ascontiguousarray(y, dtype=float)
        self.measure = np.ascontiguousarray(measure, dtype=float)
        self.mirror = np.ascontiguousarray(mirror, dtype=np.intp)
        self.groups = groups
        self.cell_width = float(cell_width)
        self.r2 = self.x * self.x + self.y * self.y
        for a in (self.x, self.y, self.measure, self.mirror, self.r2):
            a.setflags(write=False)

    @property
    def size(self) -> int:
        return self.x.size

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def equal_measure(self) -> bool:
        return bool(np.all(self.measure == self.measure[0]))


class SectorGrid(CellGrid):
    """Polar cells on r_range x (-theta_half, theta_half).

    Radial edges are uniform in r^2, so every cell has the same measure
    r_mid*dr*dtheta and cells are ordered by (r, theta).
    """

    kind = "sector"

    def __init__(self, N, r_edges, theta_half, nt):
        self.N = int(N)
        self.r_edges = np.asarray(r_edges, dtype=float)
        self.theta_half = float(theta_half)
        self.nr = self.r_edges.size - 1
        self.nt = int(nt)
        self.theta_edges = np.linspace(-theta_half, theta_half, nt + 1)
        self.r_centers = 0.5 * (self.r_edges[1:] + self.r_edges[:-1])
        self.theta_centers = _symmetric_centers(theta_half, nt)
        dth = 2.0 * theta_half / nt
        area = 0.5 * (self.r_edges[-1] ** 2 - self.r_edges[0] ** 2) * 2.0 * theta_half
        rr, tt = np.meshgrid(self.r_centers, self.theta_centers, indexing="ij")
        half = nt // 2
        x = rr * np.cos(np.abs(tt))
        y = rr * np.sin(np.abs(tt))
        y[:, :half] *= -1.0
        measure = np.full(rr.size, area / rr.size)
        idx = np.arange(rr.size).reshape(self.nr, nt)
        mirror = idx[:, ::-1].ravel()
        # ring cells by |theta|: positive side first in each pair
        order = np.empty(nt, dtype=np.intp)
        order[0::2] = np.arange(half, nt)
        order[1::2] = np.arange(half - 1, -1, -1)
        self.group_matrix = idx[:, order]
        self.r = rr.ravel()
        self.theta = tt.ravel()
        self.area = area
        width = max(np.max(np.diff(self.r_edges)), self.r_edges[-1] * dth)
        super().__init__(x.ravel(), y.ravel(), measure, mirror, list(self.group_matrix), width)


def build_sector_grid(N: int, nr: int, nt: int, r_range=(0.5, 1.5), theta_half=None) -> SectorGrid:
    """Sector grid with nr x nt equal-area cells.

    Defaults to the full sector 1/2 < r < 3/2, |theta| < pi/(2N); a smaller
    polar box (for refinement windows) is given by ``r_range``/``theta_half``.
    """
    if N < 2:
        raise ValueError("fold count N must be at least 2")
    if nr < 8 or nt < 8:
        raise ValueError("need nr, nt >= 8")
    if nt % 2:
        raise ValueError("angular cell count must be even for exact mirror pairing")
    r0, r1 = r_range
    if not 0 < r0 < r1:
        raise ValueError("invalid radial range")
    full = np.pi / (2 * N)
    theta_half = full if theta_half is None else min(float(theta_half), full)
    r_edges = np.sqrt(np.linspace(r0 * r0, r1 * r1, nr + 1))
    r_edges[0], r_edges[-1] = r0, r1
    return SectorGrid(N, r_edges, theta_half, nt)


def sector_window(N: int, center_radius: float, half_width: float, n: int) -> SectorGrid:
    """Refinement window: polar box of radial half-width ``half_width`` around
    (center_radius, 0), clipped to the sector, with n x n cells."""
    r0 = max(0.5, center_radius - half_width)
    r1 = min(1.5, center_radius + half_width)
    return build_sector_grid(N, n, n, (r0, r1), half_width / center_radius)


class HalfPlaneGrid(CellGrid):
    """Square cells of side h clipped to the disk B_{d/2}((d, 0))."""

    kind = "halfplane"

    def __init__(self, d, xc, half_width, n):
        self.d = float(d)
        self.center = (self.d, 0.0)
        self.radius = 0.5 * self.d
        self.h = 2.0 * half_width / n
        self.n = int(n)
        xs = xc - half_width + (np.arange(n) + 0.5) * self.h
        ys = _symmetric_centers(half_width, n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        keep = (X - self.d) ** 2 + Y**2 < self.radius**2
        full = np.arange(n * n).reshape(n, n)
        new_index = np.full(n * n, -1, dtype=np.intp)
        new_index[keep.ravel()] = np.arange(np.count_nonzero(keep))
        mirror = new_index[full[:, ::-1].ravel()[keep.ravel()]]
        half = n // 2
        order = np.empty(n, dtype=np.intp)
        order[0::2] = np.arange(half, n)
        order[1::2] = np.arange(half - 1, -1, -1)
        groups = []
        for i in range(n):
            col = new_index[full[i, order]]
            col = col[col >= 0]
            if col.size:
                groups.append(col)
        self.column = np.repeat(np.arange(n), n).reshape(n, n)[keep]
        super().__init__(X[keep], Y[keep], np.full(np.count_nonzero(keep), self.h**2), mirror, groups, self.h)

    def boundary_distance(self) -> np.ndarray:
        """Distance from each cell center to the circle |x - b1| = d/2."""
        return self.radius - np.hypot(self.x - self.d, self.y)


def build_halfplane_grid(d: float, n: int, center_x1=None, half_width=None) -> HalfPlaneGrid:
    """n x n square cells over the bounding box of B_{d/2}((d,0)), clipped to
    the disk.  A refinement window is a smaller box centered at
    (center_x1, 0) with the given half-width, still clipped to the disk."""
    if not d > 0:
        raise ValueError("d must be positive")
    if n < 16 or n % 2:
        raise ValueError("n must be even and at least 16")
    if center_x1 is None:
        center_x1, half_width = float(d), 0.5 * float(d)
    return HalfPlaneGrid(d, float(center_x1), float(half_width), n)
