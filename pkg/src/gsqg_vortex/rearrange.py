"""Rearrangement primitives on grids: bathtub maximization of a linear
functional, Steiner symmetrization inside rings/columns, and the bathtub step
under a momentum constraint solved by bisection on the multiplier.

All operations permute a fixed multiset of cell values.  On equal-measure
grids this keeps the rearrangement class and the total mass exact at once.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InfeasibleConstraintError


class VorticityField:
    """Cell values on a grid together with the canonical level multiset."""

    def __init__(self, grid, values, levels=None):
        self.grid = grid
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (grid.size,):
            raise ValueError("values must have one entry per grid cell")
        if np.any(self.values < 0):
            raise ValueError("vorticity values must be nonnegative")
        self.levels = np.sort(self.values)[::-1] if levels is None else np.asarray(levels, dtype=float)
        self.values.setflags(write=False)

    def with_values(self, values) -> "VorticityField":
        return VorticityField(self.grid, values, self.levels)

    @property
    def weights(self) -> np.ndarray:
        """omega_i * m_i."""
        return self.values * self.grid.measure

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values > 0)

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def momentum(self) -> float:
        """L = sum |x|^2 omega m."""
        return float(self.weights @ self.grid.r2)

    @property
    def impulse(self) -> float:
        """sum x1 omega m."""
        return float(self.weights @ self.grid.x)

    @property
    def centroid(self) -> np.ndarray:
        w = self.weights
        return np.array([w @ self.grid.x, w @ self.grid.y]) / w.sum()

    def in_class(self) -> bool:
        return bool(np.array_equal(np.sort(self.values)[::-1], self.levels))

    def is_mirror_symmetric(self) -> bool:
        return bool(np.array_equal(self.values, self.values[self.grid.mirror]))


def _levels_of(levels) -> np.ndarray:
    lv = getattr(levels, "levels", levels)
    return np.sort(np.asarray(lv, dtype=float))[::-1]


def bathtub_order(phi) -> np.ndarray:
    """Cell indices by decreasing phi, ties by ascending index."""
    return np.argsort(-np.asarray(phi, dtype=float), kind="stable")


def bathtub_rearrange(levels, phi, grid) -> VorticityField:
    """Largest levels on the cells with the largest phi.

    Maximizes sum omega_i phi_i m_i over all permutations of the levels when
    the cell measures are equal (rearrangement inequality).
    """
    lv = _levels_of(levels)
    if lv.size != grid.size:
        raise ValueError("level multiset size differs from grid size")
    out = np.empty(grid.size)
    out[bathtub_order(phi)] = lv
    return VorticityField(grid, out, lv)


def _group_symmetrize(values, grid) -> np.ndarray:
    out = np.array(values, dtype=float)
    gm = getattr(grid, "group_matrix", None)
    if gm is not None:
        out[gm] = -np.sort(-out[gm], axis=1)
        return out
    for g in grid.groups:
        out[g] = -np.sort(-out[g])
    return out


def angular_steiner(omega: VorticityField) -> VorticityField:
    """Within each ring, sort values so they are even in theta and nonincreasing in |theta|.

    Sorted values go alternately to the +theta and -theta cells of increasing
    |theta|, so rings whose multiset comes in pairs become exactly even.
    """
    return omega.with_values(_group_symmetrize(omega.values, omega.grid))


def column_steiner(omega: VorticityField) -> VorticityField:
    """Steiner symmetrization in x2 on a half-plane grid (column-wise)."""
    return omega.with_values(_group_symmetrize(omega.values, omega.grid))


class ConstrainedStep(NamedTuple):
    field: VorticityField
    alpha: float
    residual: float  # L(field) - target
    jump: float  # size of the L(alpha) step straddling the target
    evaluations: int


def constrained_rearrange(psi, levels, grid, target_L: float = 1.0, tol: float = 1e-6,
                          bracket=(-50.0, 50.0), max_iter: int = 200) -> ConstrainedStep:
    """Bathtub on psi + (alpha/2)|x|^2 with alpha chosen by bisection so that
    L = sum |x|^2 omega m meets ``target_L``.

    L(alpha) is a nondecreasing step function, so the search stops when the
    residual is within ``tol`` or the bracket has shrunk onto a jump; the
    bracket end with the smaller residual is returned.
    """
    lv = _levels_of(levels)
    psi = np.asarray(psi, dtype=float)
    r2 = grid.r2
    nz = np.flatnonzero(lv)
    top = lv[nz] * grid.measure[0] if grid.equal_measure else None
    count = [0]

    def L_of(alpha):
        count[0] += 1
        order = bathtub_order(psi + 0.5 * alpha * r2)
        if top is not None:
            return float(top @ r2[order[nz]])
        w = np.empty(grid.size)
        w[order] = lv
        return float((w * grid.measure) @ r2)

    lo, hi = map(float, bracket)
    Llo, Lhi = L_of(lo), L_of(hi)
    for _ in range(30):
        if Llo <= target_L <= Lhi:
            break
        width = hi - lo
        if Llo > target_L:
            lo -= width
            Llo = L_of(lo)
        if Lhi < target_L:
            hi += width
            Lhi = L_of(hi)
    else:
        raise InfeasibleConstraintError(
            f"momentum target {target_L} not bracketed: L in [{Llo}, {Lhi}] over alpha in [{lo}, {hi}]"
        )
    best = None
    for _ in range(max_iter):
        if abs(Llo - target_L) <= tol:
            best = lo
            break
        if abs(Lhi - target_L) <= tol:
            best = hi
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        Lm = L_of(mid)
        if Lm < target_L:
            lo, Llo = mid, Lm
        else:
            hi, Lhi = mid, Lm
    if best is None:
        best = lo if abs(Llo - target_L) <= abs(Lhi - target_L) else hi
    field = bathtub_rearrange(lv, psi + 0.5 * best * r2, grid)
    return ConstrainedStep(field, best, field.momentum - target_L, Lhi - Llo, count[0])


def admissible_alpha_interval(psi, field: VorticityField, alpha0: float, span: float = 1.0, iters: int = 60):
    """Interval of alpha for which the bathtub on psi + (alpha/2)|x|^2 reproduces ``field``.

    The reproducing set is an interval (intersection of half-lines, one per
    ordered cell pair), found by bisecting outward from ``alpha0``.  Returns
    (nan, nan) if alpha0 itself does not reproduce the field.
    """
    grid = field.grid
    psi = np.asarray(psi, dtype=float)

    def ok(a):
        order = bathtub_order(psi + 0.5 * a * grid.r2)
        out = np.empty(grid.size)
        out[order] = field.levels
        return np.array_equal(out, field.values)

    if not ok(alpha0):
        return float("nan"), float("nan")
    ends = []
    for sign in (-1.0, 1.0):
        inside, outside = alpha0, alpha0 + sign * span
        grow = 0
        while ok(outside) and grow < 20:
            inside, outside = outside, outside + sign * span * 2**grow
            grow += 1
        for _ in range(iters):
            mid = 0.5 * (inside + outside)
            if ok(mid):
                inside = mid
            else:
                outside = mid
        ends.append(inside)
    return ends[0], ends[1]
