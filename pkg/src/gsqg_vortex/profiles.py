"""Reference vorticity profiles, their epsilon scalings and radial rearrangements.

A profile is a nonnegative radial density of unit mass supported on the unit
disk.  Profiles are realized on grids by cell-center sampling followed by a
single mass renormalization, which fixes the discrete rearrangement class as a
finite multiset of cell values.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ResolutionError

MIN_SUPPORT_CELLS = 50


def _shell_mass(radii: np.ndarray, values: np.ndarray) -> float:
    """Exact integral of 2*pi*r*f(r) for piecewise-linear f on the given knots."""
    a, b = radii[:-1], radii[1:]
    fa, fb = values[:-1], values[1:]
    # f(r)*r is quadratic on each segment so Simpson's rule is exact
    mid = 0.5 * (a + b)
    fm = 0.5 * (fa + fb)
    return float(2 * np.pi * np.sum((b - a) / 6.0 * (fa * a + 4 * fm * mid + fb * b)))


@dataclass(frozen=True, eq=False)
class Profile:
    """Radial profile xi(|x|) with unit mass and support in the closed unit disk.

    ``kind`` is one of ``patch``, ``parabolic`` or ``tabulated``.  Tabulated
    profiles are piecewise linear between ``radii`` knots and vanish beyond the
    last knot.
    """

    kind: str
    radii: np.ndarray | None = None
    values: np.ndarray | None = None
    name: str = ""

    def __call__(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        if self.kind == "patch":
            return np.where(r < 1.0, 1.0 / np.pi, 0.0)
        if self.kind == "parabolic":
            return np.where(r < 1.0, (2.0 / np.pi) * (1.0 - r * r), 0.0)
        inside = r < self.radii[-1]
        out = np.interp(r, self.radii, self.values)
        return np.where(inside, out, 0.0)

    @property
    def support_radius(self) -> float:
        if self.kind in ("patch", "parabolic"):
            return 1.0
        pos = np.flatnonzero(self.values > 0)
        if pos.size == 0:
            return 0.0
        last = pos[-1]
        return float(self.radii[min(last + 1, self.radii.size - 1)])

    @property
    def mass(self) -> float:
        if self.kind in ("patch", "parabolic"):
            return 1.0
        return _shell_mass(self.radii, self.values)

    @property
    def support_measure(self) -> float:
        return np.pi * self.support_radius**2

    @property
    def second_moment(self) -> float:
        """Integral of |x|^2 xi(x), used to place profiles at prescribed momentum."""
        if self.kind == "patch":
            return 0.5
        if self.kind == "parabolic":
            return 1.0 / 3.0
        r = np.linspace(0.0, self.radii[-1], 20001)
        f = self(r) * r**3 * 2 * np.pi
        return float(np.trapezoid(f, r))

    def is_nonincreasing(self) -> bool:
        if self.kind in ("patch", "parabolic"):
            return True
        return bool(np.all(np.diff(self.values) <= 0))


def make_patch_profile() -> Profile:
    """Uniform patch (1/pi) on the unit disk."""
    return Profile("patch", name="patch")


def make_parabolic_profile() -> Profile:
    """(2/pi)(1 - |x|^2) on the unit disk."""
    return Profile("parabolic", name="parabolic")


def make_tabulated_profile(radii, values, normalize: bool = True, name: str = "tabulated") -> Profile:
    """Piecewise-linear radial profile from knots.

    With ``normalize`` the radii are rescaled so the support is the unit disk
    and the values are rescaled to unit mass.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if radii.ndim != 1 or radii.shape != values.shape or radii.size < 2:
        raise ValueError("radii and values must be 1-d arrays of equal length >= 2")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("tabulated radii must be strictly increasing")
    if radii[0] < 0 or np.any(values < 0):
        raise ValueError("tabulated profile needs nonnegative radii and values")
    if not np.any(values > 0):
        raise ValueError("tabulated profile is identically zero")
    if radii[0] > 0:
        radii = np.concatenate([[0.0], radii])
        values = np.concatenate([[values[0]], values])
    prof = Profile("tabulated", radii, values, name)
    if normalize:
        rs = prof.support_radius
        keep = radii <= rs
        radii, values = radii[keep] / rs, values[keep] * rs**2
        values = values / _shell_mass(radii, values)
        prof = Profile("tabulated", radii, values, name)
    return prof


def load_tabulated_profile(path, normalize: bool = True) -> Profile:
    """Read a two-column CSV (radius, value); a non-numeric header row is skipped."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows:
                    raise
                continue  # header
    if not rows:
        raise ValueError(f"no numeric rows in {path}")
    arr = np.array(rows)
    return make_tabulated_profile(arr[:, 0], arr[:, 1], normalize=normalize, name=str(path))


@dataclass(frozen=True, eq=False)
class ScaledProfile:
    """xi_eps(x) = eps^-2 xi(x/eps), realized on grids by cell-center sampling."""

    base: Profile
    eps: float
    min_cells: int = field(default=MIN_SUPPORT_CELLS)

    def __call__(self, r):
        return self.base(np.asarray(r, dtype=float) / self.eps) / self.eps**2

    def sample(self, grid, center=(0.0, 0.0)) -> np.ndarray:
        """Unit-mass cell values of the profile centered at ``center``."""
        dx = grid.x - center[0]
        dy = grid.y - center[1]
        vals = self(np.sqrt(dx * dx + dy * dy))
        ncell = int(np.count_nonzero(vals > 0))
        if ncell < self.min_cells:
            raise ResolutionError(
                f"eps={self.eps} places {ncell} cells in the support, need at least {self.min_cells}"
            )
        return vals / float(np.sum(vals * grid.measure))

    def realize(self, grid, center=(0.0, 0.0)):
        from .rearrange import VorticityField

        return VorticityField(grid, self.sample(grid, center))


def scale_profile(p: Profile, eps: float, min_cells: int = MIN_SUPPORT_CELLS) -> ScaledProfile:
    if not eps > 0:
        raise ValueError("eps must be positive")
    return ScaledProfile(p, float(eps), min_cells)


def _profile_rearrangement(p: Profile, nsample: int = 40001) -> Profile:
    if p.is_nonincreasing():
        return p
    r = np.linspace(0.0, p.radii[-1], nsample)
    mid = 0.5 * (r[1:] + r[:-1])
    area = np.pi * np.diff(r * r)
    vals = p(mid)
    order = np.argsort(-vals, kind="stable")
    cum = np.concatenate([[0.0], np.cumsum(area[order])])
    rho = np.sqrt(cum / np.pi)
    sorted_vals = vals[order]
    knots = 0.5 * (rho[1:] + rho[:-1])
    knots = np.concatenate([[0.0], knots, [rho[-1]]])
    kv = np.concatenate([[sorted_vals[0]], sorted_vals, [sorted_vals[-1]]])
    keep = np.concatenate([[True], np.diff(knots) > 0])
    return make_tabulated_profile(knots[keep], kv[keep], normalize=True, name=p.name + "*")


def radial_rearrangement(p, center=(0.0, 0.0)):
    """Radially symmetric nonincreasing rearrangement.

    For a Profile this returns a Profile equimeasurable with it.  For a field
    on a grid it returns a field on the same grid with the sorted values
    assigned to cells in order of distance from ``center`` (ties by index).
    """
    if isinstance(p, Profile):
        return _profile_rearrangement(p)
    grid = p.grid
    d2 = (grid.x - center[0]) ** 2 + (grid.y - center[1]) ** 2
    order = np.argsort(d2, kind="stable")
    out = np.empty_like(p.values)
    out[order] = np.sort(p.values)[::-1]
    return p.with_values(out)


def resolve_profile(source) -> Profile:
    """Profile from a name ('patch', 'parabolic'), a CSV path, or a Profile."""
    if isinstance(source, Profile):
        return source
    if source == "patch":
        return make_patch_profile()
    if source == "parabolic":
        return make_parabolic_profile()
    return load_tabulated_profile(source)
