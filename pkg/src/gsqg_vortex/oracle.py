"""Desk-scale reference values: point-vortex equilibria, the Kirchhoff-Routh
function of a translating pair, and quadratures for the constants of the
leading energy and potential asymptotics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.signal import fftconvolve
from scipy.special import gamma

from .errors import UnsupportedError
from .kernels import green_eval, green_gradient_factor, green_of_sq, riesz_constant, self_cell_value


@dataclass(frozen=True)
class PointVortexSystem:
    """Point vortices with circulations driven by the kernel G_s."""

    positions: np.ndarray
    circulations: np.ndarray
    s: float = 1.0

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "circulations", np.asarray(self.circulations, dtype=float).reshape(-1))
        diff = pos[:, None, :] - pos[None, :, :]
        d2 = np.sum(diff**2, axis=-1)
        if np.any(d2[~np.eye(len(pos), dtype=bool)] == 0):
            raise ValueError("point vortex positions must be pairwise distinct")

    def velocity(self, x, exclude=None) -> np.ndarray:
        """Induced velocity (d2 psi, -d1 psi) at ``x``; positive circulation turns counterclockwise."""
        x = np.asarray(x, dtype=float)
        v = np.zeros(2)
        for j, (p, g) in enumerate(zip(self.positions, self.circulations)):
            if exclude is not None and j == exclude:
                continue
            z = x - p
            fac = green_gradient_factor(self.s, float(z @ z))
            grad = fac * z
            v += g * np.array([grad[1], -grad[0]])
        return v

    def self_velocity(self, j: int) -> np.ndarray:
        return self.velocity(self.positions[j], exclude=j)


def polygon(N: int, s: float = 1.0, radius: float = 1.0) -> PointVortexSystem:
    ang = 2 * np.pi * np.arange(N) / N
    pos = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return PointVortexSystem(pos, np.ones(N), s)


def polygon_angular_velocity(N: int, s: float = 1.0) -> float:
    """Rigid rotation rate of N unit point vortices on the unit circle,
    from the induced velocity at (1,0) (tangential component over radius)."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return float(polygon(N, s).self_velocity(0)[1])


def polygon_rate_formula(N: int, s: float) -> float:
    """The closed-form limit (N-1)/(4 pi) for s=1, and
    sum_k c_s (1-s) / |e1 - Q_k e1|^{2-2s} for s<1."""
    if s == 1.0:
        return (N - 1) / (4 * np.pi)
    ang = 2 * np.pi * np.arange(1, N) / N
    chord = np.hypot(1 - np.cos(ang), np.sin(ang))
    return float(np.sum(riesz_constant(s) * (1 - s) / chord ** (2 - 2 * s)))


def pair_distance(W: float, s: float) -> float:
    """Half-separation d of the translating pair moving with speed W."""
    if not W > 0:
        raise ValueError("W must be positive")
    return float((gamma(2 - s) / (4 * np.pi * W * gamma(s))) ** (1.0 / (3 - 2 * s)))


def pair_speed(d: float, s: float) -> float:
    if not d > 0:
        raise ValueError("d must be positive")
    return float(gamma(2 - s) / (4 * np.pi * gamma(s) * d ** (3 - 2 * s)))


def kirchhoff_routh(tau, W: float, s: float):
    """G_s(2 tau) + 2 W tau."""
    tau = np.asarray(tau, dtype=float)
    return green_eval(s, 2 * tau) + 2 * W * tau


def kirchhoff_routh_slope(tau, W: float, s: float):
    """d/dtau of the Kirchhoff-Routh function."""
    tau = np.asarray(tau, dtype=float)
    return 4 * tau * green_gradient_factor(s, 4 * tau * tau) + 2 * W


def kirchhoff_routh_minimizer(W: float, s: float, xtol: float = 1e-10) -> float:
    """Minimize the Kirchhoff-Routh function.

    A logarithmic scan supplies the bracket and golden-section search locates
    the minimum.  Function values are too flat near the minimum to resolve
    1e-10, so the result is polished by a root of the slope inside the
    golden-section bracket.
    """
    if not W > 0:
        raise ValueError("W must be positive")
    taus = np.logspace(-8, 8, 1601)
    vals = kirchhoff_routh(taus, W, s)
    k = int(np.clip(np.argmin(vals), 1, taus.size - 2))
    res = minimize_scalar(lambda t: float(kirchhoff_routh(t, W, s)), bracket=(taus[k - 1], taus[k], taus[k + 1]),
                          method="golden", tol=xtol)
    lo, hi = taus[k - 1], taus[k + 1]
    f = lambda t: float(kirchhoff_routh_slope(t, W, s))
    if f(lo) < 0 < f(hi):
        return float(brentq(f, lo, hi, xtol=xtol * res.x, rtol=4 * np.finfo(float).eps))
    return float(res.x)


# asymptotic constants ---------------------------------------------------

def _disk_density(profile, n: int, sub: int = 4):
    """Cell averages of the profile on an n x n grid whose centers run
    from -1 to 1 inclusive (so (1,0) is a cell center for odd n)."""
    h = 2.0 / (n - 1)
    c = -1.0 + h * np.arange(n)
    o = (np.arange(sub) + 0.5) / sub - 0.5
    X = c[:, None, None, None] + h * o[None, None, :, None]
    Y = c[None, :, None, None] + h * o[None, None, None, :]
    rho = profile(np.sqrt(X**2 + Y**2)).mean(axis=(2, 3))
    return rho, h


def _kernel_stencil(s: float, n: int, h: float):
    k = np.arange(-(n - 1), n) * h
    d2 = k[:, None] ** 2 + k[None, :] ** 2
    d2[n - 1, n - 1] = 1.0
    K = green_of_sq(s, d2)
    K[n - 1, n - 1] = self_cell_value(s, h * h)
    return K


def _refine(fn, n0: int, rtol: float, nmax: int):
    prev, n = fn(n0), n0
    history = [(n0, prev)]
    while True:
        n = 2 * (n - 1) + 1
        cur = fn(n)
        history.append((n, cur))
        if abs(cur - prev) <= rtol * abs(cur) or n >= nmax:
            return cur, history
        prev = cur


def _energy_at(s, profile, n):
    rho, h = _disk_density(profile, n)
    pot = fftconvolve(rho, _kernel_stencil(s, n, h), mode="valid") * h * h
    return 0.5 * float(np.sum(pot * rho)) * h * h


def _potential_at_e1(s, profile, n):
    rho, h = _disk_density(profile, n)
    K = _kernel_stencil(s, n, h)
    i, j = n - 1, (n - 1) // 2  # cell centered at (1, 0)
    window = K[(n - 1) - i : (2 * n - 1) - i, (n - 1) - j : (2 * n - 1) - j]
    return float(np.sum(window * rho)) * h * h


def leading_energy_constant(s: float, profile, n0: int = 65, rtol: float = 0.005, nmax: int = 1025,
                            history: bool = False):
    """A_s = (1/2) int int G_s(x - x') xi*(x) xi*(x') on the unit disk.

    Cell-average quadrature with self-cell correction, refined by doubling
    until two successive resolutions agree to ``rtol``.
    """
    if s >= 1:
        raise UnsupportedError("the s=1 leading energy term is logarithmic")
    val, hist = _refine(lambda n: _energy_at(s, profile, n), n0, rtol, nmax)
    return (val, hist) if history else val


def potential_constant(s: float, profile, n0: int = 65, rtol: float = 0.005, nmax: int = 1025,
                       history: bool = False):
    """B_s = (G_s * xi*) evaluated on the unit circle, at (1, 0)."""
    if s >= 1:
        raise UnsupportedError("the s=1 potential grows logarithmically")
    val, hist = _refine(lambda n: _potential_at_e1(s, profile, n), n0, rtol, nmax)
    return (val, hist) if history else val


def potential_at(s: float, profile, point, n: int = 257) -> float:
    """(G_s * xi)(point) on the same grid as ``potential_constant``; point must be a cell center."""
    rho, h = _disk_density(profile, n)
    c = -1.0 + h * np.arange(n)
    i = int(np.argmin(np.abs(c - point[0])))
    j = int(np.argmin(np.abs(c - point[1])))
    K = _kernel_stencil(s, n, h)
    window = K[(n - 1) - i : (2 * n - 1) - i, (n - 1) - j : (2 * n - 1) - j]
    return float(np.sum(window * rho)) * h * h
