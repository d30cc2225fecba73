"""N-fold co-rotating equilibria by constrained rearrangement ascent.

The energy (1/2) sum K_s q q over one sector is maximized over the discrete
rearrangement class of xi_eps subject to sum |x|^2 omega m = 1.  Each step
takes the bathtub rearrangement of the current potential tilted by
(alpha/2)|x|^2, alpha fixed by bisection on the momentum, followed by angular
Steiner symmetrization.  A coarse pass over the whole sector locates the
vortex and a refined polar window of radius 4 eps carries the production run.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import diagnostics as diag
from .errors import InfeasibleConfigError, NotConvergedError, UnsupportedError
from .geometry import build_sector_grid, sector_window
from .iteration import ascend
from .kernels import KernelOperator, green_gradient_factor, kappa_eval
from .profiles import MIN_SUPPORT_CELLS, Profile, resolve_profile, scale_profile
from .rearrange import admissible_alpha_interval, angular_steiner, constrained_rearrange


@dataclass(frozen=True)
class RotatingConfig:
    s: float = 1.0
    N: int = 2
    eps: float = 0.05
    profile: Any = "patch"
    coarse_support: int = 64  # support cells targeted on the coarse sector grid
    coarse_nr: int | None = None
    coarse_nt: int | None = None
    refined_n: int = 160  # 0 skips the refined window
    window_factor: float = 4.0
    tol_E: float = 1e-10
    tol_L: float = 1e-6
    max_iter: int = 500
    placement_radius: float = 1.0
    min_cells: int = MIN_SUPPORT_CELLS

    def validate(self):
        if not 0.5 <= self.s <= 1.0:
            raise ValueError(f"s={self.s} outside [1/2, 1]")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError("N must be an integer >= 2")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        em = eps_max(self.N, self.placement_radius)
        if self.eps >= em:
            raise InfeasibleConfigError(f"eps={self.eps} does not fit in the sector; eps_max={em:.6g}", em)
        if self.refined_n and (self.refined_n < 8 or self.refined_n % 2):
            raise ValueError("refined_n must be even and >= 8 (or 0)")


def eps_max(N: int, radius: float = 1.0) -> float:
    """Largest core size whose disk around (radius, 0) fits inside the sector."""
    return float(min(radius - 0.5, 1.5 - radius, radius * np.sin(np.pi / (2 * N))))


@dataclass
class EquilibriumResult:
    problem: str
    config: Any
    field: Any
    profile: Profile
    alpha: float
    mu: float
    energy: float
    iterations: int
    converged: bool
    momentum_residual: float
    potential: np.ndarray
    energy_history: list
    diagnostics: dict = field(default_factory=dict)
    coarse: dict = field(default_factory=dict)

    @property
    def tilt(self) -> np.ndarray:
        g = self.field.grid
        if self.problem == "rotating":
            return 0.5 * self.alpha * g.r2
        return -self.config.W * g.x

    @property
    def stream_function(self) -> np.ndarray:
        """psi = K omega + tilt - mu."""
        return self.potential + self.tilt - self.mu


def _auto_coarse(N, eps, target):
    # square cells at r=1 with about `target` cells inside a disk of radius eps
    h = np.sqrt(np.pi * eps * eps / target)
    nr = max(8, int(np.ceil(1.0 / h)))
    nt = max(8, 2 * int(np.ceil(np.pi / N / h / 2)))
    return nr, nt


def place_at_momentum(sp, grid, r_guess, width=None, steps=41, target_L=1.0):
    """Sample the scaled profile centered on the axis at the radius (within
    ``width`` of ``r_guess``) whose discrete momentum is closest to target."""
    if width is None:
        width = 2 * grid.cell_width
    best = None
    for r in r_guess + np.linspace(-width, width, steps):
        fld = sp.realize(grid, (r, 0.0))
        key = (abs(fld.momentum - target_L), abs(r - r_guess))
        if best is None or key < best[0]:
            best = (key, fld, r)
    return best[1], best[2]


def alpha_weak_form(omega, s: float, N: int) -> float:
    """Rotation rate from the stationarity identity sum omega d1(psi) m = 0.

    The direct interaction cancels by antisymmetry, leaving
    alpha = -sum_ij q_i q_j d1 G(x_i - Q_k x_j) / sum_i q_i x1_i over images k >= 1.
    """
    g = omega.grid
    sup = omega.support
    q = omega.weights[sup]
    x, y = g.x[sup], g.y[sup]
    num = 0.0
    step = max(1, 2_000_000 // max(1, sup.size))
    for k in range(1, N):
        c, sn = np.cos(2 * np.pi * k / N), np.sin(2 * np.pi * k / N)
        ix, iy = c * x - sn * y, sn * x + c * y
        for a in range(0, sup.size, step):
            z1 = x[a : a + step, None] - ix[None, :]
            z2 = y[a : a + step, None] - iy[None, :]
            gf = green_gradient_factor(s, z1 * z1 + z2 * z2)
            num += float(q[a : a + step] @ ((gf * z1) @ q))
    return -num / float(q @ x)


def kappa_integral(omega, N: int) -> float:
    """sum_ij kappa(x_i, x_j) q_i q_j; same-cell pairs keep only the images."""
    g = omega.grid
    sup = omega.support
    q = omega.weights[sup]
    P = np.column_stack([g.x[sup], g.y[sup]])
    total = 0.0
    step = max(1, 1_000_000 // max(1, sup.size))
    for a in range(0, sup.size, step):
        blk = kappa_eval(P[a : a + step, None, :], P[None, :, :], N)
        rows = np.arange(a, min(a + step, sup.size))
        blk[rows - a, rows] = kappa_eval(P[rows], P[rows], N, images_only=True)
        total += float(q[a : a + step] @ (blk @ q))
    return total


def _run_stage(op, sp, grid, field0, cfg):
    levels = field0.levels
    mirror = grid.mirror

    def propose(psi):
        sym = 0.5 * (psi + psi[mirror])
        step = constrained_rearrange(sym, levels, grid, 1.0, cfg.tol_L)
        new = angular_steiner(step.field)
        return new, {"alpha_bisect": step.alpha, "residual": step.residual, "jump": step.jump}

    return ascend(op, field0, propose, None, cfg.max_iter, cfg.tol_E)


def solve_rotating(cfg: RotatingConfig) -> EquilibriumResult:
    cfg.validate()
    profile = resolve_profile(cfg.profile)
    sp = scale_profile(profile, cfg.eps, cfg.min_cells)
    N, s = int(cfg.N), float(cfg.s)

    # coarse pass over the whole sector
    nr, nt = (cfg.coarse_nr, cfg.coarse_nt) if cfg.coarse_nr else _auto_coarse(N, cfg.eps, cfg.coarse_support)
    coarse_grid = build_sector_grid(N, nr, nt)
    coarse_sp = scale_profile(profile, cfg.eps, min(cfg.min_cells, cfg.coarse_support // 2))
    f0, _ = place_at_momentum(coarse_sp, coarse_grid, cfg.placement_radius)
    op = KernelOperator(s, coarse_grid, "rotation", N)
    fc, psic, Ec, infoc, trc = _run_stage(op, coarse_sp, coarse_grid, f0, cfg)
    rc = float(np.hypot(*fc.centroid))
    coarse = {"nr": nr, "nt": nt, "energy": Ec, "iterations": trc.iterations, "reason": trc.reason,
              "centroid_radius": rc, "alpha_bisect": infoc.get("alpha_bisect")}

    if cfg.refined_n:
        half = cfg.window_factor * cfg.eps
        grid = sector_window(N, rc, half, cfg.refined_n)
        init, r_place = place_at_momentum(sp, grid, rc)
        op = KernelOperator(s, grid, "rotation", N)
        fld, psi, E, info, tr = _run_stage(op, sp, grid, init, cfg)
    else:
        grid, init, r_place = coarse_grid, f0, cfg.placement_radius
        fld, psi, E, info, tr = fc, psic, Ec, infoc, trc
    psi = op.induced_potential(fld.values)  # fresh evaluation, no incremental drift
    q = fld.weights
    E = 0.5 * float(q @ psi)

    alpha = alpha_weak_form(fld, s, N)
    phi = psi + 0.5 * alpha * grid.r2
    zero = fld.values == 0
    mu = float(phi[zero].max())
    res = EquilibriumResult("rotating", cfg, fld, profile, alpha, mu, E, tr.iterations, tr.converged,
                            fld.momentum - 1.0, psi, tr.energies, coarse=coarse)
    d = res.diagnostics
    a_b = info.get("alpha_bisect", float("nan"))
    sym = 0.5 * (psi + psi[grid.mirror])
    lo, hi = admissible_alpha_interval(sym, fld, a_b, span=0.05)
    d.update(_common_diagnostics(res, init, phi, tr))
    d.update({
        "alpha_bisect": a_b,
        "alpha_admissible_interval": [lo, hi],
        "alpha_in_admissible_interval": bool(lo <= alpha <= hi),
        "bisection_jump": info.get("jump", float("nan")),
        "placement_radius": r_place,
        "alpha_limit": _oracle().polygon_angular_velocity(N, s),
        "alpha_limit_formula": _oracle().polygon_rate_formula(N, s),
        "alpha_limit_unscaled_variant": (N - 1) / np.pi if s == 1.0 else None,
        "initial_energy": 0.5 * float(init.weights @ op.induced_potential(init.values)),
    })
    if s == 1.0:
        d["alpha_kappa"] = kappa_integral(fld, N)
    return res


def _oracle():
    from . import oracle

    return oracle


def _common_diagnostics(res, init, phi, trace) -> dict:
    fld = res.field
    eps = res.config.eps
    dist1, center = diag.rescaled_profile_distance(fld, eps, res.profile, 1.0, return_shift=True)
    inside, outside = diag.sign_structure(fld, phi, res.mu)
    return {
        "support_cells": int(fld.support.size),
        "support_diameter": diag.support_diameter(fld),
        "center": [float(v) for v in fld.centroid],
        "matched_center": [float(v) for v in center],
        "profile_distance_l1": dist1,
        "profile_distance_l2": diag.rescaled_profile_distance(fld, eps, res.profile, 2.0),
        "initial_profile_distance_l1": diag.rescaled_profile_distance(init, eps, res.profile, 1.0),
        "rank_correlation": diag.rank_correlation(fld, phi),
        "psi_sign_violation_support": inside,
        "psi_sign_violation_outside": outside,
        "grid_increment": diag.grid_increment(fld, phi),
        "mass_defect": fld.mass - 1.0,
        "class_preserved": bool(trace.class_preserved and fld.in_class()),
        "mirror_symmetric": fld.is_mirror_symmetric(),
        "stop_reason": trace.reason,
        "rejected_steps": trace.rejected,
        "cell_width": fld.grid.cell_width,
        "grid_cells": fld.grid.size,
    }


def extract_multipliers(result: EquilibriumResult):
    """(alpha, mu) of a converged rotating equilibrium."""
    if not result.converged:
        raise NotConvergedError("multipliers of an unconverged run are not defined")
    return result.alpha, result.mu


def alpha_crosscheck(result: EquilibriumResult) -> float:
    """Rotation rate as the kappa double sum over the final field (s = 1)."""
    if result.config.s != 1.0:
        raise UnsupportedError("the kappa cross-check is defined for s = 1 only")
    if not result.converged:
        raise NotConvergedError("cross-check requires a converged run")
    if "alpha_kappa" not in result.diagnostics:
        result.diagnostics["alpha_kappa"] = kappa_integral(result.field, result.config.N)
    return result.diagnostics["alpha_kappa"]
