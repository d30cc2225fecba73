"""Translating vortex pairs by rearrangement ascent in the right half-plane.

The functional (1/2) sum P_s q q - W sum x1 q is maximized over the discrete
rearrangement class of xi_eps on cells inside B_{d/2}((d,0)), d the
Kirchhoff-Routh distance for speed W.  Each step is an unconstrained bathtub
on P_s omega - W x1 followed by Steiner symmetrization in x2.  The pair is the
odd extension omega(x1,x2) - omega(-x1,x2) of the half-plane solution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import InfeasibleConfigError, NotConvergedError
from .geometry import build_halfplane_grid
from .iteration import ascend
from .kernels import KernelOperator
from .oracle import pair_distance, pair_speed
from .profiles import MIN_SUPPORT_CELLS, resolve_profile, scale_profile
from .rearrange import bathtub_rearrange, column_steiner
from .solver_rotating import EquilibriumResult, _common_diagnostics


@dataclass(frozen=True)
class TranslatingConfig:
    s: float = 1.0
    W: float | None = None  # default: the speed whose pair distance is 1
    eps: float = 0.05
    profile: Any = "patch"
    coarse_support: int = 64
    coarse_n: int | None = None
    refined_n: int = 160
    window_factor: float = 4.0
    tol_E: float = 1e-10
    max_iter: int = 500
    min_cells: int = MIN_SUPPORT_CELLS

    def __post_init__(self):
        if self.W is None:
            object.__setattr__(self, "W", pair_speed(1.0, self.s))

    def validate(self):
        if not 0.5 <= self.s <= 1.0:
            raise ValueError(f"s={self.s} outside [1/2, 1]")
        if not self.W > 0:
            raise ValueError("W must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        em = 0.5 * pair_distance(self.W, self.s)
        if self.eps >= em:
            raise InfeasibleConfigError(f"eps={self.eps} does not fit in B_(d/2)(b1); eps_max={em:.6g}", em)
        if self.refined_n and (self.refined_n < 16 or self.refined_n % 2):
            raise ValueError("refined_n must be even and >= 16 (or 0)")


def steiner_x2(omega):
    """Column-wise symmetric decreasing rearrangement in x2."""
    return column_steiner(omega)


def _run_stage(op, grid, field0, W, cfg):
    levels = field0.levels
    mirror = grid.mirror
    tilt = -W * grid.x

    def propose(psi):
        sym = 0.5 * (psi + psi[mirror])
        new = steiner_x2(bathtub_rearrange(levels, sym + tilt, grid))
        return new, {}

    return ascend(op, field0, propose, tilt, cfg.max_iter, cfg.tol_E)


def solve_translating(cfg: TranslatingConfig) -> EquilibriumResult:
    cfg.validate()
    s, W = float(cfg.s), float(cfg.W)
    profile = resolve_profile(cfg.profile)
    d = pair_distance(W, s)
    sp = scale_profile(profile, cfg.eps, cfg.min_cells)

    if cfg.coarse_n:
        n = cfg.coarse_n
    else:
        h = np.sqrt(np.pi * cfg.eps**2 / cfg.coarse_support)
        n = max(16, 2 * int(np.ceil(d / h / 2)))
    cgrid = build_halfplane_grid(d, n)
    csp = scale_profile(profile, cfg.eps, min(cfg.min_cells, cfg.coarse_support // 2))
    f0 = csp.realize(cgrid, (d, 0.0))
    op = KernelOperator(s, cgrid, "mirror")
    fc, psic, Ec, _, trc = _run_stage(op, cgrid, f0, W, cfg)
    cx = float(fc.centroid[0])
    coarse = {"n": n, "energy": Ec, "iterations": trc.iterations, "reason": trc.reason, "centroid_x1": cx}

    if cfg.refined_n:
        grid = build_halfplane_grid(d, cfg.refined_n, cx, cfg.window_factor * cfg.eps)
        init = sp.realize(grid, (cx, 0.0))
        op = KernelOperator(s, grid, "mirror")
        fld, psi, E, _, tr = _run_stage(op, grid, init, W, cfg)
    else:
        grid, init = cgrid, f0
        fld, psi, E, _, tr = fc, psic, Ec, None, trc
    psi = op.induced_potential(fld.values)
    q = fld.weights
    E = 0.5 * float(q @ psi) - W * float(q @ grid.x)
    phi = psi - W * grid.x
    zero = fld.values == 0
    mu = float(phi[zero].max())
    res = EquilibriumResult("translating", cfg, fld, profile, W, mu, E, tr.iterations, tr.converged,
                            float("nan"), psi, tr.energies, coarse=coarse)
    dg = res.diagnostics
    dg.update(_common_diagnostics(res, init, phi, tr))
    bd = grid.boundary_distance()[fld.support]
    dg.update({
        "pair_distance": d,
        "touches_disk_boundary": bool(bd.min() < grid.cell_width),
        "initial_energy": 0.5 * float(init.weights @ op.induced_potential(init.values)) - W * init.impulse,
        "impulse": fld.impulse,
    })
    return res


def extract_threshold(result: EquilibriumResult) -> float:
    """mu: the bathtub cut level of P_s omega - W x1."""
    if not result.converged:
        raise NotConvergedError("threshold of an unconverged run is not defined")
    return result.mu


def odd_extension(result: EquilibriumResult):
    """Full-plane pair as (points, values): the half-plane field and its negative mirror image."""
    g = result.field.grid
    pts = np.concatenate([np.column_stack([g.x, g.y]), np.column_stack([-g.x, g.y])])
    vals = np.concatenate([result.field.values, -result.field.values])
    return pts, vals
