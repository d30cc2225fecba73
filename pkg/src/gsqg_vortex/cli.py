"""Command-line entry point.

    gsqg-vortex --config run.json --output out/ [--mode rotate|translate|sweep|oracle]

Exit codes: 0 success, 2 config error, 3 convergence failure, 4 infeasible eps.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys

import jsonschema
import numpy as np
import scipy

from . import __version__, oracle
from .diagnostics import SweepReport, _jsonable, summarize_sweep, write_field_csv
from .errors import InfeasibleConfigError, InfeasibleConstraintError, ResolutionError
from .profiles import radial_rearrangement, resolve_profile

DEFAULTS = {
    "mode": "rotate",
    "problem": "rotating",
    "s": 1.0,
    "N": 2,
    "W": None,
    "epsilon": 0.05,
    "epsilons": [0.1, 0.05, 0.025],
    "profile": "patch",
    "grid": {
        "coarse_support": 64,
        "coarse_nr": None,
        "coarse_nt": None,
        "coarse_n": None,
        "refined_n": 160,
        "window_factor": 4.0,
    },
    "tolerances": {"tol_E": 1e-10, "tol_L": 1e-6},
    "max_iters": 500,
    "placement_radius": 1.0,
    "workers": 1,
    "output": None,
}

_num = {"type": "number"}
_opt_int = {"type": ["integer", "null"], "minimum": 8}
SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "mode": {"enum": ["rotate", "translate", "sweep", "oracle"]},
        "problem": {"enum": ["rotating", "translating"]},
        "s": {"type": "number", "minimum": 0.5, "maximum": 1.0},
        "N": {"type": "integer", "minimum": 2},
        "W": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "epsilons": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 3},
        "profile": {"type": "string", "minLength": 1},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coarse_support": {"type": "integer", "minimum": 8},
                "coarse_nr": _opt_int,
                "coarse_nt": _opt_int,
                "coarse_n": {"type": ["integer", "null"], "minimum": 16},
                "refined_n": {"type": "integer", "minimum": 0},
                "window_factor": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"tol_E": _num, "tol_L": _num},
        },
        "max_iters": {"type": "integer", "minimum": 1},
        "placement_radius": {"type": "number", "exclusiveMinimum": 0.5, "exclusiveMaximum": 1.5},
        "workers": {"type": "integer", "minimum": 1},
        "output": {"type": ["string", "null"]},
    },
}


class ConfigError(ValueError):
    pass


def resolve_config(raw: dict, mode: str | None = None) -> dict:
    """Validate ``raw`` against the schema and fill in defaults."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config error at {path}: {e.message}")
    cfg = copy.deepcopy(DEFAULTS)
    for k, v in raw.items():
        if isinstance(v, dict):
            cfg[k].update(v)
        else:
            cfg[k] = v
    if mode is not None:
        cfg["mode"] = mode
    if cfg["mode"] == "rotate":
        cfg["problem"] = "rotating"
    elif cfg["mode"] == "translate":
        cfg["problem"] = "translating"
    if cfg["W"] is None:
        cfg["W"] = oracle.pair_speed(1.0, cfg["s"])
    if cfg["grid"]["refined_n"] % 2:
        raise ConfigError("config error at grid/refined_n: must be even")
    return cfg


def _rotating_config(cfg, eps):
    from .solver_rotating import RotatingConfig

    g, t = cfg["grid"], cfg["tolerances"]
    return RotatingConfig(s=float(cfg["s"]), N=cfg["N"], eps=float(eps), profile=cfg["profile"],
                          coarse_support=g["coarse_support"], coarse_nr=g["coarse_nr"], coarse_nt=g["coarse_nt"],
                          refined_n=g["refined_n"], window_factor=g["window_factor"], tol_E=t["tol_E"],
                          tol_L=t["tol_L"], max_iter=cfg["max_iters"], placement_radius=cfg["placement_radius"])


def _translating_config(cfg, eps):
    from .solver_translating import TranslatingConfig

    g, t = cfg["grid"], cfg["tolerances"]
    return TranslatingConfig(s=float(cfg["s"]), W=float(cfg["W"]), eps=float(eps), profile=cfg["profile"],
                             coarse_support=g["coarse_support"], coarse_n=g["coarse_n"], refined_n=g["refined_n"],
                             window_factor=g["window_factor"], tol_E=t["tol_E"], max_iter=cfg["max_iters"])


def _clean(obj):
    obj = _jsonable(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v) for v in obj]
    return obj


def _oracle_block(cfg) -> dict:
    s = float(cfg["s"])
    out = {
        "s": s,
        "pair_distance": oracle.pair_distance(cfg["W"], s),
        "kirchhoff_routh_minimizer": oracle.kirchhoff_routh_minimizer(cfg["W"], s),
        "W": cfg["W"],
        "polygon_rate": oracle.polygon_angular_velocity(cfg["N"], s),
        "polygon_rate_formula": oracle.polygon_rate_formula(cfg["N"], s),
    }
    if s == 1.0:
        out["polygon_rate_unscaled_variant"] = (cfg["N"] - 1) / np.pi
    else:
        prof = radial_rearrangement(resolve_profile(cfg["profile"]))
        out["B_s"] = oracle.potential_constant(s, prof)
        out["A_s"] = oracle.leading_energy_constant(s, prof)
    return out


def result_summary(res) -> tuple[dict, dict]:
    """(results, checks) blocks for one solve."""
    d = res.diagnostics
    results = {
        "problem": res.problem,
        "mu": res.mu,
        "energy": res.energy,
        "initial_energy": d["initial_energy"],
        "iterations": res.iterations,
        "converged": res.converged,
        "diameter": d["support_diameter"],
        "diameter_over_eps": d["support_diameter"] / res.config.eps,
        "center": d["center"],
        "profile_distance_l1": d["profile_distance_l1"],
        "profile_distance_l2": d["profile_distance_l2"],
        "rank_correlation": d["rank_correlation"],
        "support_cells": d["support_cells"],
        "mass_defect": d["mass_defect"],
        "stop_reason": d["stop_reason"],
        "coarse": res.coarse,
    }
    checks = {
        "class_preserved": d["class_preserved"],
        "mirror_symmetric": d["mirror_symmetric"],
        "rank_correlation_at_least_0.99": d["rank_correlation"] >= 0.99,
        "energy_nondecreasing": all(b >= a - 1e-12 * abs(a) for a, b in zip(res.energy_history, res.energy_history[1:])),
        "support_resolution_at_least_50": d["support_cells"] >= 50,
    }
    if res.problem == "rotating":
        N, s = res.config.N, res.config.s
        lim = d["alpha_limit"]
        results.update({
            "alpha": res.alpha,
            "alpha_bisect": d["alpha_bisect"],
            "alpha_admissible_interval": d["alpha_admissible_interval"],
            "momentum_residual": res.momentum_residual,
        })
        tol = 0.10 if s == 1.0 else 0.15
        checks["alpha_near_polygon_rate"] = abs(res.alpha / lim - 1) < tol
        if s == 1.0:
            results["alpha_kappa"] = d["alpha_kappa"]
            checks["alpha_matches_kappa_5pct"] = abs(res.alpha / d["alpha_kappa"] - 1) < 0.05
            checks["alpha_in_0_N_over_pi"] = 0 < res.alpha < N / np.pi
    else:
        results.update({"W": res.config.W, "pair_distance": d["pair_distance"],
                        "touches_disk_boundary": d["touches_disk_boundary"]})
        c = d["center"]
        err = float(np.hypot(c[0] - d["pair_distance"], c[1]))
        results["center_error"] = err
        checks["center_near_b1"] = err <= max(res.config.eps, 2 * d["cell_width"])
    return results, checks


def _build_info():
    return {"package": "gsqg_vortex", "version": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _summary_lines(payload) -> list[str]:
    lines = [f"mode: {payload['config']['mode']}"]
    for block in ("results", "fits", "oracle"):
        if block in payload:
            for k, v in sorted(payload[block].items()):
                if isinstance(v, (int, float, str, bool)) or v is None:
                    lines.append(f"{block}.{k}: {v}")
    for k, v in sorted(payload.get("checks", {}).items()):
        lines.append(f"check {k}: {'PASS' if v else 'FAIL'}")
    return lines


def run(cfg: dict, outdir: str) -> int:
    from .solver_rotating import solve_rotating
    from .solver_translating import solve_translating

    os.makedirs(outdir, exist_ok=True)
    mode = cfg["mode"]
    payload = {"build_info": _build_info(), "config": cfg}
    status = 0
    if mode == "oracle":
        payload["oracle"] = _oracle_block(cfg)
        print(json.dumps(_clean(payload["oracle"]), indent=2, sort_keys=True))
    elif mode in ("rotate", "translate"):
        if mode == "rotate":
            res = solve_rotating(_rotating_config(cfg, cfg["epsilon"]))
        else:
            res = solve_translating(_translating_config(cfg, cfg["epsilon"]))
        results, checks = result_summary(res)
        payload.update(results=results, checks=checks, oracle=_oracle_block(cfg))
        if res.problem == "rotating":
            payload["oracle"]["alpha_limit"] = res.diagnostics["alpha_limit"]
        write_field_csv(os.path.join(outdir, "field.csv"), res)
        status = 0 if res.converged else 3
    else:
        make = _rotating_config if cfg["problem"] == "rotating" else _translating_config
        from .diagnostics import run_sweep

        base = make(cfg, cfg["epsilons"][0])
        rep: SweepReport = run_sweep(base, cfg["epsilons"], workers=cfg["workers"])
        with open(os.path.join(outdir, "sweep.json"), "w") as fh:
            fh.write(json.dumps(_clean(rep.to_dict()), indent=2, sort_keys=True) + "\n")
        payload.update(sweep=rep.to_dict(), fits=rep.fits, oracle=rep.oracle, checks=rep.checks)
        status = 3 if rep.partial else 0
    _write_json(os.path.join(outdir, "result.json"), payload)
    with open(os.path.join(outdir, "summary.txt"), "w") as fh:
        fh.write("\n".join(_summary_lines(_clean(payload))) + "\n")
    return status


def build_parser():
    p = argparse.ArgumentParser(prog="gsqg-vortex", description="Steady gSQG vortex equilibria by rearrangement ascent.")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--output", default=None, help="output directory (default: config 'output' or ./gsqg_out)")
    p.add_argument("--mode", choices=["rotate", "translate", "sweep", "oracle"], default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ConfigError("config error at <root>: expected a JSON object")
        cfg = resolve_config(raw, args.mode)
        if cfg["profile"] not in ("patch", "parabolic"):
            resolve_profile(cfg["profile"])
    except (OSError, json.JSONDecodeError, ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    outdir = args.output or cfg["output"] or "gsqg_out"
    try:
        return run(cfg, outdir)
    except InfeasibleConfigError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 4
    except (InfeasibleConstraintError, ResolutionError) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
