import dataclasses
import json

import numpy as np
import pytest

from gsqg_vortex import diagnostics as diag
from gsqg_vortex.errors import InfeasibleConfigError, NotConvergedError, UnsupportedError
from gsqg_vortex.geometry import build_sector_grid
from gsqg_vortex.rearrange import VorticityField
from gsqg_vortex.solver_rotating import (
    RotatingConfig,
    alpha_crosscheck,
    eps_max,
    extract_multipliers,
    solve_rotating,
)
from gsqg_vortex.solver_translating import TranslatingConfig, extract_threshold, odd_extension, solve_translating

FAST = dict(eps=0.1, refined_n=64)


@pytest.fixture(scope="module")
def rot():
    return solve_rotating(RotatingConfig(profile="parabolic", **FAST))


@pytest.fixture(scope="module")
def trans():
    return solve_translating(TranslatingConfig(s=0.75, profile="parabolic", **FAST))


def test_rotating_invariants(rot):
    d = rot.diagnostics
    assert rot.converged
    assert d["class_preserved"] and d["mirror_symmetric"]
    assert d["mass_defect"] == pytest.approx(0.0, abs=1e-13)
    assert d["rank_correlation"] >= 0.99
    assert all(b >= a - 1e-12 * abs(a) for a, b in zip(rot.energy_history, rot.energy_history[1:]))
    assert abs(rot.momentum_residual) < 1e-3
    assert 0 < rot.alpha < 2 / np.pi
    a, mu = extract_multipliers(rot)
    assert a == rot.alpha and np.isfinite(mu)
    assert alpha_crosscheck(rot) == pytest.approx(rot.alpha, rel=0.05)


def test_translating_invariants(trans):
    d = trans.diagnostics
    assert trans.converged and d["class_preserved"] and d["mirror_symmetric"]
    assert d["rank_correlation"] >= 0.99
    assert not d["touches_disk_boundary"]
    assert abs(d["center"][1]) < 1e-12
    pts, vals = odd_extension(trans)
    assert vals.sum() == pytest.approx(0.0, abs=1e-10)
    assert np.all(pts[vals < 0, 0] < 0)
    assert extract_threshold(trans) == trans.mu
    with pytest.raises(UnsupportedError):
        alpha_crosscheck(dataclasses.replace(trans, config=RotatingConfig(s=0.75)))


def test_stream_function_level_sets(rot):
    # psi >= 0 on the support and <= 0 off it, up to one grid increment
    psi = rot.stream_function
    sup = rot.field.values > 0
    inc = rot.diagnostics["grid_increment"]
    assert psi[sup].min() >= -inc
    assert psi[~sup].max() <= 1e-12


def test_unconverged_refused(rot):
    bad = dataclasses.replace(rot, converged=False)
    with pytest.raises(NotConvergedError):
        extract_multipliers(bad)
    with pytest.raises(NotConvergedError):
        extract_threshold(bad)


def test_infeasible_eps_names_limit():
    with pytest.raises(InfeasibleConfigError) as e:
        solve_rotating(RotatingConfig(N=8, eps=0.3))
    assert e.value.eps_max == pytest.approx(eps_max(8, 1.0))
    assert "eps_max" in str(e.value)
    with pytest.raises(InfeasibleConfigError):
        solve_translating(TranslatingConfig(eps=0.5))


def test_default_pair_speed_gives_unit_distance():
    from gsqg_vortex.oracle import pair_distance

    for s in (0.5, 0.75, 1.0):
        cfg = TranslatingConfig(s=s)
        assert pair_distance(cfg.W, s) == pytest.approx(1.0, rel=1e-14)


def test_support_diameter_and_rank_helpers():
    g = build_sector_grid(2, 16, 16)
    v = np.zeros(g.size)
    v[[0, g.size - 1]] = 1.0
    f = VorticityField(g, v)
    expect = np.hypot(g.x[0] - g.x[-1], g.y[0] - g.y[-1])
    assert diag.support_diameter(f) == pytest.approx(expect)
    assert diag.rank_correlation(f, np.arange(g.size)) == 1.0
    inside, outside = diag.sign_structure(f, v - 0.5, 0.0)
    assert inside == 0 and outside == 0


def test_profile_distance_zero_for_sampled_profile():
    from gsqg_vortex.geometry import build_halfplane_grid
    from gsqg_vortex.profiles import make_parabolic_profile, scale_profile

    g = build_halfplane_grid(1.0, 96, 1.0, 0.3)
    p = make_parabolic_profile()
    f = scale_profile(p, 0.1).realize(g, (1.0, 0.0))
    assert diag.rescaled_profile_distance(f, 0.1, p) < 1e-12
    shifted = scale_profile(p, 0.1).realize(g, (1.0 + 0.3 * g.h, 0.0))
    assert diag.rescaled_profile_distance(shifted, 0.1, p) < 1e-3


def test_field_csv(rot, tmp_path):
    path = tmp_path / "f.csv"
    diag.write_field_csv(path, rot)
    lines = path.read_text().splitlines()
    assert lines[0] == "x1,x2,omega,psi"
    assert len(lines) == rot.field.grid.size + 1
    row = np.array(lines[1 + rot.field.support[0]].split(","), dtype=float)
    assert row[2] == rot.field.values[rot.field.support[0]]


def test_sweep_report_json(rot):
    others = [dataclasses.replace(rot, config=dataclasses.replace(rot.config, eps=e)) for e in (0.2, 0.15)]
    rep = diag.summarize_sweep([rot] + others, "rotating", 1.0)
    data = json.loads(rep.to_json())
    assert [e["eps"] for e in data["entries"]] == [0.2, 0.15, 0.1]
    assert "mu_slope" in data["fits"] and "alpha_within_tolerance" in data["checks"]
