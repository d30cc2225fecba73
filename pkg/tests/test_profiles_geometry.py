import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsqg_vortex.errors import ResolutionError
from gsqg_vortex.geometry import build_halfplane_grid, build_sector_grid, sector_window
from gsqg_vortex.profiles import (
    load_tabulated_profile,
    make_parabolic_profile,
    make_patch_profile,
    make_tabulated_profile,
    radial_rearrangement,
    resolve_profile,
    scale_profile,
)
from gsqg_vortex.rearrange import VorticityField


def _numeric_mass(p, n=200001):
    r = np.linspace(0, 1, n)
    return float(np.trapezoid(2 * np.pi * r * p(r), r))


@pytest.mark.parametrize("p", [make_patch_profile(), make_parabolic_profile()])
def test_builtin_profiles_unit_mass(p):
    assert p.mass == 1.0
    assert _numeric_mass(p) == pytest.approx(1.0, rel=1e-4)
    assert p(np.array([1.0, 1.5])).tolist() == [0.0, 0.0]


def test_values_and_moments():
    assert make_patch_profile()(0.3) == pytest.approx(1 / np.pi)
    assert make_parabolic_profile()(0.0) == pytest.approx(2 / np.pi)
    r = np.linspace(0, 1, 200001)
    pp = make_parabolic_profile()
    assert np.trapezoid(2 * np.pi * r**3 * pp(r), r) == pytest.approx(pp.second_moment, rel=1e-6)


def test_tabulated_normalization():
    p = make_tabulated_profile([0, 1, 2], [4.0, 2.0, 0.0])
    assert p.support_radius == 1.0
    assert p.mass == pytest.approx(1.0, rel=1e-14)
    assert _numeric_mass(p) == pytest.approx(1.0, rel=1e-4)
    with pytest.raises(ValueError):
        make_tabulated_profile([0, 1, 1], [1, 1, 0])
    with pytest.raises(ValueError):
        make_tabulated_profile([0, 1], [-1, 0])


def test_load_csv(tmp_path):
    f = tmp_path / "xi.csv"
    f.write_text("r,xi\n0,1\n0.5,1\n1,0\n")
    p = load_tabulated_profile(f)
    assert p.mass == pytest.approx(1.0)
    assert resolve_profile(str(f)).mass == pytest.approx(1.0)


def test_rearrangement_of_two_bump_profile():
    # annular bump plus core; the rearrangement is nonincreasing and equimeasurable
    r = np.linspace(0, 1, 41)
    v = np.exp(-((r - 0.1) / 0.08) ** 2) + 2 * np.exp(-((r - 0.6) / 0.1) ** 2)
    v[-1] = 0.0
    p = make_tabulated_profile(r, v)
    star = radial_rearrangement(p)
    assert star.is_nonincreasing()
    assert star.mass == pytest.approx(1.0, rel=1e-10)
    rr = np.linspace(0, 1, 400001)
    for t in (0.2, 0.5, 1.0):
        dm = lambda f: np.trapezoid(2 * np.pi * rr * (f(rr) > t), rr)
        assert dm(star) == pytest.approx(dm(p), abs=2e-3)


def test_rearrangement_idempotent():
    p = make_parabolic_profile()
    assert radial_rearrangement(p) is p
    g = build_sector_grid(2, 20, 20)
    rng = np.random.default_rng(1)
    f = VorticityField(g, rng.uniform(size=g.size))
    once = radial_rearrangement(f, (1.0, 0.0))
    twice = radial_rearrangement(once, (1.0, 0.0))
    assert np.array_equal(once.values, twice.values)
    assert once.in_class()


@settings(max_examples=20, deadline=None)
@given(st.floats(0.04, 0.2))
def test_scaled_profile_unit_mass(eps):
    g = build_halfplane_grid(1.0, 128, 1.0, 1.2 * eps)
    f = scale_profile(make_parabolic_profile(), eps).realize(g, (1.0, 0.0))
    assert f.mass == pytest.approx(1.0, rel=1e-13)
    assert f.values.max() == pytest.approx(2 / (np.pi * eps**2), rel=0.05)


def test_scaled_profile_resolution_guard():
    g = build_halfplane_grid(1.0, 16)
    with pytest.raises(ResolutionError):
        scale_profile(make_patch_profile(), 0.05).sample(g, (1.0, 0.0))


@pytest.mark.parametrize("N,area", [(2, np.pi / 2), (4, np.pi / 4), (8, np.pi / 8)])
def test_sector_area_and_equal_cells(N, area):
    g = build_sector_grid(N, 16, 12)
    assert g.measure.sum() == pytest.approx(area, rel=1e-14)
    assert g.equal_measure
    assert np.all(np.abs(np.arctan2(g.y, g.x)) < np.pi / (2 * N))


@pytest.mark.parametrize("grid", [build_sector_grid(3, 10, 14), sector_window(2, 1.0, 0.1, 32),
                                  build_halfplane_grid(1.0, 40), build_halfplane_grid(1.0, 40, 1.0, 0.1)])
def test_mirror_is_exact_involution(grid):
    m = grid.mirror
    assert np.array_equal(m[m], np.arange(grid.size))
    assert np.array_equal(grid.x[m], grid.x)
    assert np.array_equal(grid.y[m], -grid.y)


def test_halfplane_grid_inside_disk():
    g = build_halfplane_grid(1.0, 64)
    assert np.all(g.boundary_distance() > 0)
    assert np.all(g.x > 0)
    assert g.measure.sum() == pytest.approx(np.pi / 4, rel=0.02)
    with pytest.raises(ValueError):
        build_halfplane_grid(1.0, 15)


def test_sector_grid_validation():
    with pytest.raises(ValueError):
        build_sector_grid(1, 10, 10)
    with pytest.raises(ValueError):
        build_sector_grid(2, 10, 9)
