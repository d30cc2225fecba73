import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ellipe

from gsqg_vortex import oracle
from gsqg_vortex.errors import UnsupportedError
from gsqg_vortex.profiles import make_parabolic_profile, make_patch_profile

S_VALUES = [0.5, 0.75, 1.0]


@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_polygon_rate_log(N):
    assert oracle.polygon_angular_velocity(N, 1.0) == pytest.approx((N - 1) / (4 * np.pi), rel=1e-12)


@pytest.mark.parametrize("s", [0.5, 0.6, 0.75, 0.9])
@pytest.mark.parametrize("N", [2, 3, 5])
def test_polygon_rate_paths_agree(N, s):
    # induced velocity of the point-vortex polygon vs the closed-form sum
    assert oracle.polygon_angular_velocity(N, s) == pytest.approx(oracle.polygon_rate_formula(N, s), rel=1e-12)


def test_polygon_is_relative_equilibrium():
    sys = oracle.polygon(4, 0.75)
    rate = oracle.polygon_angular_velocity(4, 0.75)
    for j, p in enumerate(sys.positions):
        v = sys.self_velocity(j)
        assert np.allclose(v, rate * np.array([-p[1], p[0]]), atol=1e-14)


def test_pair_speed_known_value():
    assert oracle.pair_speed(1.0, 1.0) == pytest.approx(1 / (4 * np.pi), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(S_VALUES), st.floats(0.1, 10.0))
def test_pair_distance_round_trip(s, d):
    assert oracle.pair_distance(oracle.pair_speed(d, s), s) == pytest.approx(d, rel=1e-12)


@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("W", [None, 0.02, 0.3])
def test_kirchhoff_routh_minimizer(s, W):
    W = oracle.pair_speed(1.0, s) if W is None else W
    d = oracle.pair_distance(W, s)
    assert abs(oracle.kirchhoff_routh_minimizer(W, s) - d) < 1e-8
    assert abs(oracle.kirchhoff_routh_slope(d, W, s)) < 1e-10 * max(1.0, W)


@pytest.mark.parametrize("s", S_VALUES)
def test_kirchhoff_routh_convex(s):
    W = oracle.pair_speed(1.0, s)
    tau = np.linspace(0.05, 5, 400)
    f = oracle.kirchhoff_routh(tau, W, s)
    assert np.all(np.diff(f, 2) > 0)


def test_constants_refuse_log_kernel():
    with pytest.raises(UnsupportedError):
        oracle.potential_constant(1.0, make_patch_profile())
    with pytest.raises(UnsupportedError):
        oracle.leading_energy_constant(1.0, make_patch_profile())


def test_patch_constants_half():
    # closed forms for the uniform patch at s = 1/2
    B, hist = oracle.potential_constant(0.5, make_patch_profile(), history=True)
    assert B == pytest.approx(2 / np.pi**2, rel=0.005)
    A = oracle.leading_energy_constant(0.5, make_patch_profile())
    assert A == pytest.approx(4 / (3 * np.pi**2), rel=0.005)


def test_constant_refinement_converges():
    _, hist = oracle.potential_constant(0.75, make_parabolic_profile(), history=True)
    vals = [h[1] if isinstance(h, (tuple, list)) else h for h in hist]
    assert len(vals) >= 2
    assert abs(vals[-1] - vals[-2]) <= 0.005 * abs(vals[-1])


def test_potential_at_matches_elliptic_formula():
    for r in (0.0, 0.4, 0.8):
        exact = 4 * ellipe(r * r) / (2 * np.pi**2)
        assert oracle.potential_at(0.5, make_patch_profile(), (r, 0.0)) == pytest.approx(exact, rel=0.01)


@pytest.mark.parametrize("s", [0.5, 0.75])
def test_potential_constant_is_potential_on_unit_circle(s):
    p = make_parabolic_profile()
    assert oracle.potential_constant(s, p) == pytest.approx(oracle.potential_at(s, p, (1.0, 0.0)), rel=0.01)


def test_point_vortices_must_be_distinct():
    with pytest.raises(ValueError):
        oracle.PointVortexSystem(np.zeros((2, 2)), [1, 1])
