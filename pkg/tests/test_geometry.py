import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wintraverse.errors import (DegenerateGeometryError, GeometryError, InvalidScenarioError,
                                RangeViolationError, SingularGeometryError)
from wintraverse.geometry import (REFERENCE_WINDOW, BearingSet, DisplacementState, Vec3, WindowSpec,
                                  bearing_angles, displacements, displacements_world, line_of_sight_ranges,
                                  lyapunov, position_from_bearings, relative_states, relative_velocity,
                                  similar_triangle_ratios)

W = REFERENCE_WINDOW
ALPHA_T = math.asin(0.6)

approach = st.tuples(st.floats(-40, 70), st.floats(-40, 14.9), st.floats(-40, 60))


def test_window_derived_quantities():
    assert W.width_a == 4.0 and W.height_b == 3.0
    assert tuple(W.centroid) == (14.0, 15.0, 11.5)
    assert tuple(W.normal) == (0.0, 1.0, 0.0)
    assert W.plane_y == 15.0
    assert WindowSpec.from_centroid((14, 15, 11.5), 4, 3) == W


@pytest.mark.parametrize("verts, msg", [
    ([(12, 15, 13), (16, 16, 13), (16, 15, 10), (12, 15, 10)], "vertices not coplanar"),
    ([(16, 15, 13), (12, 15, 13), (12, 15, 10), (16, 15, 10)], "+x"),
    ([(12, 15, 10), (16, 15, 10), (16, 15, 13), (12, 15, 13)], "e1 above e4"),
    ([(12, 15, 13), (16, 15, 13), (17, 15, 10), (12, 15, 10)], "differ in length"),
])
def test_window_validation(verts, msg):
    with pytest.raises(GeometryError, match=msg.replace("+", r"\+")):
        WindowSpec.from_vertices(verts)


def test_vec3_rejects_nonfinite():
    with pytest.raises(ValueError):
        Vec3(0.0, math.nan, 0.0)


def test_bearings_at_centroid():
    b = bearing_angles((14, 15 - 1e-12, 11.5), W)
    assert b.beta[0] == pytest.approx(math.pi) and b.beta[3] == pytest.approx(math.pi)
    assert b.beta[1] == pytest.approx(0.0, abs=1e-9) and b.beta[2] == pytest.approx(0.0, abs=1e-9)
    assert b.alpha[0] == pytest.approx(ALPHA_T, abs=1e-12)
    assert b.alpha[1] == pytest.approx(ALPHA_T, abs=1e-12)
    assert b.alpha[3] == pytest.approx(-ALPHA_T, abs=1e-12)
    assert math.degrees(ALPHA_T) == pytest.approx(36.87, abs=5e-3)


def test_bearings_from_origin():
    b = bearing_angles((0, 0, 0), W)
    r = line_of_sight_ranges((0, 0, 0), W)
    assert r[0] == pytest.approx(math.sqrt(538))
    assert math.degrees(b.beta[0]) == pytest.approx(51.34, abs=5e-3)
    assert math.degrees(b.alpha[0]) == pytest.approx(34.09, abs=5e-3)


def test_zero_elevation_when_level_with_vertex():
    assert bearing_angles((0, 0, 13), W).alpha[0] == 0.0


def test_bearing_errors():
    with pytest.raises(DegenerateGeometryError):
        bearing_angles((12, 15, 13), W)
    with pytest.raises(RangeViolationError):
        bearing_angles((14, 16, 11.5), W)
    with pytest.raises(RangeViolationError):
        BearingSet((0, 0, 0, 2.0), (0, 0, 0, 0))


@settings(max_examples=300, deadline=None)
@given(approach)
def test_bearings_match_oracle_and_reconstruct_vertices(p):
    b = bearing_angles(p, W)
    R, a, be = oracles.bearings(p)
    assert np.allclose(b.alpha, a, atol=1e-10)
    assert np.allclose(b.beta, be, atol=1e-12)
    rng = line_of_sight_ranges(p, W)
    for i, v in enumerate(oracles.VERTS):
        assert rng[i] == pytest.approx(math.dist(p, v), rel=1e-12)
        rec = (p[0] + rng[i] * math.cos(b.alpha[i]) * math.cos(b.beta[i]),
               p[1] + rng[i] * math.cos(b.alpha[i]) * math.sin(b.beta[i]),
               p[2] + rng[i] * math.sin(b.alpha[i]))
        assert math.dist(rec, v) < 1e-9


def test_relative_velocity_examples():
    rv = relative_velocity(2.0, 0.0, 0.3, 0.0, 0.3, 5.0)
    assert (rv.V_R, rv.V_alpha, rv.V_beta) == pytest.approx((-2.0, 0.0, 0.0), abs=1e-15)
    rv = relative_velocity(1.0, math.pi / 2, 0.0, math.pi / 2, 0.0, 5.0)
    assert rv.V_R == pytest.approx(-1.0) and rv.V_alpha == pytest.approx(0.0, abs=1e-15)
    assert rv.V_beta == pytest.approx(0.0, abs=1e-15)
    rv = relative_velocity(1.0, 0.0, 0.0, math.radians(36.87), math.radians(51.34), 10.0)
    assert rv.V_R == pytest.approx(-0.4997, abs=1e-4)
    exp = oracles.relvel(1.0, 0.2, 0.7, 0.4, 1.1)
    got = relative_velocity(1.0, 0.2, 0.7, 0.4, 1.1, 3.0)
    assert (got.V_R, got.V_alpha, got.V_beta) == pytest.approx(exp, abs=1e-14)
    assert got.alpha_dot == pytest.approx(exp[1] / 3.0)
    assert got.beta_dot == pytest.approx(exp[2] / (3.0 * math.cos(0.4)))


def test_relative_velocity_singular():
    with pytest.raises(SingularGeometryError):
        relative_velocity(1.0, 0.0, 1.0, math.pi / 2, 0.0, 2.0)
    with pytest.raises(ValueError):
        relative_velocity(-1.0, 0.0, 0.0, 0.0, 0.0, 1.0)


def test_relative_states_range_identity():
    for s in relative_states((3, 4, 5), (1.0, 0.1, 0.9), W):
        assert s.R ** 2 == pytest.approx(s.R_xy ** 2 + s.R_z ** 2, rel=1e-12)


def test_displacement_examples():
    d = displacements((0, 0, 0), W)
    assert (d.D_x, d.D_z) == pytest.approx((-14.0, -11.5), abs=1e-12)
    d = displacements((16, 5, 10), W)
    assert (d.D_x, d.D_z) == pytest.approx((2.0, -1.5), abs=1e-12)
    d = displacements((14, 10, 11.5), W)
    assert d.D == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(approach)
def test_displacement_forms_agree(p):
    a, b = displacements(p, W), displacements_world(p, W)
    assert abs(a.D_x - b.D_x) < 1e-9 and abs(a.D_z - b.D_z) < 1e-9


@settings(max_examples=300, deadline=None)
@given(st.tuples(st.floats(-40, 70), st.floats(-40, 14.5), st.floats(-40, 60)))
def test_similar_triangle_identities(p):
    r = similar_triangle_ratios(p, W)
    assert r[0] == pytest.approx(r[1], rel=1e-9)
    assert r[2] == pytest.approx(r[3], rel=1e-9)


def test_lyapunov_examples():
    s = lyapunov(DisplacementState(0.0, 0.0), 0.3, 0.2, 1.0)
    assert s.W == 0.0 and s.W_dot == 0.0
    s = lyapunov(displacements((0, 0, 0), W), 0.5, 0.4, 1.0)
    assert s.W == pytest.approx(164.125)
    assert s.W_dot < 0.0


def test_position_from_bearings_round_trip():
    for p in [(0, 0, 0), (28, 2, 0), (3, 14, 25)]:
        b = bearing_angles(p, W)
        q = position_from_bearings(b.alpha[0], b.alpha[3], b.beta[0], b.beta[1], W)
        assert math.dist(tuple(q), p) < 1e-9
    ic = [math.radians(v) for v in (36.82, 21.96, 54.77, 38.21)]
    q = position_from_bearings(*ic, W)
    # published angles are rounded to 0.01 deg; the recovered point must reproduce them
    _, a, be = oracles.bearings(tuple(q))
    got = [math.degrees(v) for v in (a[0], a[3], be[0], be[1])]
    assert got == pytest.approx([36.82, 21.96, 54.77, 38.21], abs=0.01)


def test_position_from_bearings_on_plane_and_invalid():
    q = position_from_bearings(ALPHA_T, -ALPHA_T, math.pi, 0.0, W)
    assert tuple(q) == pytest.approx((14.0, 15.0, 11.5))
    with pytest.raises(InvalidScenarioError):
        position_from_bearings(0.5, 0.9, 1.0, 0.5, W)
    with pytest.raises(InvalidScenarioError):
        position_from_bearings(0.1, 0.0, 0.5, 0.5, W)
