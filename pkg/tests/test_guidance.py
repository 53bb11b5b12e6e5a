import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wintraverse.errors import DomainError
from wintraverse.geometry import REFERENCE_WINDOW, BearingSet, Vec3, bearing_angles
from wintraverse.guidance import (GuidanceConfig, chi_des, desired_position, gamma_des, guidance_field,
                                  guidance_step, shaping_chi, shaping_gamma, traversal_condition)

PI = math.pi
ALPHA_T = math.asin(0.6)
elev = st.floats(-PI / 2, PI / 2)
azim = st.floats(0.0, PI)


def centroid_bearings():
    return BearingSet((ALPHA_T, ALPHA_T, -ALPHA_T, -ALPHA_T), (PI, 0.0, 0.0, PI))


def test_shaping_gamma_examples():
    assert shaping_gamma(PI / 2) == PI / 4
    assert shaping_gamma(-PI / 2) == -PI / 4
    assert shaping_gamma(0.0) == 0.0
    assert shaping_gamma(PI / 4) == pytest.approx(PI * math.sqrt(3) / 8, abs=1e-15)
    assert PI * math.sqrt(3) / 8 == pytest.approx(0.6802, abs=1e-4)


def test_shaping_gamma_continuous_at_zero():
    assert abs(shaping_gamma(1e-12)) < 1e-5 and abs(shaping_gamma(-1e-12)) < 1e-5


def test_shaping_domain_errors():
    with pytest.raises(DomainError):
        shaping_gamma(2.0)
    with pytest.raises(DomainError):
        shaping_chi(-0.1, 1.0)
    with pytest.raises(DomainError):
        gamma_des(0.0, 1.7)


def test_shaping_chi_examples():
    assert shaping_chi(PI / 2, PI / 2) == 0.0
    assert shaping_chi(PI, 0.0) == 0.0
    assert shaping_chi(0.3, PI - 0.3) == pytest.approx(0.0, abs=1e-7)
    sc = shaping_chi(math.radians(54.77), math.radians(38.21))
    assert sc == pytest.approx(-0.6725, abs=5e-4)
    assert math.degrees(sc) == pytest.approx(-38.53, abs=0.01)


def test_gamma_des_examples():
    assert gamma_des(PI / 2, PI / 2) == PI / 4
    assert gamma_des(-PI / 2, -PI / 2) == -PI / 4
    assert gamma_des(ALPHA_T, -ALPHA_T) == 0.0
    assert gamma_des(PI / 4, PI / 4) == pytest.approx(PI / 4 + PI * math.sqrt(3) / 8, abs=1e-15)
    assert gamma_des(PI / 4, PI / 4) == pytest.approx(1.4656, abs=1e-4)


def test_chi_des_examples():
    assert chi_des(PI, 0.0, ALPHA_T, -ALPHA_T) == PI / 2
    ic = [math.radians(v) for v in (54.77, 38.21, 36.82, 21.96)]
    c = chi_des(*ic)
    assert math.degrees(c) == pytest.approx(7.96, abs=0.01)
    assert c == pytest.approx(0.139, abs=1e-3)
    assert chi_des(PI / 2, PI / 2, PI / 2, PI / 2) == -PI / 2


@settings(max_examples=500, deadline=None)
@given(elev, elev, azim, azim)
def test_commands_match_oracle_and_ranges(a1, a4, b1, b2):
    g = gamma_des(a1, a4)
    c = chi_des(b1, b2, a1, a4)
    assert g == pytest.approx(oracles.gamma_cmd(a1, a4)[0], abs=1e-12)
    oc = oracles.chi_cmd(b1, b2, a1, a4)
    # both wrap to [-pi, pi); compare on the circle
    assert abs(math.remainder(c - oc, 2 * PI)) < 1e-12
    assert -PI / 2 <= g <= PI / 2
    assert -PI <= c < PI
    assert abs(shaping_gamma(0.5 * (a1 + a4))) <= PI / 4 + 1e-15


def test_traversal_condition():
    tol = math.radians(0.5)
    assert traversal_condition(centroid_bearings(), tol)
    b = BearingSet((0, 0, 0, 0), (PI / 2, PI / 4, 0.0, 0.0))
    assert not traversal_condition(b, tol)
    b = BearingSet((0, 0, 0, 0), (math.radians(179.7), math.radians(0.4), 0.0, 0.0))
    assert traversal_condition(b, tol)


def test_guidance_step_fixed_point_and_latch():
    cfg = GuidanceConfig(V=2.0)
    cmd = guidance_step(centroid_bearings(), cfg)
    assert cmd.traversal_latched
    assert (cmd.gamma_des, cmd.chi_des) == (0.0, PI / 2)
    assert tuple(cmd.v_des) == pytest.approx((0.0, 2.0, 0.0), abs=1e-15)
    # once latched, any bearings give the terminal command
    far = bearing_angles((0, 0, 0), REFERENCE_WINDOW)
    cmd2 = guidance_step(far, cfg, latched=True)
    assert cmd2.traversal_latched and (cmd2.gamma_des, cmd2.chi_des) == (0.0, PI / 2)


def test_guidance_step_origin_quadrant_and_speed():
    cmd = guidance_step(bearing_angles((0, 0, 0), REFERENCE_WINDOW), GuidanceConfig())
    assert not cmd.traversal_latched
    assert 0 < cmd.gamma_des < PI / 2 and 0 < cmd.chi_des < PI / 2
    assert cmd.v_des.norm() == pytest.approx(1.0, abs=1e-15)


def test_guidance_fixed_point_on_centroid_line():
    cmd = guidance_step(bearing_angles((14, 5, 11.5), REFERENCE_WINDOW), GuidanceConfig())
    assert cmd.gamma_des == pytest.approx(0.0, abs=1e-12)
    assert cmd.chi_des == pytest.approx(PI / 2, abs=1e-12)


def test_alternate_vertex_pair_equivalent():
    rng = np.random.default_rng(0)
    pts = rng.uniform([0, 0, 0], [30, 14, 20], (500, 3))
    a = guidance_field(pts, REFERENCE_WINDOW, GuidanceConfig())
    b = guidance_field(pts, REFERENCE_WINDOW, GuidanceConfig(vertex_pair="alternate"))
    # both formulations steer to the same line: same quadrant memberships
    assert np.all(np.sign(a[:, 0]) == np.sign(b[:, 0]))
    assert np.all(np.sign(np.cos(a[:, 1])) == np.sign(np.cos(b[:, 1])))


def test_desired_position():
    assert tuple(desired_position(Vec3(0, 0, 0), Vec3(0, 1, 0), 0.01)) == (0.0, 0.01, 0.0)
    p = Vec3(1, 2, 3)
    v = Vec3(0.3, -0.2, 0.1)
    for _ in range(100):
        p = desired_position(p, v, 0.01)
    assert tuple(p) == pytest.approx((1.3, 1.8, 3.1), abs=1e-12)
    with pytest.raises(ValueError):
        desired_position(p, v, 0.0)


def test_guidance_field_wdot_negative_off_line():
    rng = np.random.default_rng(1)
    pts = rng.uniform([-20, -20, -20], [50, 14.9, 40], (20000, 3))
    g, c, dx, dz = guidance_field(pts, REFERENCE_WINDOW).T
    wd = dx * np.cos(g) * np.cos(c) + dz * np.sin(g)
    assert np.all(wd < 0)


def test_config_validation():
    with pytest.raises(ValueError):
        GuidanceConfig(V=0.0)
    with pytest.raises(ValueError):
        GuidanceConfig(vertex_pair="other")
