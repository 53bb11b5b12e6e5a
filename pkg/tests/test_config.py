import math

import pytest

from wintraverse.config import CASE1_TOML, load_config, parse_config
from wintraverse.errors import ConfigError
from wintraverse.geometry import REFERENCE_WINDOW
from wintraverse.sixdof import ControllerGains, QuadParams


def test_empty_config_gives_reference_scenario():
    c = parse_config("")
    assert c.window == REFERENCE_WINDOW and tuple(c.start) == (0.0, 0.0, 0.0)
    assert c.fidelity == "sixdof" and c.dt == 0.002 and c.t_max == 120.0
    assert c.gains == ControllerGains() and c.params == QuadParams()
    assert c.tilt_limit == pytest.approx(math.radians(20.0))
    assert c.noise is None and c.montecarlo.n_runs == 100 and len(c.montecarlo.sigma_list) == 7
    assert load_config(None) == c


def test_case1_document_matches_defaults():
    c = parse_config(CASE1_TOML)
    d = parse_config("")
    assert c.window == d.window and c.gains == d.gains and c.params == d.params
    assert c.montecarlo.sigma_list == d.montecarlo.sigma_list


def test_kinematic_default_dt():
    assert parse_config('[scenario]\nfidelity = "kinematic"\n').dt == 0.005


def test_noise_in_degrees():
    c = parse_config("[noise]\nsigma_deg = 4\nseed = 3\n")
    assert c.noise.sigma == pytest.approx(0.06981, abs=1e-5) and c.noise.seed == 3


def test_non_coplanar_window():
    doc = "[window]\ne1 = [12, 15, 13]\ne2 = [16, 16, 13]\ne3 = [16, 15, 10]\ne4 = [12, 15, 10]\n"
    with pytest.raises(ConfigError, match="vertices not coplanar"):
        parse_config(doc)


def test_parse_error_carries_line():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("[scenario]\nV = 1.0\ndt = = 2\n")


@pytest.mark.parametrize("doc, field", [
    ("[scenario]\nspeed = 1\n", "speed"),
    ("[extras]\na = 1\n", "extras"),
    ("[scenario]\nV = -1\n", "scenario.V"),
    ("[scenario]\nfidelity = \"full\"\n", "fidelity"),
    ("[scenario]\nstart = [0, 20, 0]\n", "scenario.start"),
    ("[scenario]\nstart = [0, 0]\n", "scenario.start"),
    ("[scenario]\ndt = 5.0\nt_max = 1.0\n", "dt"),
    ("[vehicle]\nm = 0\n", "vehicle.m"),
    ("[gains]\nK_pz = -1\n", "K_pz"),
    ("[noise]\nsigma_deg = -2\n", "noise"),
    ("[montecarlo]\nn_runs = 0\n", "n_runs"),
    ("[montecarlo]\nsigma_deg = 4\n", "sigma_deg"),
    ("[montecarlo]\nworkers = -1\n", "workers"),
    ("[phase_portrait]\nplanes = [\"gamma\"]\n", "planes"),
    ("[output]\nplots = \"yes\"\n", "plots"),
    ("[window]\ne1 = [12, 15, 13]\n", "missing"),
])
def test_invalid_values_name_the_field(doc, field):
    with pytest.raises(ConfigError, match=field):
        parse_config(doc)


def test_phase_portrait_ics_in_degrees():
    c = parse_config("[phase_portrait]\ninitial_conditions_deg = [[36.82, 21.96, 54.77, 38.21]]\n")
    assert c.initial_conditions[0][0] == pytest.approx(math.radians(36.82))


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.toml")
    p = tmp_path / "bad.toml"
    p.write_bytes(b"\xff\xfe")
    with pytest.raises(ConfigError, match="UTF-8"):
        load_config(p)
    p.write_text(CASE1_TOML, encoding="utf-8")
    assert load_config(p).fidelity == "sixdof"
