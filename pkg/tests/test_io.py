import json
import math

import numpy as np
import pytest

from wintraverse.experiments import MonteCarloSpec, run_monte_carlo
from wintraverse.io import (PORTRAIT_COLUMNS, RUNS_COLUMNS, STATS_COLUMNS, fmt, read_portrait_csv,
                            read_stats_csv, read_trajectory_csv, write_json, write_portrait_csv,
                            write_runs_csv, write_stats_csv, write_trajectory_csv)
from wintraverse.kinematic import phase_portrait, run_kinematic
from wintraverse.results import TRAJECTORY_COLUMNS


def test_fmt():
    assert fmt(0.1) == "0.1" and fmt(1 / 3) == "0.333333333"
    assert fmt(math.nan) == "nan" and fmt(-math.inf) == "-inf"
    assert fmt(np.float64(2.0)) == "2"


def test_trajectory_round_trip(tmp_path):
    r = run_kinematic((0, 0, 0), t_max=2.0)
    p = write_trajectory_csv(r, tmp_path / "a" / "traj.csv")
    raw = p.read_bytes()
    assert b"\r" not in raw
    assert raw.split(b"\n", 1)[0].decode() == ",".join(TRAJECTORY_COLUMNS)
    back = read_trajectory_csv(p)
    assert back.shape == r.trace.shape
    assert np.allclose(back, r.trace, rtol=1e-8, atol=1e-12)


def test_trajectory_header_checked(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("t,x\n0,1\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_trajectory_csv(p)


def test_json_nonfinite_to_null(tmp_path):
    p = write_json({"b": math.nan, "a": [1.0, np.float64(math.inf)], "c": np.int64(3)}, tmp_path / "s.json")
    text = p.read_text(encoding="utf-8")
    assert json.loads(text) == {"a": [1.0, None], "b": None, "c": 3}
    assert text.index('"a"') < text.index('"b"')


def test_stats_and_runs_schema(tmp_path):
    stats = run_monte_carlo(MonteCarloSpec(n_runs=2, sigma_list=(0.0, math.radians(3.0)), t_max=60.0))
    p = write_stats_csv(stats, tmp_path / "stats.csv")
    assert p.read_text(encoding="utf-8").splitlines()[0] == ",".join(STATS_COLUMNS)
    rows = read_stats_csv(p)
    assert [r["sigma_deg"] for r in rows] == [0.0, 3.0]
    assert rows[0]["n"] == 2 and rows[0]["mean_miss_m"] == pytest.approx(stats.rows[0].mean_miss, rel=1e-8)
    q = write_runs_csv(stats, tmp_path / "runs.csv")
    lines = q.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(RUNS_COLUMNS) and len(lines) == 5


def test_portrait_round_trip(tmp_path):
    pp = phase_portrait("beta1_beta2")
    p = write_portrait_csv(pp, tmp_path / "pp.csv")
    assert p.read_text(encoding="utf-8").splitlines()[0] == ",".join(PORTRAIT_COLUMNS)
    back = read_portrait_csv(p)
    assert sorted(back) == [-1] + list(range(11))
    assert back[-1][0, 1:] == pytest.approx([180.0, 0.0])
    assert math.isnan(back[-1][0, 0])
    assert back[0][:, 1] == pytest.approx(np.degrees(pp.trajectories[0][:, 0]), rel=1e-8)
