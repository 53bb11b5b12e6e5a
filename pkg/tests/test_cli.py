import json
import subprocess
import sys

import numpy as np
import pytest

from wintraverse.cli import main
from wintraverse.io import read_portrait_csv, read_stats_csv, read_trajectory_csv
from wintraverse.results import TRAJECTORY_COLUMNS


def _cfg(tmp_path, text):
    p = tmp_path / "c.toml"
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_run_defaults(tmp_path, capsys):
    rc = main(["run", "--out", str(tmp_path)])
    assert rc == 0
    tr = read_trajectory_csv(tmp_path / "trajectory.csv")
    assert tr.shape[0] >= 4000
    s = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert s["miss_distance"] < 0.1 and s["exit_code"] == 0
    assert json.loads(capsys.readouterr().out)["status"] == "converged"


def test_run_timeout_exit_code(tmp_path):
    cfg = _cfg(tmp_path, "[scenario]\nt_max = 1.0\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 3


def test_kinematic_fidelity_same_schema(tmp_path):
    assert main(["run", "--fidelity", "kinematic", "--out", str(tmp_path), "--quiet"]) == 0
    header = (tmp_path / "trajectory.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == ",".join(TRAJECTORY_COLUMNS)
    tr = read_trajectory_csv(tmp_path / "trajectory.csv")
    assert np.all(tr[:, 7:10] == 0.0)


def test_noisy_run_is_seeded(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["run", "--sigma-deg", "4", "--seed", "11", "--out", str(out), "--quiet"]) == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()


@pytest.mark.parametrize("text", [
    "[window]\ne1 = [12, 15, 13]\ne2 = [16, 16, 13]\ne3 = [16, 15, 10]\ne4 = [12, 15, 10]\n",
    "[montecarlo]\nn_runs = 0\n",
    "[scenario\n",
])
def test_invalid_config_exit_2(tmp_path, capsys, text):
    assert main(["validate-config", "--config", _cfg(tmp_path, text)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "config_invalid" and err["exit_code"] == 2


def test_invalid_overrides(tmp_path):
    assert main(["montecarlo", "--n-runs", "0", "--out", str(tmp_path), "--quiet"]) == 2
    assert main(["run", "--dt", "0", "--out", str(tmp_path), "--quiet"]) == 2
    assert main(["run", "--sigma-deg", "-1", "--out", str(tmp_path), "--quiet"]) == 2


def test_validate_config_ok(capsys):
    assert main(["validate-config"]) == 0
    assert json.loads(capsys.readouterr().out) == {"fidelity": "sixdof", "valid": True}


def test_montecarlo_small(tmp_path, capsys):
    rc = main(["montecarlo", "--n-runs", "3", "--sigma-deg", "2", "--seed", "1", "--out", str(tmp_path)])
    assert rc == 0
    rows = read_stats_csv(tmp_path / "stats.csv")
    assert len(rows) == 1 and rows[0]["n"] == 3 and rows[0]["success_rate"] == 1.0
    assert capsys.readouterr().out.startswith("sigma_deg=2,mean_miss_m=")
    assert len((tmp_path / "runs.csv").read_text(encoding="utf-8").splitlines()) == 4


def test_phase_portrait(tmp_path):
    assert main(["phase-portrait", "--out", str(tmp_path), "--quiet"]) == 0
    for plane in ("alpha1_alpha4", "beta1_beta2"):
        ids = read_portrait_csv(tmp_path / f"portrait_{plane}.csv")
        assert sorted(ids) == [-1] + list(range(11))
    s = json.loads((tmp_path / "portrait_summary.json").read_text(encoding="utf-8"))
    assert all(v["max_final_error_deg"] < 0.5 for v in s["planes"].values())


def test_plots_written(tmp_path):
    assert main(["run", "--plots", "--out", str(tmp_path), "--quiet"]) == 0
    pngs = sorted(p.name for p in tmp_path.glob("*.png"))
    assert len(pngs) == 4
    s = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert len(s["figures"]) == 4


def test_module_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "wintraverse", "validate-config"], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["valid"] is True
