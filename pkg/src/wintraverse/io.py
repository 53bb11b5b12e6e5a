"""CSV/JSON writers and readers for traces, summaries and statistics.

Numbers are printed with 9 significant digits using '.' as the decimal
separator regardless of locale; files are UTF-8 with LF line endings.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .experiments import MonteCarloStats
from .kinematic import PhasePortrait
from .results import TRAJECTORY_COLUMNS, RunResult

STATS_COLUMNS = ("sigma_deg", "mean_miss_m", "std_miss_m", "success_rate", "n")
RUNS_COLUMNS = ("sigma_deg", "run_index", "x0", "y0", "z0", "status", "converged", "safe",
                "miss_m", "t_T", "max_tilt_cmd_deg")
PORTRAIT_COLUMNS = ("trajectory_id", "t", "angle_a_deg", "angle_b_deg")


def fmt(v: float) -> str:
    """9 significant digits, locale independent."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def write_trajectory_csv(result: RunResult, path: str | Path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        w = _writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for row in result.trace:
            w.writerow([fmt(v) for v in row])
    return path


def read_trajectory_csv(path: str | Path) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header in {path}")
        rows = [[float(v) for v in line] for line in r]
    return np.array(rows, dtype=float).reshape(-1, len(TRAJECTORY_COLUMNS))


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_json(obj: dict, path: str | Path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_stats_csv(stats: MonteCarloStats, path: str | Path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        w = _writer(fh)
        w.writerow(STATS_COLUMNS)
        for s in stats.rows:
            w.writerow([fmt(s.sigma_deg), fmt(s.mean_miss), fmt(s.std_miss), fmt(s.success_rate), s.n])
    return path


def read_stats_csv(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [{k: (int(v) if k == "n" else float(v)) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_runs_csv(stats: MonteCarloStats, path: str | Path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        w = _writer(fh)
        w.writerow(RUNS_COLUMNS)
        for r in stats.records:
            w.writerow([fmt(math.degrees(r.sigma)), r.run_index, *(fmt(v) for v in r.start), r.status,
                        int(r.converged), int(r.safe), fmt(r.miss), fmt(r.t_T), fmt(math.degrees(r.max_tilt_cmd))])
    return path


def write_portrait_csv(portrait: PhasePortrait, path: str | Path) -> Path:
    """One row per sample; the equilibrium is a final record with trajectory_id -1."""
    path = Path(path)
    with _open(path) as fh:
        w = _writer(fh)
        w.writerow(PORTRAIT_COLUMNS)
        for i, tr in enumerate(portrait.trajectories):
            for a, b, t in tr:
                w.writerow([i, fmt(t), fmt(math.degrees(a)), fmt(math.degrees(b))])
        ea, eb = portrait.equilibrium
        w.writerow([-1, "nan", fmt(math.degrees(ea)), fmt(math.degrees(eb))])
    return path


def read_portrait_csv(path: str | Path) -> dict[int, np.ndarray]:
    """Map trajectory id to an (n, 3) array of (t, angle_a_deg, angle_b_deg)."""
    out: dict[int, list] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["trajectory_id"]), []).append(
                [float(row["t"]), float(row["angle_a_deg"]), float(row["angle_b_deg"])])
    return {k: np.array(v) for k, v in out.items()}


def write_lines(lines: Iterable[str], path: str | Path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        for line in lines:
            fh.write(line + "\n")
    return path
