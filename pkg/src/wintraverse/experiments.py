"""Reference scenarios, noisy-bearing runs and the Monte Carlo harness."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidScenarioError
from .geometry import REFERENCE_WINDOW, Vec3, WindowSpec
from .guidance import GuidanceConfig
from .noise import NoiseConfig, corrupt_bearings, make_generator, standard_draws
from .results import RunResult
from .sixdof import DEFAULT_DT, ControllerGains, QuadParams, run_sixdof

__all__ = [
    "NoiseConfig", "corrupt_bearings", "make_generator",
    "StartBox", "MonteCarloSpec", "SigmaStats", "MonteCarloStats", "RunRecord",
    "run_case1", "run_case2", "run_monte_carlo", "sample_start", "distance_history",
]

CASE1_START = (0.0, 0.0, 0.0)

# substream tags so start and noise streams never share a spawn key
_TAG_START = 0
_TAG_NOISE = 1


@dataclass(frozen=True)
class StartBox:
    x: tuple[float, float] = (0.0, 30.0)
    y: tuple[float, float] = (0.0, 14.0)
    z: tuple[float, float] = (0.0, 20.0)

    def __post_init__(self):
        for name in ("x", "y", "z"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise InvalidScenarioError(f"start_box.{name} must be a finite [lo, hi] range, got {(lo, hi)}")

    @property
    def lo(self) -> np.ndarray:
        return np.array([self.x[0], self.y[0], self.z[0]])

    @property
    def hi(self) -> np.ndarray:
        return np.array([self.x[1], self.y[1], self.z[1]])


@dataclass(frozen=True)
class MonteCarloSpec:
    """Batch of 6-DOF runs over random starts and a list of noise levels.

    ``sigma_list`` is in radians.  Starts are drawn uniformly from
    ``start_box`` and re-drawn while they lie within ``min_standoff`` of the
    window plane (or past it).  The same start is used for run ``i`` at every
    sigma.  ``starts`` replaces sampling with explicit positions.
    """

    n_runs: int = 100
    sigma_list: tuple[float, ...] = tuple(math.radians(s) for s in range(1, 8))
    master_seed: int = 0
    start_box: StartBox = field(default_factory=StartBox)
    window: WindowSpec = REFERENCE_WINDOW
    guidance: GuidanceConfig = field(default_factory=GuidanceConfig)
    gains: ControllerGains = field(default_factory=ControllerGains)
    params: QuadParams = field(default_factory=QuadParams)
    dt: float = DEFAULT_DT
    t_max: float = 120.0
    min_standoff: float = 0.5
    starts: tuple[tuple[float, float, float], ...] | None = None

    def __post_init__(self):
        if int(self.n_runs) < 1:
            raise InvalidScenarioError(f"n_runs must be >= 1, got {self.n_runs}")
        if not self.sigma_list:
            raise InvalidScenarioError("sigma_list must not be empty")
        if any(not (s >= 0.0 and math.isfinite(s)) for s in self.sigma_list):
            raise InvalidScenarioError("every sigma must be finite and non-negative")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise InvalidScenarioError("master_seed must fit in an unsigned 64-bit integer")
        if self.min_standoff < 0.0:
            raise InvalidScenarioError("min_standoff must be non-negative")
        if self.starts is not None:
            if len(self.starts) != self.n_runs:
                raise InvalidScenarioError("explicit starts must have one entry per run")
            for s in self.starts:
                if Vec3.of(s).y >= self.window.plane_y:
                    raise InvalidScenarioError(f"start {tuple(s)} is not on the approach side")
        elif self.start_box.y[0] >= self.window.plane_y - self.min_standoff:
            raise InvalidScenarioError("start_box has no approach-side region")


@dataclass(frozen=True)
class RunRecord:
    sigma_index: int
    run_index: int
    sigma: float
    start: tuple[float, float, float]
    status: str
    converged: bool
    safe: bool
    miss: float
    t_T: float
    max_tilt_cmd: float


@dataclass(frozen=True)
class SigmaStats:
    sigma: float
    mean_miss: float
    std_miss: float
    success_rate: float
    n: int
    n_failed: int

    @property
    def sigma_deg(self) -> float:
        return math.degrees(self.sigma)


@dataclass
class MonteCarloStats:
    rows: list[SigmaStats]
    records: list[RunRecord]

    def by_sigma_deg(self, sigma_deg: float) -> SigmaStats:
        for r in self.rows:
            if abs(r.sigma_deg - sigma_deg) < 1e-9:
                return r
        raise KeyError(sigma_deg)


def run_case1(window: WindowSpec = REFERENCE_WINDOW, cfg: GuidanceConfig | None = None,
              gains: ControllerGains = ControllerGains(), params: QuadParams = QuadParams(),
              dt: float = DEFAULT_DT, t_max: float = 120.0) -> RunResult:
    """Noise-free 6-DOF approach from the origin."""
    return run_sixdof(CASE1_START, window, cfg, gains, params, dt=dt, t_max=t_max)


def run_case2(sigma: float = math.radians(4.0), seed: int = 0, window: WindowSpec = REFERENCE_WINDOW,
              cfg: GuidanceConfig | None = None, gains: ControllerGains = ControllerGains(),
              params: QuadParams = QuadParams(), dt: float = DEFAULT_DT, t_max: float = 120.0) -> RunResult:
    """Case-1 scenario with unfiltered noisy bearings driving the guidance."""
    if not sigma >= 0.0:
        raise ValueError("sigma must be non-negative")
    noise = NoiseConfig(sigma, seed) if sigma > 0.0 else None
    res = run_sixdof(CASE1_START, window, cfg, gains, params, dt=dt, t_max=t_max, noise=noise)
    res.extras["seed"] = seed
    return res


def distance_history(res: RunResult) -> np.ndarray:
    """Distance from the window centroid at every sample."""
    c = res.window.centroid.as_array()
    return np.linalg.norm(res.trace[:, 1:4] - c, axis=1)


def sample_start(spec: MonteCarloSpec, run_index: int) -> tuple[float, float, float]:
    if spec.starts is not None:
        return tuple(float(v) for v in spec.starts[run_index])
    gen = make_generator(spec.master_seed, _TAG_START, run_index)
    lo, hi = spec.start_box.lo, spec.start_box.hi
    y_max = spec.window.plane_y - spec.min_standoff
    for _ in range(10_000):
        p = gen.uniform(lo, hi)
        if p[1] < y_max:
            return tuple(float(v) for v in p)
    raise InvalidScenarioError("start rejection sampling did not find an approach-side position")


def _one_run(spec: MonteCarloSpec, sigma_index: int, run_index: int) -> RunRecord:
    sigma = float(spec.sigma_list[sigma_index])
    start = sample_start(spec, run_index)
    n_max = int(math.ceil(spec.t_max / spec.dt)) + 1
    noise = draws = None
    if sigma > 0.0:
        noise = NoiseConfig(sigma, spec.master_seed)
        draws = standard_draws(make_generator(spec.master_seed, _TAG_NOISE, sigma_index, run_index), n_max)
    res = run_sixdof(start, spec.window, spec.guidance, spec.gains, spec.params, dt=spec.dt,
                     t_max=spec.t_max, noise=noise, noise_draws=draws)
    return RunRecord(sigma_index, run_index, sigma, start, res.status.value, res.converged, res.safe,
                     res.miss_distance, res.t_T, res.max_tilt_cmd)


def _run_chunk(args) -> list[RunRecord]:
    spec, jobs = args
    return [_one_run(spec, si, ri) for si, ri in jobs]


def _aggregate(spec: MonteCarloSpec, records: list[RunRecord]) -> list[SigmaStats]:
    rows = []
    for si, sigma in enumerate(spec.sigma_list):
        recs = [r for r in records if r.sigma_index == si]
        miss = np.array([r.miss for r in recs if r.converged], dtype=float)
        n_ok = sum(1 for r in recs if r.converged and r.safe)
        mean = float(np.mean(miss)) if miss.size else math.nan
        std = float(np.std(miss)) if miss.size else math.nan
        rows.append(SigmaStats(float(sigma), mean, std, n_ok / spec.n_runs, spec.n_runs,
                               sum(1 for r in recs if not r.converged)))
    return rows


def run_monte_carlo(spec: MonteCarloSpec, workers: int | None = 1, chunk: int = 10) -> MonteCarloStats:
    """Run every (sigma, run) pair and reduce per sigma in run-index order.

    Each run draws its start and noise from its own substream of
    ``master_seed``, so results do not depend on ``workers``.  Failed runs
    are recorded and excluded from the miss statistics; the success rate is
    the fraction of all runs that converged inside the window.
    """
    jobs = [(si, ri) for si in range(len(spec.sigma_list)) for ri in range(spec.n_runs)]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= chunk:
        records = _run_chunk((spec, jobs))
    else:
        chunks = [(spec, jobs[i:i + chunk]) for i in range(0, len(jobs), chunk)]
        records = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, chunks):
                records.extend(part)
    records.sort(key=lambda r: (r.sigma_index, r.run_index))
    return MonteCarloStats(_aggregate(spec, records), records)


def sigma_list_from_degrees(values: Sequence[float]) -> tuple[float, ...]:
    return tuple(math.radians(float(v)) for v in values)
