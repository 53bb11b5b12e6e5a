"""Command-line entry point.

Exit codes: 0 converged and safe, 1 unexpected error, 2 invalid config,
3 timeout (window plane not reached), 4 diverged, 5 crossed outside the
window, 6 degenerate geometry (vehicle hit a vertex).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import io
from .config import ScenarioConfig, load_config
from .errors import ConfigError, GeometryError, InvalidScenarioError
from .experiments import run_monte_carlo
from .kinematic import phase_portrait, run_kinematic
from .noise import NoiseConfig
from .results import RunResult, RunStatus
from .sixdof import run_sixdof

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_TIMEOUT = 3
EXIT_DIVERGED = 4
EXIT_UNSAFE = 5
EXIT_DEGENERATE = 6


def exit_code(result: RunResult) -> int:
    if result.status is RunStatus.TIMEOUT:
        return EXIT_TIMEOUT
    if result.status is RunStatus.DIVERGED:
        return EXIT_DIVERGED
    if result.status is RunStatus.DEGENERATE:
        return EXIT_DEGENERATE
    return EXIT_OK if result.safe else EXIT_UNSAFE


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    mc = {}
    if args.fidelity is not None:
        changes["fidelity"] = args.fidelity
    if args.dt is not None:
        if not args.dt > 0.0:
            raise ConfigError("--dt must be positive")
        changes["dt"] = args.dt
        mc["dt"] = args.dt
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must fit in an unsigned 64-bit integer")
        sigma = cfg.noise.sigma if cfg.noise else 0.0
        changes["noise"] = NoiseConfig(sigma, args.seed)
        mc["master_seed"] = args.seed
    if args.sigma_deg is not None:
        if not (args.sigma_deg >= 0.0 and math.isfinite(args.sigma_deg)):
            raise ConfigError("--sigma-deg must be finite and non-negative")
        seed = changes.get("noise", cfg.noise).seed if changes.get("noise", cfg.noise) else 0
        changes["noise"] = NoiseConfig.from_degrees(args.sigma_deg, seed)
        mc["sigma_list"] = (math.radians(args.sigma_deg),)
    if getattr(args, "workers", None) is not None:
        changes["mc_workers"] = args.workers
    if getattr(args, "n_runs", None) is not None:
        mc["n_runs"] = args.n_runs
    if args.out is not None:
        changes["out_dir"] = Path(args.out)
    if args.plots:
        changes["plots"] = True
    try:
        if mc:
            changes["montecarlo"] = dataclasses.replace(cfg.montecarlo, **mc)
        return dataclasses.replace(cfg, **changes)
    except InvalidScenarioError as e:
        raise ConfigError(str(e)) from e


def _emit(obj: dict, quiet: bool, stream=None) -> None:
    if not quiet:
        (stream or sys.stdout).write(json.dumps(io._jsonable(obj), sort_keys=True) + "\n")


def simulate(cfg: ScenarioConfig) -> RunResult:
    if cfg.fidelity == "kinematic":
        return run_kinematic(cfg.start, cfg.window, cfg.guidance, dt=cfg.dt, t_max=cfg.t_max)
    noise = cfg.noise if cfg.noise is not None and cfg.noise.sigma > 0.0 else None
    return run_sixdof(cfg.start, cfg.window, cfg.guidance, cfg.gains, cfg.params, dt=cfg.dt, t_max=cfg.t_max,
                      noise=noise, tilt_limit=cfg.tilt_limit, diverge_tilt=cfg.diverge_tilt)


def cmd_run(cfg: ScenarioConfig, quiet: bool = False) -> int:
    res = simulate(cfg)
    out = cfg.out_dir
    io.write_trajectory_csv(res, out / "trajectory.csv")
    summary = res.summary()
    code = exit_code(res)
    summary["exit_code"] = code
    if cfg.plots:
        from .plotting import plot_run
        summary["figures"] = [str(p) for p in plot_run(res, out)]
    io.write_json(summary, out / "summary.json")
    _emit(summary, quiet)
    return code


def cmd_montecarlo(cfg: ScenarioConfig, quiet: bool = False) -> int:
    spec = cfg.montecarlo
    workers = cfg.mc_workers if cfg.mc_workers > 0 else None
    stats = run_monte_carlo(spec, workers=workers)
    out = cfg.out_dir
    io.write_stats_csv(stats, out / "stats.csv")
    io.write_runs_csv(stats, out / "runs.csv")
    summary = {
        "n_runs": spec.n_runs,
        "master_seed": spec.master_seed,
        "stats": [dataclasses.asdict(r) | {"sigma_deg": r.sigma_deg} for r in stats.rows],
    }
    if cfg.plots:
        from .plotting import plot_monte_carlo
        summary["figures"] = [str(plot_monte_carlo(stats, out / "montecarlo.png"))]
    io.write_json(summary, out / "montecarlo_summary.json")
    if not quiet:
        for r in stats.rows:
            sys.stdout.write(f"sigma_deg={io.fmt(r.sigma_deg)},mean_miss_m={io.fmt(r.mean_miss)},"
                             f"std_miss_m={io.fmt(r.std_miss)},success_rate={io.fmt(r.success_rate)},n={r.n}\n")
    all_ok = all(r.success_rate == 1.0 for r in stats.rows)
    return EXIT_OK if all_ok else EXIT_UNSAFE


def cmd_phase_portrait(cfg: ScenarioConfig, quiet: bool = False) -> int:
    out = cfg.out_dir
    summary = {"planes": {}}
    figures = []
    for plane in cfg.planes:
        pp = phase_portrait(plane, cfg.initial_conditions, cfg.window, cfg.guidance,
                            dt=cfg.dt if cfg.fidelity == "kinematic" else 0.005, t_max=cfg.t_max)
        path = io.write_portrait_csv(pp, out / f"portrait_{plane}.csv")
        errs = pp.final_errors()
        summary["planes"][plane] = {
            "csv": str(path),
            "equilibrium_deg": [math.degrees(v) for v in pp.equilibrium],
            "n_trajectories": len(pp.trajectories),
            "max_final_error_deg": float(math.degrees(errs.max())),
        }
        if cfg.plots:
            from .plotting import plot_phase_portrait
            figures.append(str(plot_phase_portrait(pp, out / f"portrait_{plane}.png")))
    if figures:
        summary["figures"] = figures
    io.write_json(summary, out / "portrait_summary.json")
    _emit(summary, quiet)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wintraverse",
                                description="Bearing-only window traversal guidance simulator")
    sub = p.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML scenario file (defaults to the reference scenario)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="noise seed / Monte Carlo master seed")
    common.add_argument("--sigma-deg", type=float, help="bearing noise standard deviation in degrees")
    common.add_argument("--fidelity", choices=("kinematic", "sixdof"))
    common.add_argument("--dt", type=float, help="integration step in seconds")
    common.add_argument("--quiet", action="store_true", help="suppress stdout output")
    common.add_argument("--plots", action="store_true", help="also render PNG figures")
    sub.add_parser("run", parents=[common], help="simulate one approach")
    mc = sub.add_parser("montecarlo", parents=[common], help="batch runs over random starts and noise levels")
    mc.add_argument("--workers", type=int, help="worker processes (0 = all cores)")
    mc.add_argument("--n-runs", type=int, help="runs per noise level")
    sub.add_parser("phase-portrait", parents=[common], help="bearing-angle phase portraits")
    sub.add_parser("validate-config", parents=[common], help="parse and validate a config, then exit")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    quiet = args.quiet
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as e:
        _emit({"error": "config_invalid", "message": str(e), "exit_code": EXIT_CONFIG}, False, sys.stderr)
        return EXIT_CONFIG
    if args.verb == "validate-config":
        _emit({"valid": True, "fidelity": cfg.fidelity}, quiet)
        return EXIT_OK
    try:
        if args.verb == "run":
            return cmd_run(cfg, quiet)
        if args.verb == "montecarlo":
            return cmd_montecarlo(cfg, quiet)
        return cmd_phase_portrait(cfg, quiet)
    except (GeometryError, InvalidScenarioError) as e:
        _emit({"error": type(e).__name__, "message": str(e), "exit_code": EXIT_CONFIG}, False, sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - reported, not swallowed
        _emit({"error": type(e).__name__, "message": str(e), "exit_code": EXIT_ERROR}, False, sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
