"""TOML scenario configuration.

All sections are optional; missing values fall back to the reference
scenario (4 m x 3 m window at y = 15 m, origin start, V = 1 m/s, 6-DOF).
Angles are given in degrees in the file and stored in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, GeometryError, InvalidScenarioError
from .experiments import MonteCarloSpec, StartBox, sigma_list_from_degrees
from .geometry import REFERENCE_WINDOW, Vec3, WindowSpec
from .guidance import GuidanceConfig
from .kinematic import DEFAULT_DT as KIN_DT
from .kinematic import PLANES
from .noise import NoiseConfig
from .sixdof import DEFAULT_DT as SIXDOF_DT
from .sixdof import DIVERGE_TILT, TILT_LIMIT, ControllerGains, QuadParams

FIDELITIES = ("kinematic", "sixdof")

_SECTIONS = {
    "scenario": {"fidelity", "start", "V", "dt", "t_max", "traversal_tol_deg", "vertex_pair"},
    "window": {"e1", "e2", "e3", "e4"},
    "vehicle": {f.name for f in fields(QuadParams)},
    "gains": {f.name for f in fields(ControllerGains)},
    "controller": {"tilt_limit_deg", "diverge_tilt_rad"},
    "noise": {"sigma_deg", "seed"},
    "montecarlo": {"n_runs", "sigma_deg", "master_seed", "workers", "x", "y", "z", "min_standoff"},
    "phase_portrait": {"planes", "initial_conditions_deg"},
    "output": {"dir", "plots"},
}


@dataclass(frozen=True)
class ScenarioConfig:
    window: WindowSpec = REFERENCE_WINDOW
    start: Vec3 = Vec3(0.0, 0.0, 0.0)
    fidelity: str = "sixdof"
    guidance: GuidanceConfig = field(default_factory=GuidanceConfig)
    dt: float = SIXDOF_DT
    t_max: float = 120.0
    gains: ControllerGains = field(default_factory=ControllerGains)
    params: QuadParams = field(default_factory=QuadParams)
    tilt_limit: float = TILT_LIMIT
    diverge_tilt: float = DIVERGE_TILT
    noise: NoiseConfig | None = None
    montecarlo: MonteCarloSpec = field(default_factory=MonteCarloSpec)
    mc_workers: int = 1
    planes: tuple[str, ...] = PLANES
    initial_conditions: tuple[tuple[float, float, float, float], ...] | None = None
    out_dir: Path = Path("out")
    plots: bool = False


def _num(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    x = float(v)
    if not math.isfinite(x):
        raise ConfigError(f"{where}: must be finite, got {v!r}")
    return x


def _positive(v, where: str) -> float:
    x = _num(v, where)
    if x <= 0.0:
        raise ConfigError(f"{where}: must be positive, got {v!r}")
    return x


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    return v


def _vec(v, where: str, n: int = 3) -> tuple[float, ...]:
    if not isinstance(v, list) or len(v) != n:
        raise ConfigError(f"{where}: expected a list of {n} numbers, got {v!r}")
    return tuple(_num(x, f"{where}[{i}]") for i, x in enumerate(v))


def _check_keys(doc: dict) -> None:
    for name, body in doc.items():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]; expected one of {sorted(_SECTIONS)}")
        if not isinstance(body, dict):
            raise ConfigError(f"[{name}] must be a table")
        extra = set(body) - _SECTIONS[name]
        if extra:
            raise ConfigError(f"[{name}]: unknown key(s) {sorted(extra)}")


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a TOML scenario document.

    Syntax errors raise :class:`ConfigError` carrying the line and column;
    invariant violations raise :class:`ConfigError` naming the field.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config parse error: {e}") from e
    _check_keys(doc)
    sc, win, veh = doc.get("scenario", {}), doc.get("window", {}), doc.get("vehicle", {})
    gn, ctl, nz = doc.get("gains", {}), doc.get("controller", {}), doc.get("noise", {})
    mc, pp, out = doc.get("montecarlo", {}), doc.get("phase_portrait", {}), doc.get("output", {})

    if win:
        missing = {"e1", "e2", "e3", "e4"} - set(win)
        if missing:
            raise ConfigError(f"[window]: missing vertices {sorted(missing)}")
        try:
            window = WindowSpec(*(Vec3(*_vec(win[k], f"window.{k}")) for k in ("e1", "e2", "e3", "e4")))
        except GeometryError as e:
            raise ConfigError(f"[window]: {e}") from e
    else:
        window = REFERENCE_WINDOW

    fidelity = sc.get("fidelity", "sixdof")
    if fidelity not in FIDELITIES:
        raise ConfigError(f"scenario.fidelity: expected one of {FIDELITIES}, got {fidelity!r}")
    start = Vec3(*_vec(sc.get("start", [0.0, 0.0, 0.0]), "scenario.start"))
    if start.y >= window.plane_y:
        raise ConfigError("scenario.start: must lie on the approach side of the window plane (y < plane)")
    vertex_pair = sc.get("vertex_pair", "primary")
    if vertex_pair not in ("primary", "alternate"):
        raise ConfigError(f"scenario.vertex_pair: expected 'primary' or 'alternate', got {vertex_pair!r}")
    guidance = GuidanceConfig(
        V=_positive(sc.get("V", 1.0), "scenario.V"),
        traversal_tol_beta=math.radians(_positive(sc.get("traversal_tol_deg", 0.5), "scenario.traversal_tol_deg")),
        vertex_pair=vertex_pair,
    )
    dt = _positive(sc.get("dt", SIXDOF_DT if fidelity == "sixdof" else KIN_DT), "scenario.dt")
    t_max = _positive(sc.get("t_max", 120.0), "scenario.t_max")
    if dt > t_max:
        raise ConfigError("scenario.dt must not exceed scenario.t_max")

    try:
        params = QuadParams(**{k: _positive(v, f"vehicle.{k}") for k, v in veh.items()})
        gains = ControllerGains(**{k: _num(v, f"gains.{k}") for k, v in gn.items()})
    except ValueError as e:
        raise ConfigError(str(e)) from e
    tilt_limit = math.radians(_positive(ctl.get("tilt_limit_deg", math.degrees(TILT_LIMIT)), "controller.tilt_limit_deg"))
    diverge_tilt = _positive(ctl.get("diverge_tilt_rad", DIVERGE_TILT), "controller.diverge_tilt_rad")

    noise = None
    if nz:
        sigma_deg = _num(nz.get("sigma_deg", 0.0), "noise.sigma_deg")
        seed = _int(nz.get("seed", 0), "noise.seed")
        try:
            noise = NoiseConfig.from_degrees(sigma_deg, seed)
        except ValueError as e:
            raise ConfigError(f"[noise]: {e}") from e

    box_default = StartBox()
    try:
        box = StartBox(*(_vec(mc.get(k, list(getattr(box_default, k))), f"montecarlo.{k}", 2) for k in "xyz"))
        sig = mc.get("sigma_deg", [1, 2, 3, 4, 5, 6, 7])
        if not isinstance(sig, list):
            raise ConfigError("montecarlo.sigma_deg: expected a list of numbers")
        spec = MonteCarloSpec(
            n_runs=_int(mc.get("n_runs", 100), "montecarlo.n_runs"),
            sigma_list=sigma_list_from_degrees([_num(s, "montecarlo.sigma_deg") for s in sig]),
            master_seed=_int(mc.get("master_seed", 0), "montecarlo.master_seed"),
            start_box=box, window=window, guidance=guidance, gains=gains, params=params,
            dt=dt if fidelity == "sixdof" else SIXDOF_DT, t_max=t_max,
            min_standoff=_num(mc.get("min_standoff", 0.5), "montecarlo.min_standoff"),
        )
    except InvalidScenarioError as e:
        raise ConfigError(f"[montecarlo]: {e}") from e
    workers = _int(mc.get("workers", 1), "montecarlo.workers")
    if workers < 0:
        raise ConfigError("montecarlo.workers must be >= 0 (0 = all cores)")

    planes = pp.get("planes", list(PLANES))
    if not isinstance(planes, list) or any(p not in PLANES for p in planes) or not planes:
        raise ConfigError(f"phase_portrait.planes: expected a non-empty subset of {list(PLANES)}")
    ics = None
    if "initial_conditions_deg" in pp:
        raw = pp["initial_conditions_deg"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("phase_portrait.initial_conditions_deg: expected a non-empty list")
        ics = tuple(tuple(math.radians(v) for v in _vec(ic, f"phase_portrait.initial_conditions_deg[{i}]", 4))
                    for i, ic in enumerate(raw))

    plots = out.get("plots", False)
    if not isinstance(plots, bool):
        raise ConfigError("output.plots: expected true or false")
    out_dir = out.get("dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir: expected a non-empty string")

    return ScenarioConfig(window=window, start=start, fidelity=fidelity, guidance=guidance, dt=dt,
                          t_max=t_max, gains=gains, params=params, tilt_limit=tilt_limit,
                          diverge_tilt=diverge_tilt, noise=noise, montecarlo=spec, mc_workers=workers,
                          planes=tuple(planes), initial_conditions=ics, out_dir=Path(out_dir), plots=plots)


def load_config(path: str | Path | None) -> ScenarioConfig:
    if path is None:
        return parse_config("")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ConfigError(f"config {path} is not valid UTF-8") from e
    return parse_config(text)


CASE1_TOML = """\
# Reference scenario: noise-free 6-DOF approach from the origin.
[scenario]
fidelity = "sixdof"
start = [0.0, 0.0, 0.0]
V = 1.0
dt = 0.002
t_max = 120.0
traversal_tol_deg = 0.5

[window]
e1 = [12.0, 15.0, 13.0]
e2 = [16.0, 15.0, 13.0]
e3 = [16.0, 15.0, 10.0]
e4 = [12.0, 15.0, 10.0]

[vehicle]
m = 0.47
J_xx = 0.0086
J_yy = 0.0086
J_zz = 0.0176
g = 9.81

[gains]
K_pz = 3.8
K_dz = 3.5
K_px = 6.0
K_dx = 3.5
K_py = 12.7
K_dy = 4.2
K_pjx = 6.0
K_djx = 3.5
K_pjy = 12.7
K_djy = 4.2
K_pphi = 12.8
K_dphi = 0.5
K_ptheta = 1.8
K_dtheta = 0.2
K_ppsi = 2.0
K_dpsi = 0.5

[controller]
tilt_limit_deg = 20.0
diverge_tilt_rad = 1.2

[montecarlo]
n_runs = 100
sigma_deg = [1, 2, 3, 4, 5, 6, 7]
master_seed = 0
workers = 1
x = [0.0, 30.0]
y = [0.0, 14.0]
z = [0.0, 20.0]

[output]
dir = "out"
plots = false
"""
