"""Point-mass approach under ideal command following, and phase portraits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .errors import DegenerateGeometryError, InvalidScenarioError, RangeViolationError
from .geometry import REFERENCE_WINDOW, Vec3, WindowSpec, bearing_angles, position_from_bearings
from .guidance import GuidanceCommand, GuidanceConfig
from .results import RunResult, result_from_kernel

DEFAULT_DT = 0.005

PLANES = ("alpha1_alpha4", "beta1_beta2")


@dataclass(frozen=True)
class KinematicState:
    pos: Vec3
    t: float = 0.0


def _velocity(pos: Vec3, V: float, window: WindowSpec, cfg: GuidanceConfig, latched: bool):
    scratch = [np.empty(4) for _ in range(3)]
    vx, vy, vz, st = K._kin_velocity(pos.x, pos.y, pos.z, window.as_array(), V, latched,
                                     cfg.alternate, *scratch)
    if st == K.ST_DEGENERATE:
        raise DegenerateGeometryError(f"vehicle at {tuple(pos)} coincides with a window vertex")
    if st == K.ST_RANGE:
        raise RangeViolationError(f"vehicle at {tuple(pos)} is past the window plane")
    return Vec3(vx, vy, vz)


def kinematic_step(state: KinematicState, cmd: GuidanceCommand, dt: float,
                   window: WindowSpec | None = None, cfg: GuidanceConfig | None = None) -> KinematicState:
    """Advance the point mass by one RK4 step of length ``dt``.

    Without a window the command is held over the step.  With a window the
    command is re-derived from the vertex bearings at every RK4 stage (unless
    ``cmd`` is latched, in which case the terminal command is held).
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    p = state.pos
    if window is None:
        return KinematicState(p + cmd.v_des.scaled(dt), state.t + dt)
    cfg = cfg or GuidanceConfig()
    V = cfg.V
    latched = cmd.traversal_latched
    k1 = cmd.v_des
    k2 = _velocity(p + k1.scaled(0.5 * dt), V, window, cfg, latched)
    k3 = _velocity(p + k2.scaled(0.5 * dt), V, window, cfg, latched)
    k4 = _velocity(p + k3.scaled(dt), V, window, cfg, latched)
    inc = (k1 + k2.scaled(2.0) + k3.scaled(2.0) + k4).scaled(dt / 6.0)
    return KinematicState(p + inc, state.t + dt)


def run_kinematic(start, window: WindowSpec = REFERENCE_WINDOW, cfg: GuidanceConfig | None = None,
                  dt: float = DEFAULT_DT, t_max: float = 120.0, latch: bool = True) -> RunResult:
    """Fly the point mass from ``start`` until it crosses the window plane or ``t_max`` elapses.

    A timeout is reported through ``RunResult.status``, not raised.
    """
    cfg = cfg or GuidanceConfig()
    p = Vec3.of(start)
    if p.y >= window.plane_y:
        raise RangeViolationError("start must be on the approach side of the window plane")
    if not (dt > 0.0 and t_max > 0.0):
        raise ValueError("dt and t_max must be positive")
    n_max = int(math.ceil(t_max / dt)) + 1
    out = K.run_kinematic(p.as_array(), window.as_array(), cfg.V, cfg.traversal_tol_beta, dt, n_max,
                          cfg.alternate, latch)
    return result_from_kernel(*out, window=window, fidelity="kinematic", dt=dt)


@dataclass
class PhasePortrait:
    """Sampled bearing-angle paths in one angle plane.

    Each trajectory is an (n, 3) array of (angle_a, angle_b, t), radians and
    seconds.
    """

    plane: str
    trajectories: list[np.ndarray]
    equilibrium: tuple[float, float]
    initial_conditions: list[tuple[float, float, float, float]]
    runs: list[RunResult]

    def final_errors(self) -> np.ndarray:
        """Distance of each path's last sample from the equilibrium, radians (max over the two axes)."""
        eq = np.array(self.equilibrium)
        return np.array([np.max(np.abs(tr[-1, :2] - eq)) for tr in self.trajectories])


# Start positions behind the default initial conditions (the published
# worked example is prepended separately).  All keep at least 7 m of standoff from the window plane: closer, strongly
# off-axis starts run out of room before reaching the centroid line.
_DEFAULT_STARTS = (
    (0.0, 0.0, 0.0),
    (28.0, 2.0, 0.0),
    (2.0, 6.0, 20.0),
    (26.0, 5.0, 19.0),
    (14.0, 1.0, 25.0),
    (14.0, 6.0, 1.0),
    (0.0, 7.0, 11.5),
    (30.0, 6.0, 5.0),
    (8.0, 8.0, 2.0),
    (20.0, 5.0, 16.0),
)
REFERENCE_IC_DEG = (36.82, 21.96, 54.77, 38.21)


def default_initial_conditions(window: WindowSpec = REFERENCE_WINDOW) -> list[tuple[float, float, float, float]]:
    """Eleven (alpha1, alpha4, beta1, beta2) initial conditions in radians.

    The published worked example followed by ten starts spread over the
    approach region; starts are shifted with the window centroid so the spread
    is preserved for other windows.
    """
    ref_ic = tuple(math.radians(v) for v in REFERENCE_IC_DEG)
    shift = window.centroid - REFERENCE_WINDOW.centroid
    starts = list(_DEFAULT_STARTS)
    if window == REFERENCE_WINDOW:
        ics = [ref_ic]
    else:
        ics = []
        starts.insert(0, tuple(position_from_bearings(*ref_ic, REFERENCE_WINDOW)))
    for s in starts:
        b = bearing_angles(Vec3.of(s) + shift, window)
        ics.append((b.alpha[0], b.alpha[3], b.beta[0], b.beta[1]))
    return ics


def equilibrium(plane: str, window: WindowSpec) -> tuple[float, float]:
    a_t, b_t = window.terminal_bearings()
    if plane == "alpha1_alpha4":
        return (a_t, -a_t)
    if plane == "beta1_beta2":
        return (b_t, 0.0)
    raise ValueError(f"unknown plane {plane!r}; expected one of {PLANES}")


def phase_portrait(plane: str, initial_conditions: Sequence[Sequence[float]] | None = None,
                   window: WindowSpec = REFERENCE_WINDOW, cfg: GuidanceConfig | None = None,
                   dt: float = DEFAULT_DT, t_max: float = 120.0) -> PhasePortrait:
    """Bearing-angle paths from each (alpha1, alpha4, beta1, beta2) initial condition (radians).

    An initial condition already at the traversal geometry yields a
    single-sample path.  Raises :class:`InvalidScenarioError` when an initial
    condition has no consistent approach-side position.
    """
    cfg = cfg or GuidanceConfig()
    eq = equilibrium(plane, window)
    ics = list(initial_conditions) if initial_conditions is not None else default_initial_conditions(window)
    if not ics:
        raise InvalidScenarioError("at least one initial condition is required")
    if plane == "alpha1_alpha4":
        cols = (K.C_ALPHA, K.C_ALPHA + 3)
    else:
        cols = (K.C_BETA, K.C_BETA + 1)
    trajectories, runs = [], []
    for ic in ics:
        a1, a4, b1, b2 = (float(v) for v in ic)
        start = position_from_bearings(a1, a4, b1, b2, window)
        if start.y >= window.plane_y:
            # already at the traversal geometry
            trajectories.append(np.array([[eq[0], eq[1], 0.0]]))
            runs.append(None)
            continue
        run = run_kinematic(start, window, cfg, dt=dt, t_max=t_max)
        tr = run.trace
        trajectories.append(np.column_stack([tr[:, cols[0]], tr[:, cols[1]], tr[:, K.C_T]]))
        runs.append(run)
    return PhasePortrait(plane, trajectories, eq, [tuple(map(float, ic)) for ic in ics], runs)
