"""Six-degree-of-freedom quadrotor with a cascaded PD autopilot closing the loop
around the traversal guidance.

Translational dynamics are driven by the total thrust u1 tilted through the
roll/pitch/yaw attitude; Euler-angle accelerations are the body moments
u2..u4 over the principal inertias.  The outer loop converts position and
velocity errors into total thrust and roll/pitch commands, the inner loop
tracks those with PD moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import _kernels as K
from .errors import GimbalSingularityError, RangeViolationError
from .geometry import REFERENCE_WINDOW, Vec3, WindowSpec
from .guidance import GuidanceConfig
from .noise import NoiseConfig, make_generator, standard_draws
from .results import RunResult, result_from_kernel

DEFAULT_DT = 0.002
TILT_LIMIT = math.radians(20.0)
DIVERGE_TILT = 1.2


@dataclass(frozen=True)
class QuadParams:
    m: float = 0.47
    J_xx: float = 0.0086
    J_yy: float = 0.0086
    J_zz: float = 0.0176
    g: float = 9.81

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"QuadParams.{f.name} must be positive, got {v}")

    def as_array(self) -> np.ndarray:
        return np.array([self.m, self.J_xx, self.J_yy, self.J_zz, self.g])


@dataclass(frozen=True)
class ControllerGains:
    """PD gains of the cascaded controller.

    The x/y outer loop uses the ``K_pj*``/``K_dj*`` pairs.  ``K_px, K_dx,
    K_py, K_dy`` are carried for configuration compatibility and are not used
    by the control law.  Gains must be non-negative; zero disables a term.
    """

    K_pz: float = 3.8
    K_dz: float = 3.5
    K_px: float = 6.0
    K_dx: float = 3.5
    K_py: float = 12.7
    K_dy: float = 4.2
    K_pjx: float = 6.0
    K_djx: float = 3.5
    K_pjy: float = 12.7
    K_djy: float = 4.2
    K_pphi: float = 12.8
    K_dphi: float = 0.5
    K_ptheta: float = 1.8
    K_dtheta: float = 0.2
    K_ppsi: float = 2.0
    K_dpsi: float = 0.5

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"gain {f.name} must be finite and non-negative, got {v}")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    @classmethod
    def zero(cls) -> "ControllerGains":
        return cls(**{f.name: 0.0 for f in fields(cls)})


@dataclass(frozen=True)
class RigidBodyState:
    pos: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))
    vel: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))
    att: tuple[float, float, float] = (0.0, 0.0, 0.0)
    body_rates: tuple[float, float, float] = (0.0, 0.0, 0.0)
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "pos", Vec3.of(self.pos))
        object.__setattr__(self, "vel", Vec3.of(self.vel))
        object.__setattr__(self, "att", tuple(float(a) for a in self.att))
        object.__setattr__(self, "body_rates", tuple(float(w) for w in self.body_rates))
        if not all(math.isfinite(v) for v in self.att + self.body_rates):
            raise ValueError("attitude and body rates must be finite")

    def to_array(self) -> np.ndarray:
        """Kernel layout: position, velocity, Euler angles, Euler angle rates."""
        phi, theta, _ = self.att
        rates = body_rates_to_euler_rates(phi, theta, *self.body_rates)
        return np.array([*self.pos, *self.vel, *self.att, *rates])

    @classmethod
    def from_array(cls, s: np.ndarray, t: float = 0.0) -> "RigidBodyState":
        p, q, r = K.euler_rates_to_body(s[6], s[7], s[9], s[10], s[11])
        return cls(Vec3(*s[0:3]), Vec3(*s[3:6]), tuple(s[6:9]), (p, q, r), t)


@dataclass(frozen=True)
class ControlInputs:
    u1: float
    u2: float
    u3: float
    u4: float


@dataclass(frozen=True)
class AttitudeCommand:
    phi_c: float
    theta_c: float
    psi_c: float
    p_c: float = 0.0
    q_c: float = 0.0
    r_c: float = 0.0


@dataclass(frozen=True)
class StateDerivative:
    pos_dot: Vec3
    vel_dot: Vec3
    euler_rates: tuple[float, float, float]
    euler_acc: tuple[float, float, float]


def euler_rates_to_body_rates(phi, theta, dphi, dtheta, dpsi) -> tuple[float, float, float]:
    return K.euler_rates_to_body(phi, theta, dphi, dtheta, dpsi)


def body_rates_to_euler_rates(phi, theta, p, q, r) -> tuple[float, float, float]:
    if abs(math.cos(theta)) < 1e-12:
        raise GimbalSingularityError("Euler-rate map is singular at pitch = +-pi/2")
    return K.body_to_euler_rates(phi, theta, p, q, r)


def dynamics_deriv(state: RigidBodyState, u: ControlInputs, params: QuadParams = QuadParams()) -> StateDerivative:
    if u.u1 < 0.0:
        raise ValueError("total thrust must be non-negative")
    s = state.to_array()
    out = np.empty(12)
    K.rigid_body_deriv(s, u.u1, u.u2, u.u3, u.u4, params.as_array(), out)
    return StateDerivative(Vec3(*out[0:3]), Vec3(*out[3:6]), tuple(out[6:9]), tuple(out[9:12]))


def position_controller(desired_pos, desired_vel, state: RigidBodyState,
                        gains: ControllerGains = ControllerGains(), params: QuadParams = QuadParams(),
                        tilt_limit: float = TILT_LIMIT, prev_cmd: AttitudeCommand | None = None,
                        dt: float | None = None, psi_des: float = 0.0) -> tuple[float, AttitudeCommand]:
    """Total thrust and attitude command from position/velocity errors.

    Horizontal PD accelerations are inverted through the small-angle map at
    the current yaw and saturated to ``tilt_limit``.  Commanded body rates
    come from a backward difference against ``prev_cmd`` over ``dt``; without
    a previous command they are zero.
    """
    s = state.to_array()
    u1, phi_c, theta_c, psi_c = K.position_control(s, Vec3.of(desired_pos).as_array(),
                                                   Vec3.of(desired_vel).as_array(), gains.as_array(),
                                                   params.as_array(), tilt_limit, psi_des)
    if prev_cmd is None:
        rates = (0.0, 0.0, 0.0)
    else:
        if not (dt and dt > 0.0):
            raise ValueError("dt must be positive when a previous command is given")
        d = ((phi_c - prev_cmd.phi_c) / dt, (theta_c - prev_cmd.theta_c) / dt, (psi_c - prev_cmd.psi_c) / dt)
        rates = K.euler_rates_to_body(phi_c, theta_c, *d)
    return u1, AttitudeCommand(phi_c, theta_c, psi_c, *rates)


def attitude_controller(cmd: AttitudeCommand, state: RigidBodyState,
                        gains: ControllerGains = ControllerGains()) -> tuple[float, float, float]:
    s = state.to_array()
    return K.attitude_control(s, cmd.phi_c, cmd.theta_c, cmd.psi_c, cmd.p_c, cmd.q_c, cmd.r_c,
                              gains.as_array())


def rk4_step(state: RigidBodyState, u: ControlInputs, params: QuadParams, dt: float) -> RigidBodyState:
    s = state.to_array()
    scratch = [np.empty(12) for _ in range(5)]
    K.rk4_rigid_body(s, u.u1, u.u2, u.u3, u.u4, params.as_array(), dt, *scratch)
    return RigidBodyState.from_array(s, state.t + dt)


def run_sixdof(start: RigidBodyState | Vec3 | tuple = (0.0, 0.0, 0.0), window: WindowSpec = REFERENCE_WINDOW,
               cfg: GuidanceConfig | None = None, gains: ControllerGains = ControllerGains(),
               params: QuadParams = QuadParams(), dt: float = DEFAULT_DT, t_max: float = 120.0,
               noise: NoiseConfig | None = None, noise_draws: np.ndarray | None = None,
               tilt_limit: float = TILT_LIMIT, diverge_tilt: float = DIVERGE_TILT) -> RunResult:
    """Closed-loop approach with the rigid-body model.

    Each step measures the bearings (optionally noisy), updates the guidance
    latch and command, integrates the desired position, runs the position and
    attitude loops and advances the dynamics by one RK4 step with inputs held.
    ``noise_draws`` overrides the standard normals drawn from ``noise.seed``.
    Timeouts and divergence are reported through the result status.
    """
    cfg = cfg or GuidanceConfig()
    if not isinstance(start, RigidBodyState):
        start = RigidBodyState(pos=Vec3.of(start))
    if start.pos.y >= window.plane_y:
        raise RangeViolationError("start must be on the approach side of the window plane")
    if not (dt > 0.0 and t_max > 0.0):
        raise ValueError("dt and t_max must be positive")
    n_max = int(math.ceil(t_max / dt)) + 1
    sigma = noise.sigma if noise is not None else 0.0
    if sigma > 0.0:
        if noise_draws is None:
            noise_draws = standard_draws(make_generator(noise.seed), n_max)
        if noise_draws.shape[0] < n_max or noise_draws.shape[1] != 8:
            raise ValueError(f"noise draws must have shape (>= {n_max}, 8)")
        draws = np.ascontiguousarray(noise_draws, dtype=float)
    else:
        draws = np.zeros((0, 8))
    out = K.run_sixdof(start.to_array(), window.as_array(), cfg.V, cfg.traversal_tol_beta, dt, n_max,
                       cfg.alternate, gains.as_array(), params.as_array(), tilt_limit, diverge_tilt,
                       sigma, draws)
    trace, n, code, latch_row, crossing, t_cross, max_tilt, desired = out
    res = result_from_kernel(trace, n, code, latch_row, crossing, t_cross, window=window, fidelity="sixdof",
                             dt=dt, max_tilt_cmd=max_tilt)
    res.desired = desired[:n].copy()
    res.extras["sigma_deg"] = math.degrees(sigma)
    return res
