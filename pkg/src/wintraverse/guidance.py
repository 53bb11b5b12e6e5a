"""Bearings-only window traversal guidance.

The commanded flight-path angle is the bisector of the E1/E4 elevations plus
an elliptic shaping angle; the commanded heading is the bisector of the
E1/E2 azimuths plus its own shaping angle.  Once the vehicle sees the
traversal geometry (beta1 = pi, beta2 = 0) the commands latch to level
flight along the window normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DomainError
from .geometry import BearingSet, Vec3

_EPS = 1e-12


@dataclass(frozen=True)
class ShapingAngles:
    s_gamma: float
    s_chi: float


@dataclass(frozen=True)
class GuidanceConfig:
    """Guidance parameters.

    ``vertex_pair="alternate"`` builds the commands from the E2/E3 elevations
    and the E4/E3 azimuths instead of E1/E4 and E1/E2.
    """

    V: float = 1.0
    traversal_tol_beta: float = math.radians(0.5)
    terminal_gamma: float = 0.0
    terminal_chi: float = math.pi / 2
    vertex_pair: str = "primary"

    def __post_init__(self):
        if not self.V > 0.0:
            raise ValueError(f"commanded speed must be positive, got {self.V}")
        if not self.traversal_tol_beta > 0.0:
            raise ValueError("traversal tolerance must be positive")
        if self.vertex_pair not in ("primary", "alternate"):
            raise ValueError(f"vertex_pair must be 'primary' or 'alternate', got {self.vertex_pair!r}")

    @property
    def alternate(self) -> bool:
        return self.vertex_pair == "alternate"


@dataclass(frozen=True)
class GuidanceCommand:
    gamma_des: float
    chi_des: float
    v_des: Vec3
    traversal_latched: bool = False
    shaping: ShapingAngles | None = None


def _check_elevation(a: float, name: str) -> None:
    if not -K.HALF_PI - _EPS <= a <= K.HALF_PI + _EPS:
        raise DomainError(f"{name} = {a} outside [-pi/2, pi/2]")


def _check_azimuth(b: float, name: str) -> None:
    if not -_EPS <= b <= math.pi + _EPS:
        raise DomainError(f"{name} = {b} outside [0, pi]")


def shaping_gamma(bisector_alpha: float) -> float:
    """Elliptic shaping angle added to the elevation bisector.

    Quarter ellipses centred at -pi/2 and +pi/2 with semi-axes pi/2 (bisector)
    and pi/4 (shaping angle), joined continuously at the origin.
    """
    _check_elevation(bisector_alpha, "elevation bisector")
    return K.shaping_gamma(bisector_alpha)


def shaping_chi(beta1: float, beta2: float) -> float:
    _check_azimuth(beta1, "beta1")
    _check_azimuth(beta2, "beta2")
    return K.shaping_chi(beta1, beta2)


def gamma_des(alpha1: float, alpha4: float) -> float:
    """Desired flight-path angle, folded back into [-pi/2, pi/2] when the
    bisector plus shaping angle overshoots."""
    _check_elevation(alpha1, "alpha1")
    _check_elevation(alpha4, "alpha4")
    return K.gamma_from_elevations(alpha1, alpha4)[0]


def chi_des(beta1: float, beta2: float, alpha1: float, alpha4: float) -> float:
    _check_azimuth(beta1, "beta1")
    _check_azimuth(beta2, "beta2")
    _check_elevation(alpha1, "alpha1")
    _check_elevation(alpha4, "alpha4")
    _, u, _ = K.gamma_from_elevations(alpha1, alpha4)
    return K.chi_from_azimuths(beta1, beta2, u)[0]


def traversal_condition(bearings: BearingSet, tol: float = math.radians(0.5),
                        vertex_pair: str = "primary") -> bool:
    _, beta = bearings.arrays()
    return bool(K.traversal_met(beta, tol, vertex_pair == "alternate"))


def velocity_from_angles(V: float, gamma: float, chi: float) -> Vec3:
    cg = math.cos(gamma)
    return Vec3(V * cg * math.cos(chi), V * cg * math.sin(chi), V * math.sin(gamma))


def guidance_step(bearings: BearingSet, cfg: GuidanceConfig, latched: bool = False) -> GuidanceCommand:
    """One guidance evaluation.

    The latch is owned by the caller: pass the previous command's
    ``traversal_latched``.  The returned command is latched if it was
    already, or if these bearings meet the traversal condition.
    """
    alpha, beta = bearings.arrays()
    if not latched and K.traversal_met(beta, cfg.traversal_tol_beta, cfg.alternate):
        latched = True
    g, c, sg, sc = K.guidance_eval(alpha, beta, cfg.alternate)
    if latched:
        g, c = cfg.terminal_gamma, cfg.terminal_chi
    return GuidanceCommand(g, c, velocity_from_angles(cfg.V, g, c), latched, ShapingAngles(sg, sc))


def desired_position(prev: Vec3, v_des: Vec3, dt: float) -> Vec3:
    """Advance the desired position by one rectangle-rule step."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    return Vec3.of(prev) + Vec3.of(v_des).scaled(dt)


def guidance_field(points: np.ndarray, window, cfg: GuidanceConfig | None = None) -> np.ndarray:
    """Columns (gamma_des, chi_des, D_x, D_z) for an (n, 3) array of positions.

    Rows at degenerate or past-plane positions are NaN.
    """
    cfg = cfg or GuidanceConfig()
    pts = np.ascontiguousarray(points, dtype=float)
    return K.guidance_many(pts, window.as_array(), cfg.alternate)
