"""Window model, vertex bearings, relative-motion kinematics and displacement diagnostics.

World frame: x_w and z_w span a plane parallel to the window, z_w points up
and the vehicle approaches from y < y_window.  Vertices are ordered
top-left, top-right, bottom-right, bottom-left as seen from the approach
side, so e1 -> e2 runs along +x_w and e1 -> e4 along -z_w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as K
from .errors import (
    DegenerateGeometryError,
    GeometryError,
    InvalidScenarioError,
    RangeViolationError,
    SingularGeometryError,
)

# vertex edge lengths must agree to this relative tolerance
_EDGE_RTOL = 1e-9


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"Vec3.{name} must be finite, got {v}")
            object.__setattr__(self, name, v)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y
        yield self.z

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(k * self.x, k * self.y, k * self.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def of(cls, v: Sequence[float] | "Vec3") -> "Vec3":
        if isinstance(v, Vec3):
            return v
        if len(v) != 3:
            raise ValueError(f"expected 3 components, got {len(v)}")
        return cls(*v)


@dataclass(frozen=True)
class WindowSpec:
    """Rectangular window with vertices ordered e1 (top-left) .. e4 (bottom-left).

    Derived quantities (width, height, centroid, normal) are computed and the
    layout is validated on construction.
    """

    e1: Vec3
    e2: Vec3
    e3: Vec3
    e4: Vec3

    def __post_init__(self):
        verts = [Vec3.of(v) for v in (self.e1, self.e2, self.e3, self.e4)]
        for name, v in zip(("e1", "e2", "e3", "e4"), verts):
            object.__setattr__(self, name, v)
        e1, e2, e3, e4 = verts
        y0 = e1.y
        if any(abs(v.y - y0) > _EDGE_RTOL * max(1.0, abs(y0)) for v in verts):
            raise GeometryError("vertices not coplanar: all four must share the same y coordinate")
        top, bottom = e2 - e1, e3 - e4
        left, right = e1 - e4, e2 - e3
        a = top.norm()
        b = left.norm()
        if a <= 0.0 or b <= 0.0:
            raise GeometryError("window width and height must be positive")
        if abs(bottom.norm() - a) > _EDGE_RTOL * a or abs(right.norm() - b) > _EDGE_RTOL * b:
            raise GeometryError("opposite window edges differ in length")
        if abs(top.z) > _EDGE_RTOL * a or top.x <= 0.0:
            raise GeometryError("e1 -> e2 must run along +x (top edge, left to right)")
        if abs(left.x) > _EDGE_RTOL * b or left.z <= 0.0:
            raise GeometryError("e4 -> e1 must run along +z (e1 above e4)")
        if abs(bottom.z) > _EDGE_RTOL * a or abs(right.x) > _EDGE_RTOL * b:
            raise GeometryError("window is not an axis-aligned rectangle")

    @classmethod
    def from_vertices(cls, vertices: Sequence[Sequence[float]]) -> "WindowSpec":
        if len(vertices) != 4:
            raise GeometryError(f"need 4 vertices, got {len(vertices)}")
        return cls(*(Vec3.of(v) for v in vertices))

    @classmethod
    def from_centroid(cls, centroid: Sequence[float], width: float, height: float) -> "WindowSpec":
        cx, cy, cz = centroid
        a, b = 0.5 * width, 0.5 * height
        return cls(Vec3(cx - a, cy, cz + b), Vec3(cx + a, cy, cz + b),
                   Vec3(cx + a, cy, cz - b), Vec3(cx - a, cy, cz - b))

    @property
    def vertices(self) -> tuple[Vec3, Vec3, Vec3, Vec3]:
        return (self.e1, self.e2, self.e3, self.e4)

    @property
    def width_a(self) -> float:
        return (self.e2 - self.e1).norm()

    @property
    def height_b(self) -> float:
        return (self.e1 - self.e4).norm()

    @property
    def centroid(self) -> Vec3:
        return Vec3(sum(v.x for v in self.vertices) / 4.0,
                    sum(v.y for v in self.vertices) / 4.0,
                    sum(v.z for v in self.vertices) / 4.0)

    @property
    def normal(self) -> Vec3:
        return Vec3(0.0, 1.0, 0.0)

    @property
    def plane_y(self) -> float:
        return self.e1.y

    def as_array(self) -> np.ndarray:
        return np.array([list(v) for v in self.vertices], dtype=float)

    def contains(self, point: Sequence[float]) -> bool:
        """True if the in-plane projection of ``point`` lies strictly inside the rectangle."""
        c = self.centroid
        return abs(point[0] - c.x) < 0.5 * self.width_a and abs(point[2] - c.z) < 0.5 * self.height_b

    def terminal_bearings(self) -> tuple[float, float]:
        """Elevation magnitude and azimuth pair seen from the centroid: (asin(b/sqrt(a^2+b^2)), pi)."""
        a, b = self.width_a, self.height_b
        return math.asin(b / math.hypot(a, b)), math.pi


# Default window of the reference scenario (a = 4 m, b = 3 m)
REFERENCE_WINDOW = WindowSpec(Vec3(12, 15, 13), Vec3(16, 15, 13), Vec3(16, 15, 10), Vec3(12, 15, 10))


@dataclass(frozen=True)
class BearingSet:
    """Elevation ``alpha`` and azimuth ``beta`` of the four vertices, radians."""

    alpha: tuple[float, float, float, float]
    beta: tuple[float, float, float, float]

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        beta = tuple(float(b) for b in self.beta)
        if len(alpha) != 4 or len(beta) != 4:
            raise ValueError("BearingSet needs four elevations and four azimuths")
        if not all(math.isfinite(v) for v in alpha + beta):
            raise ValueError("bearings must be finite")
        if any(abs(a) > K.HALF_PI for a in alpha):
            raise RangeViolationError(f"elevation outside [-pi/2, pi/2]: {alpha}")
        if any(b < 0.0 or b > math.pi for b in beta):
            raise RangeViolationError(f"azimuth outside [0, pi]: {beta}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.alpha), np.array(self.beta)


@dataclass(frozen=True)
class RelativeState:
    """Line-of-sight geometry and relative velocity for one vertex."""

    R: float
    R_xy: float
    R_z: float
    V_R: float
    V_alpha: float
    V_beta: float


@dataclass(frozen=True)
class RelativeVelocity:
    V_R: float
    V_alpha: float
    V_beta: float
    alpha_dot: float
    beta_dot: float


@dataclass(frozen=True)
class DisplacementState:
    D_x: float
    D_z: float

    @property
    def D(self) -> float:
        return math.hypot(self.D_x, self.D_z)


@dataclass(frozen=True)
class LyapunovSample:
    W: float
    W_dot: float
    t: float = 0.0


def _bearing_arrays(quad_pos, window: WindowSpec):
    p = Vec3.of(quad_pos)
    alpha = np.empty(4)
    beta = np.empty(4)
    rng = np.empty(4)
    st = K.bearings_into(p.x, p.y, p.z, window.as_array(), alpha, beta, rng)
    if st == K.ST_DEGENERATE:
        raise DegenerateGeometryError(f"vehicle at {tuple(p)} coincides with a window vertex")
    if st == K.ST_RANGE:
        raise RangeViolationError(f"vehicle at {tuple(p)} is past the window plane y={window.plane_y}")
    return alpha, beta, rng


def bearing_angles(quad_pos, window: WindowSpec) -> BearingSet:
    """Elevation and azimuth of every window vertex as seen from ``quad_pos``.

    Azimuth uses the two-argument arctangent so it lands in [0, pi] on the
    approach side; a vehicle past the window plane raises
    :class:`RangeViolationError`.
    """
    alpha, beta, _ = _bearing_arrays(quad_pos, window)
    return BearingSet(tuple(alpha), tuple(beta))


def line_of_sight_ranges(quad_pos, window: WindowSpec) -> tuple[float, float, float, float]:
    _, _, rng = _bearing_arrays(quad_pos, window)
    return tuple(float(r) for r in rng)


def relative_states(quad_pos, quad_vel_spherical: tuple[float, float, float],
                    window: WindowSpec) -> list[RelativeState]:
    """Per-vertex range components and relative velocity for a vehicle flying at (V, gamma, chi)."""
    alpha, beta, rng = _bearing_arrays(quad_pos, window)
    v, gamma, chi = quad_vel_spherical
    out = []
    for i in range(4):
        vr, va, vb = K.relative_velocity(v, gamma, chi, alpha[i], beta[i])
        out.append(RelativeState(float(rng[i]), float(rng[i] * math.cos(alpha[i])),
                                 float(rng[i] * math.sin(alpha[i])), vr, va, vb))
    return out


def relative_velocity(V: float, gamma: float, chi: float, alpha: float, beta: float,
                      R: float) -> RelativeVelocity:
    """Relative velocity of a fixed vertex seen from a vehicle moving at speed V along (gamma, chi)."""
    if V < 0.0:
        raise ValueError("speed must be non-negative")
    if abs(gamma) > K.HALF_PI:
        raise ValueError("flight-path angle outside [-pi/2, pi/2]")
    if R <= 0.0:
        raise ValueError("range must be positive")
    vr, va, vb = K.relative_velocity(V, gamma, chi, alpha, beta)
    ca = math.cos(alpha)
    if abs(ca) < 1e-12:
        if abs(vb) > 1e-12:
            raise SingularGeometryError("azimuth rate undefined with the vertex overhead")
        beta_dot = 0.0
    else:
        beta_dot = vb / (R * ca)
    return RelativeVelocity(vr, va, vb, va / R, beta_dot)


def displacements(quad_pos, window: WindowSpec) -> DisplacementState:
    """Horizontal and vertical offset of the vehicle from the centroid normal line.

    Evaluated from ranges and bearings of E1, E2 and E4; equals the
    world-frame difference to the centroid.
    """
    alpha, beta, rng = _bearing_arrays(quad_pos, window)
    dx, dz = K.displacement_bearing_form(alpha, beta, rng)
    return DisplacementState(dx, dz)


def displacements_world(quad_pos, window: WindowSpec) -> DisplacementState:
    p = Vec3.of(quad_pos)
    c = window.centroid
    return DisplacementState(p.x - c.x, p.z - c.z)


def displacements_many(points: np.ndarray, window: WindowSpec) -> np.ndarray:
    """Bearing-form (D_x, D_z) rows for an (n, 3) array of positions."""
    pts = np.ascontiguousarray(points, dtype=float)
    return K.displacements_many(pts, window.as_array())


def lyapunov(disp: DisplacementState, gamma_des: float, chi_des: float, V: float,
             t: float = 0.0) -> LyapunovSample:
    if V <= 0.0:
        raise ValueError("speed must be positive")
    W = 0.5 * (disp.D_x ** 2 + disp.D_z ** 2)
    W_dot = disp.D_x * V * math.cos(gamma_des) * math.cos(chi_des) + disp.D_z * V * math.sin(gamma_des)
    return LyapunovSample(W, W_dot, t)


def similar_triangle_ratios(quad_pos, window: WindowSpec) -> tuple[float, float, float, float]:
    """(cos a1/cos a4, R4/R1, R1 cos a1 / (R2 cos a2), sin b2/sin b1) for identity checks."""
    alpha, beta, rng = _bearing_arrays(quad_pos, window)
    return (math.cos(alpha[0]) / math.cos(alpha[3]), rng[3] / rng[0],
            rng[0] * math.cos(alpha[0]) / (rng[1] * math.cos(alpha[1])),
            math.sin(beta[1]) / math.sin(beta[0]))


def position_from_bearings(alpha1: float, alpha4: float, beta1: float, beta2: float,
                           window: WindowSpec, tol: float = math.radians(0.05)) -> Vec3:
    """Recover the vehicle position from (alpha1, alpha4, beta1, beta2).

    The horizontal position is triangulated from the two azimuths, the height
    from alpha1; alpha4 must then agree to ``tol``.  On the window plane
    (beta1 = pi, beta2 = 0) the elevations alone fix the position.  Raises
    :class:`~wintraverse.errors.InvalidScenarioError` if no consistent
    approach-side position exists.
    """
    e1, e2, e4 = window.e1, window.e2, window.e4
    u1 = (math.cos(beta1), math.sin(beta1))
    u2 = (math.cos(beta2), math.sin(beta2))
    det = u1[0] * u2[1] - u1[1] * u2[0]  # sin(beta2 - beta1)
    on_plane = abs(math.sin(beta1)) < 1e-12 and abs(math.sin(beta2)) < 1e-12
    if on_plane:
        if not (math.cos(beta1) < 0.0 < math.cos(beta2)):
            raise InvalidScenarioError("on-plane azimuths must straddle the window (beta1 = pi, beta2 = 0)")
        span = math.tan(alpha1) - math.tan(alpha4)
        if span <= 0.0:
            raise InvalidScenarioError("elevations inconsistent with a point between the window edges")
        r1 = window.height_b / span
        x = e1.x + r1
        z = e1.z - r1 * math.tan(alpha1)
        p = Vec3(x, e1.y, z)
        if not (e1.x < x < e2.x):
            raise InvalidScenarioError(f"recovered on-plane point {tuple(p)} is outside the window")
        return p
    if abs(det) < 1e-12:
        raise InvalidScenarioError("azimuths are parallel; horizontal position is undetermined")
    # E2 - E1 = r2*u2 - r1*u1 in the horizontal plane
    bx, by = e2.x - e1.x, e2.y - e1.y
    r1 = (-bx * u2[1] + by * u2[0]) / det
    r2 = (u1[0] * by - u1[1] * bx) / det
    if r1 <= 0.0 or r2 <= 0.0:
        raise InvalidScenarioError("azimuths do not intersect in front of the vehicle")
    x = e1.x - r1 * u1[0]
    y = e1.y - r1 * u1[1]
    z = e1.z - r1 * math.tan(alpha1)
    if y >= window.plane_y:
        raise InvalidScenarioError("recovered position is not on the approach side")
    a4_pred = math.atan2(e4.z - z, r1)
    if abs(a4_pred - alpha4) > tol:
        raise InvalidScenarioError(
            f"alpha4 = {math.degrees(alpha4):.3f} deg inconsistent with the position implied by the "
            f"other angles (expected {math.degrees(a4_pred):.3f} deg)")
    return Vec3(x, y, z)
