from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .geometry import LyapunovSample, Vec3, WindowSpec

TRAJECTORY_COLUMNS = (
    "t", "x", "y", "z", "vx", "vy", "vz", "phi", "theta", "psi",
    "gamma_des", "chi_des",
    "alpha1", "alpha2", "alpha3", "alpha4",
    "beta1", "beta2", "beta3", "beta4",
    "S_gamma", "S_chi", "D_x", "D_z", "W", "W_dot",
)
assert len(TRAJECTORY_COLUMNS) == K.N_COLS


class RunStatus(enum.Enum):
    CONVERGED = "converged"
    TIMEOUT = "timeout"
    DIVERGED = "diverged"
    DEGENERATE = "degenerate"

    @classmethod
    def from_code(cls, code: int) -> "RunStatus":
        return {K.RUN_CONVERGED: cls.CONVERGED, K.RUN_TIMEOUT: cls.TIMEOUT,
                K.RUN_DIVERGED: cls.DIVERGED, K.RUN_DEGENERATE: cls.DEGENERATE}[int(code)]


@dataclass
class RunResult:
    """Outcome of one simulated approach.

    ``trace`` has one row per sample with columns :data:`TRAJECTORY_COLUMNS`;
    when the window plane is crossed its last row is the interpolated
    crossing point.
    """

    trace: np.ndarray
    status: RunStatus
    window: WindowSpec
    fidelity: str
    dt: float
    crossing: Vec3 | None = None
    t_T: float = math.nan
    latch_index: int = -1
    max_tilt_cmd: float = 0.0
    diagnostic: str = ""
    extras: dict = field(default_factory=dict)
    desired: np.ndarray | None = None  # (n, 3) desired positions, 6-DOF runs only

    @property
    def converged(self) -> bool:
        return self.status is RunStatus.CONVERGED

    @property
    def latched(self) -> bool:
        return self.latch_index >= 0

    @property
    def miss_distance(self) -> float:
        if self.crossing is None:
            return math.nan
        return (self.crossing - self.window.centroid).norm()

    @property
    def safe(self) -> bool:
        """Crossed the window plane strictly inside the rectangle."""
        return self.crossing is not None and self.window.contains(tuple(self.crossing))

    @property
    def success(self) -> bool:
        return self.converged and self.safe

    def tracking_error(self) -> np.ndarray:
        """Distance between vehicle and desired position per sample (6-DOF runs)."""
        if self.desired is None:
            return np.zeros(len(self.trace))
        return np.linalg.norm(self.trace[:, K.C_X:K.C_Z + 1] - self.desired, axis=1)

    def column(self, name: str) -> np.ndarray:
        return self.trace[:, TRAJECTORY_COLUMNS.index(name)]

    def lyapunov_samples(self) -> list[LyapunovSample]:
        return [LyapunovSample(float(w), float(wd), float(t))
                for t, w, wd in zip(self.column("t"), self.column("W"), self.column("W_dot"))]

    def pre_latch(self) -> np.ndarray:
        """Trace rows computed from live guidance (before the latch and the crossing row)."""
        end = self.latch_index if self.latched else len(self.trace)
        if self.crossing is not None:
            end = min(end, len(self.trace) - 1)
        return self.trace[:end]

    def w_monotone(self, d_min: float = 1e-6) -> bool:
        """W strictly decreases between consecutive pre-latch samples wherever D > d_min."""
        rows = self.pre_latch()
        if len(rows) < 2:
            return True
        w = rows[:, K.C_W]
        d = np.hypot(rows[:, K.C_DX], rows[:, K.C_DZ])
        check = d[:-1] > d_min
        return bool(np.all(np.diff(w)[check] < 0.0))

    def summary(self) -> dict:
        att = self.trace[:, K.C_PHI:K.C_PSI + 1] if len(self.trace) else np.zeros((0, 3))
        out = {
            "fidelity": self.fidelity,
            "status": self.status.value,
            "converged": self.converged,
            "safe": self.safe,
            "latched": self.latched,
            "traversal_point": list(self.crossing) if self.crossing is not None else None,
            "t_T": None if math.isnan(self.t_T) else self.t_T,
            "miss_distance": None if math.isnan(self.miss_distance) else self.miss_distance,
            "centroid": list(self.window.centroid),
            "n_samples": int(len(self.trace)),
            "dt": self.dt,
            "W_monotone": self.w_monotone(),
            "max_tilt_cmd_deg": math.degrees(self.max_tilt_cmd),
            "diagnostic": self.diagnostic,
        }
        if self.desired is not None and len(self.trace):
            out["max_tracking_error"] = float(self.tracking_error().max())
        for i, name in enumerate(("phi", "theta", "psi")):
            col = att[:, i] if len(att) else np.zeros(1)
            out[f"min_{name}_deg"] = float(np.degrees(col.min()))
            out[f"max_{name}_deg"] = float(np.degrees(col.max()))
        out.update(self.extras)
        return out


def result_from_kernel(trace, n, code, latch_row, crossing, t_cross, *, window, fidelity, dt,
                       max_tilt_cmd=0.0) -> RunResult:
    status = RunStatus.from_code(code)
    cross = Vec3.of(crossing) if status is RunStatus.CONVERGED else None
    diag = {
        RunStatus.CONVERGED: "",
        RunStatus.TIMEOUT: "window plane not reached before t_max",
        RunStatus.DIVERGED: "state became non-finite or tilt exceeded the divergence limit",
        RunStatus.DEGENERATE: "vehicle came within 1e-6 m of a window vertex",
    }[status]
    return RunResult(trace=trace[:n].copy(), status=status, window=window, fidelity=fidelity, dt=dt,
                     crossing=cross, t_T=float(t_cross) if cross is not None else math.nan,
                     latch_index=int(latch_row), max_tilt_cmd=float(max_tilt_cmd), diagnostic=diag)
