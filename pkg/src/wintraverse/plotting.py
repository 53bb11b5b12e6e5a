"""Static figures for runs, Monte Carlo statistics and phase portraits.

Uses the Agg canvas directly so nothing touches a display or the pyplot
global state; every function writes one image file and returns its path.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from . import _kernels as K
from .experiments import MonteCarloStats, distance_history
from .kinematic import PhasePortrait
from .results import RunResult

DPI = 120


def _figure(nrows=1, ncols=1, size=(6.4, 4.8), **kw):
    fig = Figure(figsize=size, dpi=DPI)
    FigureCanvasAgg(fig)
    axes = fig.subplots(nrows, ncols, squeeze=False, **kw)
    return fig, axes


def _save(fig: Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    return path


def _window_outline(result: RunResult) -> np.ndarray:
    v = result.window.as_array()
    return np.vstack([v, v[:1]])


def plot_trajectory_3d(result: RunResult, path: str | Path) -> Path:
    fig = Figure(figsize=(6.4, 5.6), dpi=DPI)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(projection="3d")
    tr = result.trace
    ax.plot(tr[:, K.C_X], tr[:, K.C_Y], tr[:, K.C_Z], lw=1.5, label="vehicle")
    w = _window_outline(result)
    ax.plot(w[:, 0], w[:, 1], w[:, 2], "k-", lw=2, label="window")
    c = result.window.centroid
    ax.scatter([c.x], [c.y], [c.z], marker="x", color="r", label="centroid")
    if result.desired is not None:
        d = result.desired
        ax.plot(d[:, 0], d[:, 1], d[:, 2], "--", lw=0.8, color="0.4", label="desired")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_zlabel("z (m)")
    ax.legend(loc="upper left", fontsize=8)
    return _save(fig, Path(path))


def plot_guidance_angles(result: RunResult, path: str | Path) -> Path:
    """Bisector components and shaping angles against time."""
    tr = result.trace
    t = tr[:, K.C_T]
    fig, ax = _figure(2, 1, size=(6.4, 6.0), sharex=True)
    a = tr[:, K.C_ALPHA:K.C_ALPHA + 4]
    b = tr[:, K.C_BETA:K.C_BETA + 4]
    ax[0, 0].plot(t, np.degrees(0.5 * (a[:, 0] + a[:, 3])), label=r"$(\alpha_1+\alpha_4)/2$")
    ax[0, 0].plot(t, np.degrees(0.5 * (b[:, 0] + b[:, 1])), label=r"$(\beta_1+\beta_2)/2$")
    ax[0, 0].set_ylabel("bisector (deg)")
    ax[0, 0].legend(fontsize=8)
    ax[1, 0].plot(t, np.degrees(tr[:, K.C_SG]), label=r"$S_\gamma$")
    ax[1, 0].plot(t, np.degrees(tr[:, K.C_SC]), label=r"$S_\chi$")
    ax[1, 0].set_ylabel("shaping angle (deg)")
    ax[1, 0].set_xlabel("t (s)")
    ax[1, 0].legend(fontsize=8)
    return _save(fig, Path(path))


def plot_attitude(result: RunResult, path: str | Path) -> Path:
    tr = result.trace
    t = tr[:, K.C_T]
    fig, ax = _figure()
    for i, name in enumerate((r"$\phi$", r"$\theta$", r"$\psi$")):
        ax[0, 0].plot(t, np.degrees(tr[:, K.C_PHI + i]), label=name)
    ax[0, 0].set_xlabel("t (s)")
    ax[0, 0].set_ylabel("attitude (deg)")
    ax[0, 0].legend(fontsize=8)
    return _save(fig, Path(path))


def plot_lyapunov(result: RunResult, path: str | Path) -> Path:
    tr = result.trace
    t = tr[:, K.C_T]
    fig, ax = _figure(2, 1, size=(6.4, 6.0), sharex=True)
    ax[0, 0].semilogy(t, np.maximum(tr[:, K.C_W], 1e-16))
    ax[0, 0].set_ylabel("W (m$^2$)")
    ax[1, 0].plot(t, distance_history(result))
    ax[1, 0].set_ylabel("distance to centroid (m)")
    ax[1, 0].set_xlabel("t (s)")
    return _save(fig, Path(path))


def plot_monte_carlo(stats: MonteCarloStats, path: str | Path) -> Path:
    s = np.array([r.sigma_deg for r in stats.rows])
    m = np.array([r.mean_miss for r in stats.rows])
    e = np.array([r.std_miss for r in stats.rows])
    fig, ax = _figure()
    ax[0, 0].errorbar(s, m, yerr=e, fmt="o-", capsize=4)
    ax[0, 0].set_xlabel(r"noise $\sigma$ (deg)")
    ax[0, 0].set_ylabel("miss distance (m)")
    ax[0, 0].set_ylim(bottom=0.0)
    return _save(fig, Path(path))


def plot_phase_portrait(portrait: PhasePortrait, path: str | Path) -> Path:
    fig, ax = _figure(size=(5.6, 5.6))
    for tr in portrait.trajectories:
        ax[0, 0].plot(np.degrees(tr[:, 0]), np.degrees(tr[:, 1]), lw=1)
        ax[0, 0].plot(math.degrees(tr[0, 0]), math.degrees(tr[0, 1]), "o", ms=3, color="0.3")
    ea, eb = portrait.equilibrium
    ax[0, 0].plot(math.degrees(ea), math.degrees(eb), "r*", ms=12, label="equilibrium")
    if portrait.plane == "alpha1_alpha4":
        ax[0, 0].set_xlabel(r"$\alpha_1$ (deg)")
        ax[0, 0].set_ylabel(r"$\alpha_4$ (deg)")
    else:
        ax[0, 0].set_xlabel(r"$\beta_1$ (deg)")
        ax[0, 0].set_ylabel(r"$\beta_2$ (deg)")
    ax[0, 0].legend(fontsize=8)
    return _save(fig, Path(path))


def plot_run(result: RunResult, out_dir: str | Path, stem: str = "run") -> list[Path]:
    out_dir = Path(out_dir)
    paths = [
        plot_trajectory_3d(result, out_dir / f"{stem}_trajectory.png"),
        plot_guidance_angles(result, out_dir / f"{stem}_guidance.png"),
        plot_lyapunov(result, out_dir / f"{stem}_lyapunov.png"),
    ]
    if result.fidelity == "sixdof":
        paths.append(plot_attitude(result, out_dir / f"{stem}_attitude.png"))
    return paths
