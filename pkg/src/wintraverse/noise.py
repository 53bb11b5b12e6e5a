"""Bearing measurement noise and deterministic random streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BearingSet


@dataclass(frozen=True)
class NoiseConfig:
    """Zero-mean Gaussian bearing noise; ``sigma`` in radians."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"noise sigma must be finite and non-negative, got {self.sigma}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    @classmethod
    def from_degrees(cls, sigma_deg: float, seed: int = 0) -> "NoiseConfig":
        return cls(math.radians(sigma_deg), seed)

    @property
    def sigma_deg(self) -> float:
        return math.degrees(self.sigma)


def make_generator(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the substream identified by ``(seed, *key)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def standard_draws(gen: np.random.Generator, n_steps: int) -> np.ndarray:
    """(n_steps, 8) standard normals; row k perturbs alpha1..4, beta1..4 at step k."""
    return gen.standard_normal((n_steps, 8))


def corrupt_bearings(true: BearingSet, noise: NoiseConfig, gen: np.random.Generator) -> BearingSet:
    """Add an independent N(0, sigma^2) draw to each of the eight angles.

    Results are clamped back into [-pi/2, pi/2] (elevation) and [0, pi]
    (azimuth).  A zero sigma returns the input unchanged.
    """
    if noise.sigma == 0.0:
        return true
    z = gen.standard_normal(8)
    alpha = np.clip(np.array(true.alpha) + noise.sigma * z[:4], -math.pi / 2, math.pi / 2)
    beta = np.clip(np.array(true.beta) + noise.sigma * z[4:], 0.0, math.pi)
    return BearingSet(tuple(alpha), tuple(beta))
