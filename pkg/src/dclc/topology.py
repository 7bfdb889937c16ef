"""Waxman random topologies with distance-derived delays.

Randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence``, so a seed reproduces the same network on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import EdgeAttr, Network


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class WaxmanConfig:
    n: int
    alpha: float = 0.3
    beta: float = 0.3
    area_width_km: float = 2400.0
    area_height_km: float = 3000.0
    cost_min: int = 1
    cost_max: int = 5
    propagation_speed_m_per_s: float = 2e8
    seed: int = 0
    max_attempts: int = 1000

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need at least 2 nodes, got {self.n}")
        if not (0 < self.alpha <= 1 and 0 < self.beta <= 1):
            raise ValueError("alpha and beta must lie in (0, 1]")
        if self.area_width_km <= 0 or self.area_height_km <= 0:
            raise ValueError("area dimensions must be positive")
        if not (0 < self.cost_min <= self.cost_max):
            raise ValueError("need 0 < cost_min <= cost_max")
        if self.propagation_speed_m_per_s <= 0:
            raise ValueError("propagation speed must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def diagonal_km(self) -> float:
        return math.hypot(self.area_width_km, self.area_height_km)


def edge_probability(cfg: WaxmanConfig, dist_km: float, L_km: float) -> float:
    """``beta * exp(-dist / (L * alpha))``; ``L`` is the largest possible distance."""
    if dist_km < 0:
        raise ValueError(f"distance must be >= 0, got {dist_km}")
    if L_km <= 0:
        raise ValueError(f"L must be positive, got {L_km}")
    return cfg.beta * math.exp(-dist_km / (L_km * cfg.alpha))


def link_delay(dist_km: float, speed_m_per_s: float) -> float:
    return dist_km * 1000.0 / speed_m_per_s


def attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    # attempt 0 uses the bare seed so single-shot sampling matches generate()
    key = () if attempt == 0 else (attempt,)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def sample_waxman(
    cfg: WaxmanConfig,
    rng: np.random.Generator,
    coords: np.ndarray | None = None,
) -> Network:
    """One Waxman draw, connected or not.

    Draw order is fixed: coordinates (unless given), one uniform per node
    pair in ``(u, v)`` lexicographic order, then one cost per pair.
    """
    n = cfg.n
    if coords is None:
        xs = rng.uniform(0.0, cfg.area_width_km, n)
        ys = rng.uniform(0.0, cfg.area_height_km, n)
        coords = np.column_stack([xs, ys])
    else:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (n, 2):
            raise ValueError(f"coords must have shape ({n}, 2)")

    iu, iv = np.triu_indices(n, k=1)
    dist = np.hypot(coords[iu, 0] - coords[iv, 0], coords[iu, 1] - coords[iv, 1])
    L = cfg.diagonal_km
    prob = cfg.beta * np.exp(-dist / (L * cfg.alpha))
    draws = rng.random(len(iu))
    costs = rng.integers(cfg.cost_min, cfg.cost_max + 1, size=len(iu))

    edges = [
        (int(u), int(v), EdgeAttr(float(c), link_delay(float(d), cfg.propagation_speed_m_per_s)))
        for u, v, d, c, keep in zip(iu, iv, dist, costs, draws < prob)
        if keep
    ]
    return Network([(float(x), float(y)) for x, y in coords], edges)


def generate(cfg: WaxmanConfig) -> Network:
    """Connected Waxman network; disconnected draws are discarded whole."""
    for attempt in range(cfg.max_attempts):
        net = sample_waxman(cfg, attempt_rng(cfg.seed, attempt))
        if net.is_connected():
            return net
    raise GenerationError(
        f"no connected Waxman draw for n={cfg.n}, alpha={cfg.alpha}, beta={cfg.beta} "
        f"after {cfg.max_attempts} attempts (seed {cfg.seed})"
    )
