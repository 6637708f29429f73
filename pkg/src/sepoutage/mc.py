"""Monte Carlo oracle: direct simulation of ``P(S < beta * sum(I))``.

Samples are split over ``streams`` substreams. Substream ``i`` draws from a
PCG64 generator seeded with ``SeedSequence(seed, spawn_key=(i,))``, so a
given ``(seed, samples, streams)`` triple always yields the same estimate no
matter how the substreams are scheduled across worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, MissingOracle
from .model import InterferenceGroup, Scenario, SignalModel, Threshold

__all__ = [
    "DEFAULT_SEED",
    "McConfig",
    "McEstimate",
    "estimate_total_outage",
    "estimate_group_partial",
]

DEFAULT_SEED = 0xC0FFEE
DEFAULT_SAMPLES = 1_000_000

# draws per vectorised batch; fixed so results never depend on memory limits
_CHUNK = 1 << 16


@dataclass(frozen=True)
class McConfig:
    """Simulation size and seeding.

    ``workers`` only controls how many threads run the substreams and never
    changes the estimate.
    """

    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    streams: int = 1
    workers: Optional[int] = None

    def __post_init__(self):
        for name in ("samples", "streams"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.workers is not None and self.workers < 1:
            raise DomainError(f"workers must be positive, got {self.workers!r}")

    def derive(self, *key: int) -> "McConfig":
        """Config with an independent seed derived from ``(seed, *key)``."""
        state = np.random.SeedSequence(self.seed, spawn_key=tuple(key)).generate_state(2, np.uint64)
        return McConfig(self.samples, int(state[0]), self.streams, self.workers)


@dataclass(frozen=True)
class McEstimate:
    """Indicator-mean estimate with its binomial standard error."""

    p_hat: float
    stderr: float
    samples: int

    @classmethod
    def from_count(cls, hits: int, samples: int) -> "McEstimate":
        p = hits / samples
        return cls(p, math.sqrt(p * (1.0 - p) / samples), samples)


def _stream_sizes(samples, streams):
    base, extra = divmod(samples, streams)
    return [base + (1 if i < extra else 0) for i in range(streams)]


def _count_stream(signal_mean, beta, groups, seed, index, n):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    hits = 0
    remaining = n
    while remaining:
        m = min(_CHUNK, remaining)
        s = rng.exponential(signal_mean, m)
        total = np.zeros(m)
        for g in groups:
            total += g.sample_sum(rng, m)
        # strict S/I < beta; I == 0 is never an outage
        hits += int(np.count_nonzero(s < beta * total))
        remaining -= m
    return hits


def _simulate(signal: SignalModel, th: Threshold, groups: Sequence[InterferenceGroup], cfg: McConfig) -> McEstimate:
    for g in groups:
        if not g.simulable:
            raise MissingOracle(f"group {g.name!r} has no sources or joint sampler to simulate")
    if not groups:
        return McEstimate(0.0, 0.0, cfg.samples)
    sizes = _stream_sizes(cfg.samples, cfg.streams)
    args = [(signal.mean_power_mw, th.beta_linear, groups, cfg.seed, i, n) for i, n in enumerate(sizes)]
    workers = cfg.workers or min(cfg.streams, os.cpu_count() or 1)
    if workers > 1 and cfg.streams > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda a: _count_stream(*a), args))
    else:
        counts = [_count_stream(*a) for a in args]
    return McEstimate.from_count(sum(counts), cfg.samples)


def estimate_total_outage(sc: Scenario, cfg: McConfig = McConfig()) -> McEstimate:
    """Simulate the outage of the whole scenario.

    Draws the exponential signal power and every source of every group, sums
    the interference and counts ``S < beta * I``. A scenario without groups
    has outage 0.

    Raises
    ------
    MissingOracle
        If a group only carries a measured partial and cannot be simulated.
    """
    return _simulate(sc.signal, sc.threshold, sc.groups, cfg)


def estimate_group_partial(
    signal: SignalModel, th: Threshold, g: InterferenceGroup, cfg: McConfig = McConfig()
) -> McEstimate:
    """Simulate the partial outage caused by one group on its own."""
    return _simulate(signal, th, (g,), cfg)
