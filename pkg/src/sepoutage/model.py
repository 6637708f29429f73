"""Scenario description: signal, threshold and interference groups."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .dist import PowerDistribution, dbm_to_mw
from .errors import DomainError

__all__ = ["SignalModel", "Threshold", "InterferenceGroup", "Scenario", "GroupSampler"]

#: ``sampler(rng, n)`` returns ``n`` draws of a group's summed power in mW.
GroupSampler = Callable[[np.random.Generator, int], np.ndarray]


def _positive_finite(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class SignalModel:
    """Rayleigh-faded useful signal; its power is exponential with this mean."""

    mean_power_mw: float

    def __post_init__(self):
        object.__setattr__(self, "mean_power_mw", _positive_finite("mean_power_mw", self.mean_power_mw))

    @classmethod
    def from_dbm(cls, mean_dbm: float) -> "SignalModel":
        return cls(dbm_to_mw(mean_dbm))


@dataclass(frozen=True)
class Threshold:
    """Outage threshold on the linear signal-to-interference power ratio."""

    beta_linear: float

    def __post_init__(self):
        object.__setattr__(self, "beta_linear", _positive_finite("beta_linear", self.beta_linear))

    @classmethod
    def from_db(cls, beta_db: float) -> "Threshold":
        return cls(dbm_to_mw(beta_db))


@dataclass(frozen=True)
class InterferenceGroup:
    """Interference sources that are independent of every other group.

    Sources inside a group with ``dependent=False`` are also taken to be
    mutually independent and are evaluated analytically. With
    ``dependent=True`` the group is only ever simulated jointly, using
    ``joint_sampler`` when given and otherwise the sources' marginals.

    ``measured_partial`` supplies the group's partial outage directly (field
    measurements, an external simulator); it takes precedence over every
    other evaluation path and lets ``sources`` be empty.
    """

    name: str
    sources: Sequence[PowerDistribution] = ()
    dependent: bool = False
    measured_partial: Optional[float] = None
    joint_sampler: Optional[GroupSampler] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise DomainError(f"group name must be a nonempty string, got {self.name!r}")
        sources = tuple(self.sources)
        for src in sources:
            if not isinstance(src, PowerDistribution):
                raise DomainError(f"group {self.name!r}: {src!r} is not a PowerDistribution")
        object.__setattr__(self, "sources", sources)
        if self.measured_partial is not None:
            p = self.measured_partial
            if isinstance(p, bool) or not (0.0 <= p <= 1.0):
                raise DomainError(f"group {self.name!r}: measured_partial must lie in [0, 1], got {p!r}")
            object.__setattr__(self, "measured_partial", float(p))
        elif not sources and self.joint_sampler is None:
            raise DomainError(f"group {self.name!r} has no sources")

    @property
    def simulable(self) -> bool:
        return bool(self.sources) or self.joint_sampler is not None

    def sample_sum(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` realisations of the group's total power."""
        if self.joint_sampler is not None:
            out = np.asarray(self.joint_sampler(rng, n), dtype=float)
            if out.shape != (n,):
                raise DomainError(f"group {self.name!r}: joint_sampler returned shape {out.shape}, expected ({n},)")
            return out
        total = np.zeros(n)
        for src in self.sources:
            total += src.sample(rng, n)
        return total

    def scaled(self, k: float) -> "InterferenceGroup":
        if self.joint_sampler is not None:
            sampler = self.joint_sampler
            scaled_sampler = lambda rng, n: k * np.asarray(sampler(rng, n))  # noqa: E731
        else:
            scaled_sampler = None
        return InterferenceGroup(
            self.name,
            tuple(src.scaled(k) for src in self.sources),
            self.dependent,
            self.measured_partial,
            scaled_sampler,
        )


@dataclass(frozen=True)
class Scenario:
    """A signal link, an outage threshold and the interference it suffers."""

    signal: SignalModel
    threshold: Threshold
    groups: Sequence[InterferenceGroup] = ()

    def __post_init__(self):
        groups = tuple(self.groups)
        seen = set()
        for g in groups:
            if not isinstance(g, InterferenceGroup):
                raise DomainError(f"{g!r} is not an InterferenceGroup")
            if g.name in seen:
                raise DomainError(f"duplicate group name {g.name!r}")
            seen.add(g.name)
        object.__setattr__(self, "groups", groups)

    @property
    def s(self) -> float:
        """Laplace argument ``beta / mean signal power`` (1/mW)."""
        return self.threshold.beta_linear / self.signal.mean_power_mw

    def with_beta(self, beta_linear: float) -> "Scenario":
        return Scenario(self.signal, Threshold(beta_linear), self.groups)

    def scaled(self, k: float) -> "Scenario":
        """Every power, signal included, multiplied by ``k``."""
        return Scenario(
            SignalModel(self.signal.mean_power_mw * k),
            self.threshold,
            tuple(g.scaled(k) for g in self.groups),
        )
