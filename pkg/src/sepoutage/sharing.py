"""Outage budgets for a secondary network sharing a primary network's band."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegeneratePrimary, DomainError, InfeasibleBudget

__all__ = ["SharingBudget", "secondary_budget", "sharing_budget", "per_source_budget"]


@dataclass(frozen=True)
class SharingBudget:
    eps_primary: float
    eps_target: float
    eps_secondary_max: float


def _probability(name, p):
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not (0.0 <= p <= 1.0):
        raise DomainError(f"{name} must be a probability in [0, 1], got {p!r}")
    return float(p)


def secondary_budget(eps_primary: float, eps_target: float) -> float:
    """Largest outage the secondary network may cause on its own.

    A primary receiver already at ``eps_primary`` stays within
    ``eps_target`` iff the secondary partial outage is at most
    ``(eps_target - eps_primary) / (1 - eps_primary)``.

    Raises
    ------
    DomainError
        If either argument is not a probability.
    DegeneratePrimary
        If ``eps_primary == 1``.
    InfeasibleBudget
        If ``eps_target < eps_primary``: no secondary deployment is admissible.
    """
    e1 = _probability("eps_primary", eps_primary)
    et = _probability("eps_target", eps_target)
    if e1 == 1.0:
        raise DegeneratePrimary("eps_primary is 1: the primary link is always in outage")
    if et < e1:
        raise InfeasibleBudget(
            f"infeasible: target outage {et:g} is below the primary-only outage {e1:g}"
        )
    return (et - e1) / (1.0 - e1)


def sharing_budget(eps_primary: float, eps_target: float) -> SharingBudget:
    return SharingBudget(eps_primary, eps_target, secondary_budget(eps_primary, eps_target))


def per_source_budget(eps_target_group: float, n: int) -> float:
    """Partial outage each of ``n`` identical independent sources may cause.

    Raises
    ------
    DomainError
        If the target is not a probability or ``n < 1``.
    """
    et = _probability("eps_target_group", eps_target_group)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if et == 1.0:
        return 1.0
    return -math.expm1(math.log1p(-et) / n)
