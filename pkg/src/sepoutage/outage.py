"""Partial outages and their exact composition.

With an exponentially distributed signal power ``S`` of mean ``Omega`` and
independent interference powers ``I_1..I_N``,

    P(S < beta * sum(I_i)) = 1 - prod(1 - eps_i),   eps_i = P(S < beta * I_i),

and each partial outage is one minus the Laplace transform of ``I_i`` at
``s = beta / Omega``. Groups declared dependent are simulated jointly and
then composed with the others the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import mc
from .dist import LognormalDb, PowerDistribution, QuadratureSpec
from .errors import DomainError, MissingOracle
from .model import InterferenceGroup, Scenario, SignalModel, Threshold

__all__ = [
    "METHODS",
    "GroupPartial",
    "OutageResult",
    "partial_outage",
    "partial_outage_suzuki",
    "compose",
    "group_partial",
    "total_outage",
    "total_outage_all_rayleigh",
]

#: Method tags, in increasing order of precedence when sources are mixed in a group.
METHODS = ("closed_form", "quadrature", "empirical", "monte_carlo", "supplied")

_DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class GroupPartial:
    name: str
    probability: float
    method: str
    stderr: Optional[float] = None


@dataclass(frozen=True)
class OutageResult:
    """Total outage with the per-group partials it was composed from.

    ``stderr_total`` is set only when some partial came from simulation; it
    propagates the group standard errors through the composition to first
    order.
    """

    total: float
    partials: tuple
    stderr_total: Optional[float] = None

    def partial(self, name: str) -> GroupPartial:
        for p in self.partials:
            if p.name == name:
                return p
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "stderr_total": self.stderr_total,
            "partials": [
                {"name": p.name, "probability": p.probability, "method": p.method, "stderr": p.stderr}
                for p in self.partials
            ],
        }


def partial_outage(
    signal: SignalModel, th: Threshold, d: PowerDistribution, q: QuadratureSpec = _DEFAULT_QUADRATURE
) -> float:
    """Outage ``P(S < beta * I)`` caused by a single source ``I ~ d``.

    Raises
    ------
    NonConvergence
        Propagated from the Laplace transform of a lognormal variant.
    """
    value = 1.0 - d.laplace(th.beta_linear / signal.mean_power_mw, q)
    return min(1.0, max(0.0, value))


def partial_outage_suzuki(
    signal: SignalModel,
    th: Threshold,
    mu_dbm: float,
    sigma_db: float,
    q: QuadratureSpec = _DEFAULT_QUADRATURE,
) -> float:
    """Partial outage from one lognormally shadowed interferer.

    ``P(S / I < beta)`` equals ``P(sqrt(S) * I**-0.5 < sqrt(beta))``, a Suzuki
    CDF, since ``sqrt(S)`` is Rayleigh and ``I**-0.5`` is lognormal. It is
    computed through the same Laplace path as :func:`partial_outage`.
    """
    return partial_outage(signal, th, LognormalDb(mu_dbm, sigma_db), q)


def compose(partials: Iterable[float]) -> float:
    """Total outage ``1 - prod(1 - eps_i)`` of independent partial outages.

    Summed as ``log1p(-eps_i)`` with an exactly rounded sum, so the result
    does not depend on the order of the inputs and stays accurate when many
    tiny partials are combined.

    Raises
    ------
    DomainError
        If a partial lies outside ``[0, 1]``.
    """
    logs = []
    saturated = False
    for p in partials:
        if isinstance(p, bool) or not (0.0 <= p <= 1.0):
            raise DomainError(f"partial outage must lie in [0, 1], got {p!r}")
        if p == 1.0:
            saturated = True
        else:
            logs.append(math.log1p(-p))
    if saturated:
        return 1.0
    return -math.expm1(math.fsum(logs)) + 0.0


def _group_method(sources: Sequence[PowerDistribution]) -> str:
    return max((s.method for s in sources), key=METHODS.index, default="closed_form")


def group_partial(
    signal: SignalModel,
    th: Threshold,
    g: InterferenceGroup,
    q: QuadratureSpec = _DEFAULT_QUADRATURE,
    joint_oracle: Optional[mc.McConfig] = None,
) -> GroupPartial:
    """Partial outage of one group, with the method that produced it.

    A measured partial is used as is. A dependent group is simulated as a
    whole with ``joint_oracle``. Otherwise the sources are independent and
    their own partials are composed.

    Raises
    ------
    MissingOracle
        If ``g`` is dependent and neither measured nor given an oracle.
    """
    if g.measured_partial is not None:
        return GroupPartial(g.name, g.measured_partial, "supplied")
    if g.dependent:
        if joint_oracle is None:
            raise MissingOracle(
                f"group {g.name!r} is dependent and needs a Monte Carlo configuration or a measured partial"
            )
        est = mc.estimate_group_partial(signal, th, g, joint_oracle)
        return GroupPartial(g.name, est.p_hat, "monte_carlo", est.stderr)
    probability = compose(partial_outage(signal, th, d, q) for d in g.sources)
    return GroupPartial(g.name, probability, _group_method(g.sources))


def total_outage(
    sc: Scenario,
    q: QuadratureSpec = _DEFAULT_QUADRATURE,
    joint_oracle: Optional[mc.McConfig] = None,
) -> OutageResult:
    """Outage of the full scenario from per-group partial outages.

    Dependent groups are simulated with ``joint_oracle``; group ``i`` uses
    the seed derived by ``joint_oracle.derive(i)`` so the groups' simulations
    are independent and the result is fixed for a given scenario and seed.

    Raises
    ------
    MissingOracle
        If a dependent group has no evaluation path.
    NonConvergence
        Propagated from lognormal quadrature.
    """
    partials = []
    for i, g in enumerate(sc.groups):
        oracle = joint_oracle.derive(i) if joint_oracle is not None else None
        partials.append(group_partial(sc.signal, sc.threshold, g, q, oracle))
    total = compose(p.probability for p in partials)
    return OutageResult(total, tuple(partials), _composed_stderr(partials))


def _composed_stderr(partials):
    if all(p.stderr is None for p in partials):
        return None
    survivors = [1.0 - p.probability for p in partials]
    var = 0.0
    for i, p in enumerate(partials):
        if p.stderr:
            others = math.prod(survivors[:i] + survivors[i + 1 :])
            var += (others * p.stderr) ** 2
    return math.sqrt(var)


def total_outage_all_rayleigh(signal: SignalModel, th: Threshold, interferer_means_mw: Sequence[float]) -> float:
    """Closed-form outage when every interferer is Rayleigh faded.

    ``1 - prod(1 / (1 + beta * Omega_i / Omega_S))``.

    Raises
    ------
    DomainError
        On a nonpositive interferer mean.
    """
    product = 1.0
    for omega in interferer_means_mw:
        if not (omega > 0 and math.isfinite(omega)):
            raise DomainError(f"interferer means must be positive and finite, got {omega!r}")
        product /= 1.0 + th.beta_linear * omega / signal.mean_power_mw
    return 1.0 - product
