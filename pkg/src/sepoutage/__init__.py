"""Outage probability of a Rayleigh-faded link under independent interference.

For an exponentially distributed signal power, the outage caused by a sum of
independent interference powers factorises exactly into the outages each
source would cause alone: ``eps = 1 - prod(1 - eps_i)``.
"""

__version__ = "0.1.0"

from .dist import (
    Deterministic,
    Empirical,
    Exponential,
    LognormalDb,
    LognormalTimesExpFading,
    PowerDistribution,
    QuadratureSpec,
    cdf_closed_form,
    dbm_to_mw,
    laplace,
    mw_to_dbm,
    sample,
)
from .errors import (
    DegeneratePrimary,
    DomainError,
    InfeasibleBudget,
    MissingOracle,
    NonConvergence,
    OutageError,
)
from .mc import McConfig, McEstimate, estimate_group_partial, estimate_total_outage
from .model import InterferenceGroup, Scenario, SignalModel, Threshold
from .outage import (
    GroupPartial,
    OutageResult,
    compose,
    group_partial,
    partial_outage,
    partial_outage_suzuki,
    total_outage,
    total_outage_all_rayleigh,
)
from .scenario_file import ScenarioFileError, load_scenario, parse_scenario
from .sharing import SharingBudget, per_source_budget, secondary_budget, sharing_budget
