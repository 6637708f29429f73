"""Exception types raised by the outage calculus."""


class OutageError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OutageError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonConvergence(OutageError, ArithmeticError):
    """Quadrature refinement failed to reach the requested tolerance."""

    def __init__(self, message, nodes=None, rel_change=None):
        super().__init__(message)
        self.nodes = nodes
        self.rel_change = rel_change


class MissingOracle(OutageError):
    """A group has no admissible evaluation path (e.g. dependent, no Monte Carlo)."""


class InfeasibleBudget(OutageError):
    """Target outage is below the outage already caused by the primary network."""


class DegeneratePrimary(DomainError):
    """Primary outage equals one, so no secondary budget is defined."""
