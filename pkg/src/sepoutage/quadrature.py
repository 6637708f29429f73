"""Gauss-Hermite machinery for expectations over a lognormal power.

Every lognormal expectation in the package has the form

    E[exp(k(t0 + b Z))],   Z ~ N(0, 1)

where ``t0 = ln(s * median)``, ``b = ln(10)/10 * sigma_db`` and ``k`` is a
log-kernel: ``k(t) = -exp(t)`` gives the Laplace transform of a lognormal
power, ``k(t) = -log(1 + exp(t))`` gives the Laplace transform of lognormal
times unit-mean exponential fading.

The rule is centred on the mode of the integrand and scaled by its
curvature, and the sum is carried out in the log domain, so the relative
accuracy holds even when the expectation is many decades below one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, log_expit, logsumexp, roots_hermite

from .errors import DomainError, NonConvergence

__all__ = [
    "QuadratureSpec",
    "MAX_NODES",
    "gauss_hermite",
    "log_lognormal_expectation",
    "lognormal_expectation",
]

#: Hard ceiling on the rule size; the scaled-weight recurrence underflows past ~700.
MAX_NODES = 512

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Hermite rule size and refinement policy.

    Parameters
    ----------
    nodes : int
        Starting number of nodes (>= 2).
    refinement_tol : float
        Relative change allowed between a rule and its doubled rule.
    max_nodes : int
        Largest rule tried before giving up with :class:`NonConvergence`.
    """

    nodes: int = 64
    refinement_tol: float = 1e-9
    max_nodes: int = MAX_NODES

    def __post_init__(self):
        if isinstance(self.nodes, bool) or int(self.nodes) != self.nodes or self.nodes < 2:
            raise DomainError(f"nodes must be an integer >= 2, got {self.nodes!r}")
        if not (self.refinement_tol > 0 and math.isfinite(self.refinement_tol)):
            raise DomainError(f"refinement_tol must be positive, got {self.refinement_tol!r}")
        if not (self.nodes <= self.max_nodes <= MAX_NODES):
            raise DomainError(
                f"max_nodes must lie in [nodes, {MAX_NODES}], got {self.max_nodes!r}"
            )


@lru_cache(maxsize=None)
def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and log scaled weights of the n-point physicists' Hermite rule.

    Returns ``x`` and ``log(w * exp(x**2))`` so that
    ``sum(w_i f(x_i)) = sum(exp(logw_i - x_i**2) f(x_i))``. Computing the
    scaled weights through the orthonormal Hermite functions avoids the
    underflow that plain weights hit beyond about 150 nodes.
    """
    if n < 1:
        raise DomainError("n must be positive")
    x = np.array(roots_hermite(n)[0], dtype=float)
    for _ in range(2):
        psi_n, psi_prev = _hermite_functions(n, x)
        x = x - psi_n / (math.sqrt(2.0 * n) * psi_prev - x * psi_n)
    _, psi_prev = _hermite_functions(n, x)
    log_w = -math.log(n) - 2.0 * np.log(np.abs(psi_prev))
    x.setflags(write=False)
    log_w.setflags(write=False)
    return x, log_w


def _hermite_functions(n, x):
    # orthonormal psi_k(x) = H_k(x) exp(-x^2/2) / sqrt(2^k k! sqrt(pi)); returns (psi_n, psi_{n-1})
    prev = np.zeros_like(x)
    cur = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    for k in range(n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    return cur, prev


# (k, k', k'') for each log-kernel
def _laplace_kernel(t):
    e = np.exp(t)
    return -e, -e, -e


def _fading_kernel(t):
    p = expit(t)
    return log_expit(-t), -p, -p * expit(-t)


_KERNELS = {"laplace": _laplace_kernel, "fading": _fading_kernel}


def _mode(kernel, t0, b):
    def slope(z):
        return b * kernel(t0 + b * z)[1] - z

    # slope(0) < 0 since the kernel is decreasing; walk left to bracket the root
    lo = -1.0
    while slope(lo) <= 0.0:
        lo *= 2.0
    return brentq(slope, lo, 0.0, xtol=1e-13, rtol=1e-15, maxiter=200)


def log_lognormal_expectation(kind: str, t0: float, b: float, nodes: int) -> float:
    """Log of ``E[exp(k(t0 + b Z))]`` with an adaptive n-point rule.

    ``kind`` is ``"laplace"`` or ``"fading"``. With ``b == 0`` the
    expectation is the kernel evaluated at ``t0``.
    """
    kernel = _KERNELS[kind]
    if b == 0.0:
        return float(kernel(np.float64(t0))[0])
    with np.errstate(over="ignore"):
        z_star = _mode(kernel, t0, b)
        curvature = 1.0 - b * b * float(kernel(np.float64(t0 + b * z_star))[2])
        tau = 1.0 / math.sqrt(curvature)
        x, log_w = gauss_hermite(nodes)
        z = z_star + math.sqrt(2.0) * tau * x
        terms = log_w + kernel(t0 + b * z)[0] - 0.5 * z * z
    return float(logsumexp(terms)) + math.log(math.sqrt(2.0) * tau) - _LOG_SQRT_2PI


def lognormal_expectation(kind: str, t0: float, b: float, q: QuadratureSpec) -> float:
    """Refined ``E[exp(k(t0 + b Z))]``, doubling the rule until it settles.

    The rule starts at ``q.nodes`` and doubles until two consecutive rules
    agree to ``q.refinement_tol`` relative; the finer of the two is returned.

    Raises
    ------
    NonConvergence
        If the tolerance is still violated when the doubled rule would exceed
        ``q.max_nodes``.
    """
    n = q.nodes
    if b == 0.0:
        return min(1.0, math.exp(log_lognormal_expectation(kind, t0, b, n)))
    if 2 * n > q.max_nodes:
        # no room to double: check the rule against its halved neighbour instead
        n //= 2
    prev = log_lognormal_expectation(kind, t0, b, n)
    change = math.inf
    while 2 * n <= q.max_nodes:
        n *= 2
        cur = log_lognormal_expectation(kind, t0, b, n)
        change = _rel_change(prev, cur)
        if change <= q.refinement_tol:
            return min(1.0, math.exp(cur))
        prev = cur
    raise NonConvergence(
        f"Gauss-Hermite refinement stalled at {n} nodes: relative change {change:.3g} "
        f"exceeds tolerance {q.refinement_tol:.3g}",
        nodes=n,
        rel_change=change,
    )


def _rel_change(log_a, log_b):
    if log_a == log_b:
        return 0.0
    return abs(math.expm1(log_a - log_b))
