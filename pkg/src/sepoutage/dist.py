"""Interference power distributions.

Each distribution models the received power of one interference source in
linear milliwatts and supports three things: drawing samples, evaluating the
Laplace transform ``E[exp(-s I)]`` and, for some variants, an exact CDF.
dB quantities only appear in the constructors of the lognormal variants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr

from .errors import DomainError
from .quadrature import QuadratureSpec, lognormal_expectation

__all__ = [
    "DB_TO_NEPER",
    "PowerDistribution",
    "Exponential",
    "LognormalDb",
    "Deterministic",
    "LognormalTimesExpFading",
    "Empirical",
    "QuadratureSpec",
    "dbm_to_mw",
    "mw_to_dbm",
    "db_to_linear",
    "linear_to_db",
    "sample",
    "laplace",
    "cdf_closed_form",
]

#: ln(10)/10, the factor taking a dB quantity to a natural-log quantity.
DB_TO_NEPER = math.log(10.0) / 10.0

_DEFAULT_QUADRATURE = QuadratureSpec()


def dbm_to_mw(x_dbm):
    """Convert dBm (or dB) to linear milliwatts (or ratio), ``10 ** (x / 10)``."""
    with np.errstate(over="ignore"):
        out = np.power(10.0, np.asarray(x_dbm, dtype=float) / 10.0)
    return out if out.ndim else float(out)


def mw_to_dbm(x_mw):
    """Convert milliwatts to dBm; zero maps to ``-inf``."""
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(np.asarray(x_mw, dtype=float))
    return out if out.ndim else float(out)


db_to_linear = dbm_to_mw
linear_to_db = mw_to_dbm


def _check_real(name, value, *, lower=None, strict=False):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if lower is not None and (value <= lower if strict else value < lower):
        op = ">" if strict else ">="
        raise DomainError(f"{name} must be {op} {lower}, got {value!r}")
    return float(value)


def _check_s(s):
    if not (s >= 0.0) or math.isnan(s):
        raise DomainError(f"Laplace argument must be >= 0, got {s!r}")


class PowerDistribution:
    """Base class for a received interference power in mW.

    Subclasses are frozen dataclasses, so instances can be shared freely.
    """

    #: Method tag reported when this distribution feeds a partial outage.
    method = "closed_form"

    def sample(self, rng: np.random.Generator, size=None):
        """Draw ``size`` powers (a float when ``size`` is None)."""
        raise NotImplementedError

    def laplace(self, s: float, q: QuadratureSpec = _DEFAULT_QUADRATURE) -> float:
        """Return ``E[exp(-s I)]`` for ``s >= 0`` (in 1/mW)."""
        raise NotImplementedError

    def cdf(self, x: float) -> Optional[float]:
        """Exact ``P(I <= x)`` or None when no closed form is provided."""
        return None

    def scaled(self, k: float) -> "PowerDistribution":
        """Distribution of ``k * I`` for ``k > 0``."""
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(PowerDistribution):
    """Rayleigh-faded power: exponential with mean ``mean_mw``."""

    mean_mw: float

    def __post_init__(self):
        object.__setattr__(self, "mean_mw", _check_real("mean_mw", self.mean_mw, lower=0.0, strict=True))

    def sample(self, rng, size=None):
        return rng.exponential(self.mean_mw, size)

    def laplace(self, s, q=_DEFAULT_QUADRATURE):
        _check_s(s)
        return 1.0 / (1.0 + s * self.mean_mw)

    def cdf(self, x):
        return -math.expm1(-x / self.mean_mw) if x > 0 else 0.0

    def scaled(self, k):
        return Exponential(self.mean_mw * k)

    def mean(self):
        return self.mean_mw


@dataclass(frozen=True)
class Deterministic(PowerDistribution):
    """Constant power, e.g. thermal noise."""

    power_mw: float

    def __post_init__(self):
        object.__setattr__(self, "power_mw", _check_real("power_mw", self.power_mw, lower=0.0))

    def sample(self, rng, size=None):
        if size is None:
            return self.power_mw
        return np.full(size, self.power_mw)

    def laplace(self, s, q=_DEFAULT_QUADRATURE):
        _check_s(s)
        if s == 0.0:
            return 1.0
        return math.exp(-s * self.power_mw)

    def cdf(self, x):
        return 1.0 if x >= self.power_mw else 0.0

    def scaled(self, k):
        return Deterministic(self.power_mw * k)

    def mean(self):
        return self.power_mw


@dataclass(frozen=True)
class _Lognormal(PowerDistribution):
    mu_dbm: float
    sigma_db: float

    def __post_init__(self):
        object.__setattr__(self, "mu_dbm", _check_real("mu_dbm", self.mu_dbm))
        object.__setattr__(self, "sigma_db", _check_real("sigma_db", self.sigma_db, lower=0.0))

    @property
    def method(self):
        return "closed_form" if self.sigma_db == 0.0 else "quadrature"

    @property
    def median_mw(self) -> float:
        return 10.0 ** (self.mu_dbm / 10.0)

    def _local_mean(self, rng, size):
        return self.median_mw * np.exp(DB_TO_NEPER * self.sigma_db * rng.standard_normal(size))

    def _expectation(self, kind, s, q):
        _check_s(s)
        if s == 0.0:
            return 1.0
        t0 = math.log(s) + DB_TO_NEPER * self.mu_dbm
        return lognormal_expectation(kind, t0, DB_TO_NEPER * self.sigma_db, q)

    def scaled(self, k):
        return type(self)(self.mu_dbm + 10.0 * math.log10(k), self.sigma_db)

    def mean(self):
        # the exponential fading factor has unit mean, so both variants share it
        b = DB_TO_NEPER * self.sigma_db
        return self.median_mw * math.exp(0.5 * b * b)


class LognormalDb(_Lognormal):
    """Lognormal power whose dB value is Gaussian, N(mu_dbm, sigma_db^2)."""

    def sample(self, rng, size=None):
        out = self._local_mean(rng, size)
        return float(out) if size is None else out

    def laplace(self, s, q=_DEFAULT_QUADRATURE):
        return self._expectation("laplace", s, q)

    def cdf(self, x):
        if x <= 0.0:
            return 0.0
        x_db = 10.0 * math.log10(x)
        if self.sigma_db == 0.0:
            return 1.0 if x_db >= self.mu_dbm else 0.0
        return float(ndtr((x_db - self.mu_dbm) / self.sigma_db))


class LognormalTimesExpFading(_Lognormal):
    """Lognormal local mean multiplied by independent unit-mean exponential fading."""

    def sample(self, rng, size=None):
        local = self._local_mean(rng, size)
        out = local * rng.exponential(1.0, size)
        return float(out) if size is None else out

    def laplace(self, s, q=_DEFAULT_QUADRATURE):
        # E_L[1 / (1 + s L)]
        return self._expectation("fading", s, q)


@dataclass(frozen=True)
class Empirical(PowerDistribution):
    """Plug-in distribution of measured powers (mW), sampled uniformly."""

    samples_mw: tuple
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    method = "empirical"

    def __post_init__(self):
        arr = np.array(self.samples_mw, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("samples_mw must be nonempty")
        if not np.all(np.isfinite(arr)):
            raise DomainError("samples_mw must be finite")
        if np.any(arr < 0.0):
            raise DomainError("samples_mw must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "samples_mw", tuple(arr.tolist()))
        object.__setattr__(self, "_array", arr)

    def __hash__(self):
        return hash(self.samples_mw)

    def sample(self, rng, size=None):
        idx = rng.integers(0, self._array.size, size)
        return float(self._array[idx]) if size is None else self._array[idx]

    def laplace(self, s, q=_DEFAULT_QUADRATURE):
        _check_s(s)
        if s == 0.0:
            return 1.0
        return float(np.mean(np.exp(-s * self._array)))

    def scaled(self, k):
        return Empirical(tuple((self._array * k).tolist()))

    def mean(self):
        return float(np.mean(self._array))


Distribution = Union[Exponential, LognormalDb, Deterministic, LognormalTimesExpFading, Empirical]


def sample(d: PowerDistribution, rng: np.random.Generator, size=None):
    """Draw from ``d`` using the caller's generator."""
    return d.sample(rng, size)


def laplace(d: PowerDistribution, s: float, q: QuadratureSpec = _DEFAULT_QUADRATURE) -> float:
    """Laplace transform ``E[exp(-s I)]`` of the power ``I ~ d``.

    Closed forms are used for the exponential and deterministic variants,
    the sample average for empirical data and refined Gauss-Hermite
    quadrature for the two lognormal variants.

    Raises
    ------
    DomainError
        If ``s < 0``.
    NonConvergence
        If quadrature refinement does not settle within ``q``.
    """
    return d.laplace(s, q)


def cdf_closed_form(d: PowerDistribution, x: float) -> Optional[float]:
    """Exact CDF at ``x`` where available, otherwise None."""
    if not (x >= 0.0):
        raise DomainError(f"x must be >= 0, got {x!r}")
    return d.cdf(x)
