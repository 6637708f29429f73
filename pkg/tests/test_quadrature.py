import math

import numpy as np
import pytest
from scipy import integrate

from sepoutage.errors import DomainError, NonConvergence
from sepoutage.quadrature import (
    QuadratureSpec,
    gauss_hermite,
    log_lognormal_expectation,
    lognormal_expectation,
)

A = math.log(10.0) / 10.0


@pytest.mark.parametrize("n", [2, 3, 7, 20, 64, 100])
def test_rule_matches_numpy(n):
    x, log_w = gauss_hermite(n)
    x_ref, w_ref = np.polynomial.hermite.hermgauss(n)
    np.testing.assert_allclose(x, x_ref, rtol=0, atol=1e-13)
    np.testing.assert_allclose(np.exp(log_w - x * x), w_ref, rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("n", [128, 256, 512])
def test_large_rules_integrate_even_moments(n):
    # sum w x^(2k) = Gamma(k + 1/2) exactly for 2k < 2n
    x, log_w = gauss_hermite(n)
    assert np.all(np.isfinite(log_w))
    w = np.exp(log_w - x * x)
    for k in range(6):
        assert np.sum(w * x ** (2 * k)) == pytest.approx(math.gamma(k + 0.5), rel=1e-12)


def _quad_oracle(kind, t0, b):
    kern = (lambda t: -math.exp(t)) if kind == "laplace" else (lambda t: -math.log1p(math.exp(t)) if t < 30 else -t)

    def f(z):
        t = t0 + b * z
        if t > 700:
            return 0.0
        return math.exp(kern(t) - 0.5 * z * z) / math.sqrt(2 * math.pi)

    # split around the region where the kernel switches off
    z_switch = -t0 / b
    pts = sorted({-40.0, min(max(z_switch, -39.0), 39.0), 40.0})
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        total += integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-13, limit=500)[0]
    return total


@pytest.mark.parametrize("kind", ["laplace", "fading"])
@pytest.mark.parametrize("sigma_db", [1.0, 4.0, 8.0, 12.0])
@pytest.mark.parametrize("log10_arg", [-3.0, -1.0, 0.0, 1.0, 3.0])
def test_refined_expectation_matches_adaptive_quadrature(kind, sigma_db, log10_arg):
    t0 = log10_arg * math.log(10.0)
    b = A * sigma_db
    expected = _quad_oracle(kind, t0, b)
    assert lognormal_expectation(kind, t0, b, QuadratureSpec()) == pytest.approx(expected, rel=1e-8)


def test_zero_spread_is_kernel_at_median():
    assert math.exp(log_lognormal_expectation("laplace", 0.0, 0.0, 64)) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert math.exp(log_lognormal_expectation("fading", 0.0, 0.0, 64)) == pytest.approx(0.5, rel=1e-15)


def test_relative_accuracy_far_in_the_tail():
    # s * median = 1e6 at 2 dB spread: the transform is ~1e-300 yet the rules still agree
    t0, b = math.log(1e3), A * 2.0
    lo = log_lognormal_expectation("laplace", t0, b, 64)
    hi = log_lognormal_expectation("laplace", t0, b, 128)
    assert lo < -20
    assert abs(math.expm1(lo - hi)) < 1e-12


def test_nonconvergence_is_raised_when_max_nodes_too_small():
    q = QuadratureSpec(nodes=2, refinement_tol=1e-12, max_nodes=8)
    with pytest.raises(NonConvergence) as info:
        lognormal_expectation("laplace", 0.0, A * 12.0, q)
    assert info.value.nodes == 8
    assert info.value.rel_change > 1e-12


def test_rule_at_ceiling_is_checked_against_halved_rule():
    q = QuadratureSpec(nodes=512, max_nodes=512)
    v = lognormal_expectation("laplace", 0.0, A * 8.0, q)
    assert v == pytest.approx(lognormal_expectation("laplace", 0.0, A * 8.0, QuadratureSpec()), rel=1e-10)


@pytest.mark.parametrize(
    "kwargs",
    [dict(nodes=1), dict(nodes=2.5), dict(refinement_tol=0.0), dict(refinement_tol=-1e-3),
     dict(nodes=64, max_nodes=32), dict(max_nodes=1024)],
)
def test_quadrature_spec_validation(kwargs):
    with pytest.raises(DomainError):
        QuadratureSpec(**kwargs)
