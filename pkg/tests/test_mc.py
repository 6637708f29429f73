import math

import pytest

from sepoutage import (
    Deterministic,
    DomainError,
    Exponential,
    InterferenceGroup,
    LognormalDb,
    McConfig,
    MissingOracle,
    Scenario,
    SignalModel,
    Threshold,
    compose,
    estimate_group_partial,
    estimate_total_outage,
)
from sepoutage.mc import DEFAULT_SEED, McEstimate

UNIT = SignalModel(1.0)
BETA1 = Threshold(1.0)


def g(name, *sources):
    return InterferenceGroup(name, sources)


def test_no_groups():
    est = estimate_total_outage(Scenario(UNIT, BETA1, ()), McConfig(1000))
    assert (est.p_hat, est.stderr, est.samples) == (0.0, 0.0, 1000)


def test_deterministic_interferer():
    est = estimate_total_outage(Scenario(UNIT, BETA1, (g("c", Deterministic(1.0)),)), McConfig(1_000_000))
    assert abs(est.p_hat - (1 - math.exp(-1))) <= 4 * est.stderr


def test_two_exponential_groups():
    sc = Scenario(UNIT, BETA1, (g("a", Exponential(1.0)), g("b", Exponential(1.0))))
    est = estimate_total_outage(sc, McConfig(1_000_000))
    assert abs(est.p_hat - 0.75) <= 4 * est.stderr


def test_group_partial_examples():
    assert estimate_group_partial(UNIT, BETA1, g("zero", Deterministic(0.0)), McConfig(10_000)).p_hat == 0.0
    est = estimate_group_partial(UNIT, BETA1, g("exp", Exponential(1.0)), McConfig(1_000_000))
    assert abs(est.p_hat - 0.5) <= 4 * est.stderr


def test_grouped_estimates_compose_to_flat_estimate():
    pair = g("pair", LognormalDb(0, 8), LognormalDb(0, 8))
    pair_est = estimate_group_partial(UNIT, BETA1, pair, McConfig(1_000_000, seed=21))
    grouped = compose([pair_est.p_hat] * 3)
    # d(grouped)/d(p) = 3 (1 - p)^2 for three independent copies of the same estimate
    grouped_se = 3 * (1 - pair_est.p_hat) ** 2 * pair_est.stderr
    flat = estimate_total_outage(Scenario(UNIT, BETA1, (g("six", *[LognormalDb(0, 8)] * 6),)), McConfig(1_000_000, seed=22))
    assert abs(grouped - flat.p_hat) <= 4 * math.hypot(grouped_se, flat.stderr)


def _scenario():
    return Scenario(UNIT, Threshold(0.5), (g("a", LognormalDb(-5, 6), Exponential(0.3)), g("b", Deterministic(0.2))))


def test_reproducible_bit_for_bit():
    cfg = McConfig(300_001, seed=99, streams=3)
    assert estimate_total_outage(_scenario(), cfg) == estimate_total_outage(_scenario(), cfg)


def test_workers_do_not_change_result():
    base = estimate_total_outage(_scenario(), McConfig(200_000, seed=7, streams=4, workers=1))
    threaded = estimate_total_outage(_scenario(), McConfig(200_000, seed=7, streams=4, workers=4))
    assert base == threaded


def test_stream_count_changes_stay_within_tolerance():
    single = estimate_total_outage(_scenario(), McConfig(1_000_000, seed=8, streams=1))
    for streams in (2, 5, 16):
        est = estimate_total_outage(_scenario(), McConfig(1_000_000, seed=8, streams=streams))
        assert est.samples == 1_000_000
        assert abs(est.p_hat - single.p_hat) <= 6 * single.stderr


def test_stderr_scales_as_inverse_sqrt():
    sc = Scenario(UNIT, BETA1, (g("c", Deterministic(1.0)),))
    small = estimate_total_outage(sc, McConfig(10_000, seed=1))
    large = estimate_total_outage(sc, McConfig(1_000_000, seed=1))
    assert small.stderr / large.stderr == pytest.approx(10.0, rel=0.2)


def test_binomial_stderr():
    est = McEstimate.from_count(250, 1000)
    assert est.p_hat == 0.25
    assert est.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 1000), rel=1e-15)


def test_measured_only_group_cannot_be_simulated():
    sc = Scenario(UNIT, BETA1, (InterferenceGroup("field", measured_partial=0.1),))
    with pytest.raises(MissingOracle):
        estimate_total_outage(sc, McConfig(100))


def test_derived_configs_are_distinct_and_stable():
    cfg = McConfig(10, seed=DEFAULT_SEED)
    assert cfg.derive(0) == cfg.derive(0)
    assert cfg.derive(0).seed != cfg.derive(1).seed


@pytest.mark.parametrize(
    "kwargs",
    [dict(samples=0), dict(samples=1.5), dict(streams=0), dict(seed=-1), dict(seed=2**64), dict(workers=0)],
)
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        McConfig(**kwargs)
