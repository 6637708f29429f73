import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sepoutage import (
    DegeneratePrimary,
    DomainError,
    InfeasibleBudget,
    compose,
    per_source_budget,
    secondary_budget,
    sharing_budget,
)


def test_secondary_budget_examples():
    assert secondary_budget(0.0, 0.1) == 0.1
    assert secondary_budget(0.05, 0.1) == pytest.approx(0.05 / 0.95, rel=1e-15)
    assert f"{secondary_budget(0.05, 0.1):.6g}" == "0.0526316"
    with pytest.raises(InfeasibleBudget):
        secondary_budget(0.1, 0.05)


def test_secondary_budget_errors():
    with pytest.raises(DegeneratePrimary):
        secondary_budget(1.0, 1.0)
    for bad in [(-0.1, 0.2), (0.1, 1.2), (float("nan"), 0.5)]:
        with pytest.raises(DomainError):
            secondary_budget(*bad)


def test_sharing_budget_record():
    b = sharing_budget(0.05, 0.1)
    assert (b.eps_primary, b.eps_target) == (0.05, 0.1)
    assert b.eps_secondary_max == secondary_budget(0.05, 0.1)


def test_per_source_budget_examples():
    assert per_source_budget(0.28, 1) == pytest.approx(0.28, rel=1e-15)
    assert per_source_budget(0.75, 2) == pytest.approx(0.5, rel=1e-15)
    eps = per_source_budget(0.1, 10)
    assert eps == pytest.approx(1 - 0.9 ** 0.1, rel=1e-13)
    assert abs(compose([eps] * 10) - 0.1) <= 1e-12
    assert per_source_budget(1.0, 3) == 1.0
    assert per_source_budget(0.0, 3) == 0.0


@pytest.mark.parametrize("args", [(1.5, 2), (-0.1, 2), (0.5, 0), (0.5, 2.5)])
def test_per_source_budget_domain(args):
    with pytest.raises(DomainError):
        per_source_budget(*args)


feasible = st.tuples(st.floats(0.0, 0.999), st.floats(0.0, 0.999)).map(sorted)


@given(feasible)
def test_round_trip(pair):
    e1, et = pair
    assert abs(compose([e1, secondary_budget(e1, et)]) - et) <= 1e-12


@given(feasible)
def test_budget_not_below_naive_subtraction(pair):
    e1, et = pair
    b = secondary_budget(e1, et)
    assert b >= et - e1 - 1e-16
    if e1 > 1e-6 and et < 1 and et - e1 > 1e-6:
        assert b > et - e1


def test_budget_monotonicity_on_grid():
    grid = np.linspace(0.0, 0.9, 31)
    for et in grid:
        vals = [secondary_budget(e1, et) for e1 in grid if e1 <= et]
        assert all(b < a for a, b in zip(vals, vals[1:]))
    for e1 in grid:
        vals = [secondary_budget(e1, et) for et in grid if et >= e1]
        assert all(b > a for a, b in zip(vals, vals[1:]))


@given(st.floats(0.0, 1.0), st.integers(1, 500))
def test_per_source_round_trip(target, n):
    assert abs(compose([per_source_budget(target, n)] * n) - target) <= 1e-12
