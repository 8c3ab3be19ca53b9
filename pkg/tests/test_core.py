import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rseda.core import (
    BudgetExhausted,
    Bounds,
    Objective,
    Pps,
    Solution,
    clamp_to_bounds,
    pps_update,
    truncation_select,
)


def sols(fits):
    return [Solution([float(i)], f) for i, f in enumerate(fits)]


def test_truncation_top_fraction():
    out = truncation_select(sols(range(1, 11)), 0.2)
    assert [s.fitness for s in out] == [10, 9]


def test_truncation_keeps_at_least_one():
    out = truncation_select(sols([3.0]), 0.2)
    assert len(out) == 1 and out[0].fitness == 3.0


def test_truncation_stable_ties():
    pop = sols([7.0] * 5)
    out = truncation_select(pop, 0.4)
    assert [s.params[0] for s in out] == [0.0, 1.0]


def test_truncation_empty():
    with pytest.raises(ValueError, match="empty population"):
        truncation_select([], 0.5)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60), st.floats(0.01, 1.0))
def test_truncation_size_and_subset(fits, frac):
    pop = sols(fits)
    out = truncation_select(pop, frac)
    assert len(out) == math.ceil(frac * len(pop))
    assert all(any(o is p for p in pop) for o in out)
    f = [o.fitness for o in out]
    assert f == sorted(f, reverse=True)


def make_pps(fits, cap):
    return pps_update(Pps(cap, 1), sols(fits))


def test_pps_displaces_minimum():
    pps = pps_update(make_pps([5, 4, 3], 3), sols([6]))
    assert list(pps.fitness) == [6, 5, 4]


def test_pps_rejects_unfit():
    pps = pps_update(make_pps([5, 4, 3], 3), sols([1]))
    assert list(pps.fitness) == [5, 4, 3]


def test_pps_fill_from_empty():
    pps = make_pps([2, 9, 4], 2)
    assert list(pps.fitness) == [9, 4]
    assert pps.best.fitness == 9


def test_pps_empty_candidates_noop():
    pps = make_pps([1, 2], 3)
    assert pps_update(pps, []) is pps
    assert list(pps.fitness) == [2, 1]


def test_pps_ties_keep_earlier_member():
    pps = Pps(1, 1).update([[0.0]], [1.0])
    pps.update([[5.0]], [1.0])
    assert pps.params[0, 0] == 0.0


@settings(max_examples=50)
@given(st.lists(st.lists(st.floats(-100, 100), max_size=8), min_size=1, max_size=10), st.integers(1, 6))
def test_pps_min_fitness_monotone(batches, cap):
    pps = Pps(cap, 1)
    last_min = -np.inf
    for b in batches:
        pps_update(pps, sols(b))
        assert len(pps) <= cap
        if len(pps) == cap:
            assert pps.fitness.min() >= last_min
            last_min = pps.fitness.min()
        assert np.all(np.diff(pps.fitness) <= 0)


def test_clamp_examples():
    b1 = Bounds([0.0], [1.0])
    assert clamp_to_bounds([0.5], b1)[0] == 0.5
    assert clamp_to_bounds([1.7], b1)[0] == 1.0
    np.testing.assert_array_equal(clamp_to_bounds([-3, 2], Bounds.uniform(0, 1, 2)), [0, 1])


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
def test_clamp_idempotent(x):
    b = Bounds([-1, 0, 5], [1, 10, 6])
    once = clamp_to_bounds(x, b)
    np.testing.assert_array_equal(clamp_to_bounds(once, b), once)


def test_bounds_validation():
    with pytest.raises(ValueError):
        Bounds([1.0], [1.0])
    with pytest.raises(ValueError, match="logarithmic"):
        Bounds([0.0], [1.0], log_scale=[True])


def test_unit_roundtrip_log_and_linear():
    b = Bounds([1.0, -5.0], [1e5, 5.0], log_scale=[True, False])
    x = np.array([[10.0, 0.0], [1e5, -5.0]])
    u = b.to_unit(x)
    np.testing.assert_allclose(u, [[0.2, 0.5], [1.0, 0.0]])
    np.testing.assert_allclose(b.from_unit(u), x)


def test_periodic_wraps_rather_than_clips():
    b = Bounds([0.0, 0.0], [1.0, 1.0], periodic=[True, False])
    np.testing.assert_allclose(b.project_unit([[1.25, 1.25], [-0.25, -0.25]]), [[0.25, 1.0], [0.75, 0.0]])


def test_objective_counts_rows():
    obj = Objective(lambda x: -np.sum(x**2), 2)
    obj(np.zeros(2))
    obj.evaluate(np.zeros((5, 2)))
    assert obj.n_evaluations == 6
    vec = Objective(lambda X: -np.sum(X**2, axis=1), 2, vectorized=True)
    np.testing.assert_allclose(vec.evaluate(np.ones((3, 2))), -2.0)
    assert vec.n_evaluations == 3


def test_objective_budget():
    obj = Objective(lambda x: 0.0, 1, max_evaluations=2)
    obj.evaluate(np.zeros((2, 1)))
    with pytest.raises(BudgetExhausted):
        obj(np.zeros(1))


def test_negated_wraps_minimization():
    obj = Objective.negated(lambda x: float(np.sum(x**2)), 2)
    assert obj(np.array([1.0, 2.0])) == -5.0
