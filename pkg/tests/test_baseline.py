import numpy as np
import pytest

from rseda.baseline import EmnaConfig, emna_optimize
from rseda.core import Bounds, Objective


def neg_sphere(X):
    return -np.sum(X**2, axis=1)


def test_sphere_two_dims():
    cfg = EmnaConfig(population_size=200, max_evaluations=50000, seed=0)
    best, _ = emna_optimize(Objective(neg_sphere, 2, vectorized=True), Bounds.uniform(-5, 5, 2), cfg)
    assert best.fitness >= -1e-6


def test_shifted_parabola_one_dim():
    cfg = EmnaConfig(population_size=200, max_evaluations=50000)
    best, _ = emna_optimize(lambda x: -float((x[0] - 3.0) ** 2), Bounds([0.0], [10.0]), cfg)
    assert best.params[0] == pytest.approx(3.0, abs=1e-3)


def test_trace_monotone_and_deterministic():
    cfg = EmnaConfig(population_size=300, max_evaluations=30000, seed=4)
    obj = lambda: Objective(neg_sphere, 3, vectorized=True)
    b1, t1 = emna_optimize(obj(), Bounds.uniform(-2, 2, 3), cfg)
    b2, t2 = emna_optimize(obj(), Bounds.uniform(-2, 2, 3), cfg)
    assert np.all(np.diff(t1.best_fitness) >= 0)
    assert t1.records == t2.records
    np.testing.assert_array_equal(b1.params, b2.params)


def test_budget_respected():
    obj = Objective(neg_sphere, 2, vectorized=True)
    cfg = EmnaConfig(population_size=100, max_evaluations=750, patience=10**6)
    _, trace = emna_optimize(obj, Bounds.uniform(-2, 2, 2), cfg)
    assert obj.n_evaluations == 750
    assert trace.termination == "budget"


def test_budget_below_one_population():
    obj = Objective(neg_sphere, 2, vectorized=True, max_evaluations=10)
    with pytest.raises(ValueError, match="budget smaller than one population"):
        emna_optimize(obj, Bounds.uniform(-1, 1, 2), EmnaConfig(population_size=100, max_evaluations=1000))
