import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rseda.kepler import TWO_PI, _bisect, mean_anomaly, solve_kepler, true_anomaly


def test_circular_orbit_identity():
    m = np.linspace(0, 6, 7)
    np.testing.assert_allclose(solve_kepler(m, 0.0), m, atol=1e-15)


def test_high_eccentricity_reference():
    assert solve_kepler(0.3, 0.9) == pytest.approx(1.1035177203030869803, abs=1e-12)


def test_zero_and_pi_fixed_points():
    assert solve_kepler(0.0, 0.7) == 0.0
    assert solve_kepler(np.pi, 0.7) == pytest.approx(np.pi, abs=1e-13)


def test_eccentricity_checked():
    for bad in (1.0, 1.2, -0.1, np.nan):
        with pytest.raises(ValueError, match="eccentricity out of range"):
            solve_kepler(1.0, bad)


def test_residual_over_grid():
    e, m = np.meshgrid(np.arange(0, 1.0, 0.01), np.arange(0, TWO_PI, 0.01))
    E = solve_kepler(m, e)
    assert np.max(np.abs(E - e * np.sin(E) - m)) < 1e-12
    assert np.all((E >= 0) & (E < TWO_PI))


def test_agrees_with_bisection():
    rng = np.random.default_rng(0)
    m = rng.uniform(0, TWO_PI, 2000)
    e = rng.uniform(0, 0.99, 2000)
    np.testing.assert_allclose(solve_kepler(m, e), _bisect(m, e, tol=0.0), atol=1e-11)


def test_mean_anomaly_wraps():
    assert mean_anomaly(150.0, 100.0, 0.5) == pytest.approx(np.mod(3 * np.pi + 0.5, TWO_PI))
    assert 0 <= mean_anomaly(-37.0, 10.0, 0.0) < TWO_PI


def test_true_anomaly_reference():
    assert true_anomaly(1.0, 0.3) == pytest.approx(1.2799240547062495815, abs=1e-13)
    assert true_anomaly(0.0, 0.5) == 0.0
    assert true_anomaly(np.pi, 0.5) == pytest.approx(np.pi, abs=1e-12)


def test_true_anomaly_monotone_and_continuous():
    E = np.linspace(0, TWO_PI, 20001)[:-1]
    for e in (0.0, 0.3, 0.9, 0.99):
        t = true_anomaly(E, e)
        assert np.all(np.diff(t) > 0)
        gaps = np.diff(np.concatenate([t, [t[0] + TWO_PI]]))
        assert gaps.max() < 1.0


@settings(max_examples=200)
@given(st.floats(0, TWO_PI, exclude_max=True), st.floats(0, 0.99))
def test_true_anomaly_matches_tan_form(E, e):
    if abs(E - np.pi) < 1e-6:
        return
    ref = np.mod(2 * np.arctan(np.sqrt((1 + e) / (1 - e)) * np.tan(E / 2)), TWO_PI)
    diff = abs(true_anomaly(E, e) - ref)
    assert min(diff, TWO_PI - diff) < 1e-9
