import numpy as np
import pytest

from sparsebo.acquisition import (
    expected_improvement,
    make_acquisition,
    probability_of_improvement,
    ucb_schedule,
    upper_confidence_bound,
)

# closed-form values computed independently from the normal cdf/pdf
EI_CASES = [
    (1.0, 0.25, 0.8, 0.3152194184737265),
    (0.0, 1.0, 0.5, 0.19779655740130603),
    (2.0, 0.0, 1.0, 0.0),  # zero variance -> zero improvement by definition
]


@pytest.mark.parametrize("mean,var,inc,expected", EI_CASES)
def test_expected_improvement_frozen_values(mean, var, inc, expected):
    out = expected_improvement(np.array([mean]), np.array([var]), inc)
    assert out[0] == pytest.approx(expected, abs=1e-12)


def test_ei_nonnegative_and_monotone_in_mean():
    var = np.full(50, 0.3)
    means = np.linspace(-3, 3, 50)
    ei = expected_improvement(means, var, 0.0)
    assert np.all(ei >= 0)
    assert np.all(np.diff(ei) > 0)


def test_pi_frozen_value():
    out = probability_of_improvement(np.array([1.0]), np.array([0.25]), 0.8, xi=0.1)
    assert out[0] == pytest.approx(0.579259709439103, abs=1e-12)


def test_pi_zero_variance_is_indicator():
    mean = np.array([0.5, 1.5])
    var = np.zeros(2)
    out = probability_of_improvement(mean, var, 1.0)
    assert list(out) == [0.0, 1.0]


def test_pi_rejects_negative_bias():
    with pytest.raises(ValueError):
        probability_of_improvement(np.zeros(1), np.ones(1), 0.0, xi=-0.1)


def test_ucb_values_and_validation():
    out = upper_confidence_bound(np.array([1.0]), np.array([4.0]), tau=2.0)
    assert out[0] == pytest.approx(5.0)
    with pytest.raises(ValueError):
        upper_confidence_bound(np.zeros(1), np.ones(1), tau=-1.0)


def test_ucb_schedule_grows_sublinearly():
    vals = [ucb_schedule(t, 2) for t in (2, 10, 100, 1000)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # sublinear: doubling t should not double the coefficient
    assert vals[-1] / vals[0] < 3


def test_make_acquisition_dispatch():
    mean, var = np.array([1.0]), np.array([0.25])
    assert make_acquisition("ei", 0.8)(mean, var)[0] == pytest.approx(EI_CASES[0][3])
    assert make_acquisition("ucb", 0.0, tau=1.0)(mean, var)[0] == pytest.approx(1.5)
    with pytest.raises(ValueError):
        make_acquisition("entropy", 0.0)
