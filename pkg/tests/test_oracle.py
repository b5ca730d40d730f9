import math

import numpy as np
import pytest
from scipy import stats

from ssopt.model import BrownianDemand
from ssopt.simulator import reflected_cdf, reflected_tail_oracle, sample_reflected_levels

DEMAND = BrownianDemand(1.0, 2.0)


def test_tail_is_one_below_barrier():
    assert reflected_tail_oracle(-0.5, 1.0, 0.0, 1.0, DEMAND) == 1.0
    np.testing.assert_array_equal(reflected_tail_oracle(np.array([0.0, 0.5]), 2.0, 1.0, 3.0, DEMAND), [1.0, 1.0])


def test_tail_at_zero_barrier():
    v, t, x = 0.7, 1.5, 0.3
    scale = math.sqrt(2.0 * t)
    expected = (stats.norm.cdf((-v + x - t) / scale)
                + math.exp(-v) * stats.norm.cdf((-v - x + t) / scale))
    assert reflected_tail_oracle(v, t, 0.0, x, DEMAND) == pytest.approx(expected)


def test_tail_tends_to_exponential():
    for m in (0.0, 2.0):
        assert reflected_tail_oracle(m + 1.0, 1e4, m, m + 0.5, DEMAND) == pytest.approx(math.exp(-1.0), rel=1e-9)


def test_tail_is_decreasing_and_shift_invariant():
    v = np.linspace(1.0, 8.0, 50)
    tail = reflected_tail_oracle(v, 3.0, 1.0, 2.0, DEMAND)
    assert np.all(np.diff(tail) <= 0)
    shifted = reflected_tail_oracle(v + 5.0, 3.0, 6.0, 7.0, DEMAND)
    np.testing.assert_allclose(tail, shifted, atol=1e-14)
    np.testing.assert_allclose(reflected_cdf(v, 3.0, 1.0, 2.0, DEMAND), 1.0 - tail)


def test_tail_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        reflected_tail_oracle(1.0, 0.0, 0.0, 1.0, DEMAND)


def test_sampled_levels_respect_barrier():
    z = sample_reflected_levels(DEMAND, 1.0, 0.5, 1.0, 1e-2, 500, seed=3)
    assert z.shape == (500,)
    assert z.min() >= 1.0


def test_sampled_levels_match_oracle():
    t, m, x = 1.0, 1.0, 0.5
    z = sample_reflected_levels(DEMAND, m, x, t, 1e-4, 1000, seed=0)
    result = stats.kstest(z, lambda v: reflected_cdf(v, t, m, x, DEMAND))
    assert result.pvalue > 0.01


@pytest.mark.slow
def test_sampled_levels_match_oracle_fine_grid():
    t, m, x = 10.0, 0.0, 2.0
    z = sample_reflected_levels(DEMAND, m, x, t, 1e-4, 1000, seed=1)
    result = stats.kstest(z, lambda v: reflected_cdf(v, t, m, x, DEMAND))
    assert result.pvalue > 0.01
