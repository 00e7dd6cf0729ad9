import math

import numpy as np
import pytest

from sphere_chords.core.errors import DomainError
from sphere_chords.stats.empirical import (
    empirical_cdf,
    ks_critical,
    ks_statistic,
    two_sample_ks,
    two_sample_ks_critical,
)


def test_step_values():
    F = empirical_cdf([3.0, 1.0, 2.0])
    assert F(2.0) == pytest.approx(2 / 3)
    assert F(-math.inf) == 0.0
    assert F(math.inf) == 1.0
    np.testing.assert_allclose(F(np.array([0.5, 1.0, 2.5])), [0.0, 1 / 3, 2 / 3])


def test_ties_are_right_continuous():
    assert empirical_cdf([1.0, 1.0])(1.0) == 1.0


@pytest.mark.parametrize("samples", [[], [1.0, math.nan], [math.inf]])
def test_invalid_samples(samples):
    with pytest.raises(DomainError):
        empirical_cdf(samples)


def test_mean_min():
    F = empirical_cdf([1.0, 2.0, 3.0])
    np.testing.assert_allclose(F.mean_min([0.0, 2.0, 10.0]), [0.0, 5 / 3, 2.0])


def test_uniform_sample_passes_ks(stream):
    samples = stream.generator.random(20000)
    ks = ks_statistic(empirical_cdf(samples), lambda x: np.clip(x, 0.0, 1.0))
    assert ks < ks_critical(samples.size)


def test_ecdf_against_itself_is_zero():
    F = empirical_cdf([0.1, 0.4, 0.4, 0.9])
    assert ks_statistic(F, F) == 0.0


def test_single_sample_distance():
    assert ks_statistic(empirical_cdf([0.5]), lambda x: np.clip(x, 0.0, 1.0)) == pytest.approx(0.5)


def test_invariant_under_increasing_maps(stream):
    samples = stream.generator.random(500)
    uniform = ks_statistic(empirical_cdf(samples), lambda x: np.clip(x, 0.0, 1.0))
    cubed = ks_statistic(empirical_cdf(samples**3), lambda x: np.cbrt(np.clip(x, 0.0, 1.0)))
    assert cubed == pytest.approx(uniform, abs=1e-12)


def test_two_sample_statistic_matches_scipy():
    assert two_sample_ks([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]) == 0.0
    assert two_sample_ks([0.0, 0.1], [1.0, 2.0]) == 1.0


def test_critical_values():
    assert ks_critical(100000) == pytest.approx(1.5 * 1.36 / math.sqrt(1e5))
    assert ks_critical(100000) == pytest.approx(6.45e-3, abs=1e-5)
    assert ks_critical(100, slack=1.0) == pytest.approx(0.136)
    assert two_sample_ks_critical(100, 100, slack=1.0) == pytest.approx(1.36 * math.sqrt(0.02))
