import numpy as np
import pytest

from smcsmooth import (
    RandomSource,
    kalman_filter,
    measure_path_degeneracy,
    particle_filter,
    resample_multinomial,
)
from smcsmooth.models.lgss import lgss_model


def test_resample_multinomial_matches_probabilities():
    probs = np.array([0.1, 0.2, 0.7])
    idx = resample_multinomial(probs, 200_000, RandomSource(0))
    assert idx.min() >= 1 and idx.max() <= 3
    freq = np.bincount(idx, minlength=4)[1:] / idx.size
    np.testing.assert_allclose(freq, probs, atol=0.005)


def test_resample_multinomial_validates_input():
    with pytest.raises(ValueError):
        resample_multinomial([0.5, 0.4], 10, RandomSource(0))
    with pytest.raises(ValueError):
        resample_multinomial([0.5, -0.5, 1.0], 10, RandomSource(0))
    with pytest.raises(ValueError):
        resample_multinomial([1.0], 0, RandomSource(0))


def test_filtered_means_track_kalman_oracle():
    ssm, lgm = lgss_model(RandomSource(7))
    result = particle_filter(ssm, 5000, RandomSource(8))
    oracle = kalman_filter(lgm)
    err = np.abs(result.filtered_means[:, 0] - oracle.means[:, 0])
    assert err.max() < 0.12
    assert err.mean() < 0.04


def test_unique_ancestry_non_increasing_backward():
    ssm, _ = lgss_model(RandomSource(1))
    result = particle_filter(ssm, 100, RandomSource(2))
    counts = measure_path_degeneracy(result)
    assert counts[-1] == 100
    assert np.all(np.diff(counts) >= 0)  # fewer distinct ancestors further back


def test_ess_within_bounds():
    ssm, _ = lgss_model(RandomSource(3))
    result = particle_filter(ssm, 200, RandomSource(4))
    assert np.all(result.ess >= 1.0 - 1e-9)
    assert np.all(result.ess <= 200.0 + 1e-9)
    assert np.isfinite(result.log_likelihood)


def test_filter_is_deterministic_for_fixed_seed():
    ssm, _ = lgss_model(RandomSource(5))
    a = particle_filter(ssm, 50, RandomSource(6))
    b = particle_filter(ssm, 50, RandomSource(6))
    np.testing.assert_array_equal(a.system.particles, b.system.particles)
    np.testing.assert_array_equal(a.system.ancestors, b.system.ancestors)
