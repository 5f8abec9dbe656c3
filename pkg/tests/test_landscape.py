import numpy as np

from smcsmooth import RandomSource, mcmc_smoother, particle_filter
from smcsmooth.models.landscape import (
    LandscapeSpec,
    build_surface,
    landscape_model,
    read_grid_file,
    ridge_centers,
    write_grid_file,
)
from smcsmooth.smoothing import default_initial_trajectory, estimate


def test_surface_is_finite_and_bounded():
    surface = build_surface(LandscapeSpec())
    assert np.all(np.isfinite(surface.grid))
    assert np.isfinite(surface.max_log_weight)
    assert np.isfinite(np.exp(surface.max_log_weight))


def test_right_ridge_dominates_before_valley_then_disappears():
    spec = LandscapeSpec()
    surface = build_surface(spec)
    t = 50
    left_c, right_c = ridge_centers(spec, np.array([t]))
    values = surface.log_g(t, np.array([[left_c[0]], [right_c[0]]]))
    assert values[1] > values[0]  # right ridge locally more likely early
    in_valley = surface.log_g(75, np.array([[ridge_centers(spec, np.array([75]))[1][0]]]))
    at_left = surface.log_g(75, np.array([[ridge_centers(spec, np.array([75]))[0][0]]]))
    assert at_left - in_valley > 5.0  # right ridge suppressed inside the valley


def test_grid_file_round_trip(tmp_path):
    surface = build_surface(LandscapeSpec())
    path = tmp_path / "grid.txt"
    write_grid_file(surface, path)
    loaded = read_grid_file(path)
    np.testing.assert_allclose(loaded.grid, surface.grid, rtol=1e-15)
    np.testing.assert_allclose(loaded.x_grid, surface.x_grid, rtol=1e-15)


def test_filter_follows_right_ridge_smoother_takes_left():
    spec = LandscapeSpec()
    ssm, _ = landscape_model(spec)
    left_c, right_c = ridge_centers(spec, np.arange(1, spec.horizon + 1))
    t = 50

    fr = particle_filter(ssm, 5000, RandomSource(0))
    filter_mean = fr.filtered_means[t - 1, 0]
    assert abs(filter_mean - right_c[t - 1]) < abs(filter_mean - left_c[t - 1])

    init = default_initial_trajectory(ssm, np.zeros(1))
    chain = mcmc_smoother(ssm, 50, 300, init, RandomSource(1))
    est = estimate(chain, burn_in=50)
    smoother_mean = est.means[t - 1, 0]
    assert abs(smoother_mean - left_c[t - 1]) < abs(smoother_mean - right_c[t - 1])
