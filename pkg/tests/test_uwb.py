import numpy as np
import pytest
from scipy.integrate import quad

from smcsmooth import RandomSource
from smcsmooth.models.indoor import default_scene
from smcsmooth.models.uwb import UwbErrorModel, UwbScene, profile_pulse_time, uwb_loglik


def test_error_model_validation():
    with pytest.raises(ValueError):
        UwbErrorModel(alpha=2.5)
    with pytest.raises(ValueError):
        UwbErrorModel(sigma=0.0)


def test_density_branches():
    err = UwbErrorModel(alpha=0.5, sigma=1.0, gamma=1.0)
    # e < 0: weighted Gaussian; e >= 0: weighted Cauchy (left-closed at 0).
    assert err.logpdf(-1.0) == pytest.approx(
        np.log(1.5) - 0.5 * np.log(2 * np.pi) - 0.5
    )
    assert err.logpdf(0.0) == pytest.approx(np.log(0.5) - np.log(np.pi))
    assert err.logpdf(2.0) == pytest.approx(np.log(0.5) - np.log(np.pi * 5.0))


def test_density_normalizes_for_alpha_grid():
    for alpha in (0.1, 1.0, 1.9):
        err = UwbErrorModel(alpha=alpha, sigma=1.0, gamma=1.0)
        left, _ = quad(lambda e: np.exp(err.logpdf(e)), -20.0, 0.0)
        right, _ = quad(lambda e: np.exp(err.logpdf(e)), 0.0, np.inf)
        assert left + right == pytest.approx(1.0, abs=1e-6)


def test_cauchy_tail_decay_is_quadratic_in_log():
    err = UwbErrorModel(alpha=0.2, sigma=1.0, gamma=1.0)
    e = 1000.0
    assert err.logpdf(e) == pytest.approx(
        np.log(0.2 / np.pi) - 2 * np.log(e), abs=1e-5
    )


def test_sample_sign_frequencies():
    err = UwbErrorModel(alpha=0.6, sigma=1.0, gamma=1.0)
    draws = err.sample(RandomSource(0).generator(), 100_000)
    assert np.mean(draws >= 0) == pytest.approx(0.3, abs=0.01)


def test_scene_rejects_flat_receiver_cloud():
    flat = np.column_stack([np.arange(4.0), np.arange(4.0) ** 2, np.zeros(4)])
    with pytest.raises(ValueError):
        UwbScene(receivers=flat)


def test_loglik_peaks_at_true_position():
    scene = default_scene()
    err = UwbErrorModel()
    p_true = np.array([1.0, -0.5, 1.2])
    tau = 42e-9
    y = tau + scene.ranges(p_true[None, :])[0] / scene.c
    candidates = np.vstack([p_true, p_true + [0.5, 0, 0], p_true + [0, 0, -0.4]])
    ll = uwb_loglik(scene, err, candidates, tau, y)
    assert np.argmax(ll) == 0


def test_profile_recovers_pulse_time_on_clean_data():
    scene = default_scene()
    err = UwbErrorModel()
    p = np.array([[0.3, 0.7, 1.5]])
    tau = 77e-9
    y = tau + scene.ranges(p)[0] / scene.c
    ll_profiled, tau_hat = profile_pulse_time(scene, err, p, y)
    # Clean arrivals: the profiled likelihood must sit within the Gaussian core.
    assert abs(tau_hat[0] - tau) < err.sigma
    assert ll_profiled[0] >= uwb_loglik(scene, err, p, tau, y)[0] - 1e-6


def test_nearest_receiver_hears_first():
    scene = default_scene()
    p = np.array([[2.0, 1.0, 1.0]])
    arrivals = scene.ranges(p)[0] / scene.c  # tau = 0, no noise
    assert np.argmin(arrivals) == np.argmin(np.linalg.norm(scene.receivers - p[0], axis=1))
