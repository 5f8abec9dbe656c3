import numpy as np
import pytest

from smcsmooth import RandomSource
from smcsmooth.models.indoor import (
    GRAVITY,
    IndoorNoise,
    InitialStatePrior,
    default_scene,
    generate_uwb_walk,
    imu_uwb_model,
    rollout_initial_trajectory,
    split_state,
)
from smcsmooth.models.quaternion import quaternion_exp, quaternion_to_rotation_matrix
from smcsmooth.models.uwb import UwbErrorModel

_TINY = IndoorNoise(
    sigma_a=1e-15,
    sigma_omega=1e-15,
    sigma_pos=1e-15,
    accel_bias=np.zeros(3),
    gyro_bias=np.zeros(3),
)


def _static_model(horizon=121, gyro_rate=(0.0, 0.0, 0.0)):
    scene = default_scene()
    accel = np.tile(-GRAVITY, (horizon - 1, 1))  # stationary board reads -g
    gyro = np.tile(np.asarray(gyro_rate, dtype=float), (horizon - 1, 1))
    prior = InitialStatePrior(np.zeros(3), np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))
    model = imu_uwb_model(
        scene, accel, gyro, UwbErrorModel(), _TINY, [None] * horizon, prior
    )
    return scene, model


def test_stationary_board_stays_put():
    _, model = _static_model()
    x = np.concatenate([np.zeros(6), [1.0, 0.0, 0.0, 0.0]])[None, :]
    gen = RandomSource(0).generator()
    for t in range(1, 121):
        x = model.transition_sample(t, x, gen)
    p, v, q = split_state(x)
    assert np.abs(p).max() < 1e-9
    assert np.abs(v).max() < 1e-9


def test_constant_rate_rotation_matches_axis_angle():
    scene, model = _static_model(horizon=241, gyro_rate=(0.0, 0.3, 0.0))
    x = np.concatenate([np.zeros(6), [1.0, 0.0, 0.0, 0.0]])[None, :]
    gen = RandomSource(1).generator()
    for t in range(1, 241):
        x = model.transition_sample(t, x, gen)
    elapsed = 240 * scene.sample_period
    expected = quaternion_exp(np.array([0.0, 0.3, 0.0]) * elapsed, 0.5)
    _, _, q = split_state(x)
    np.testing.assert_allclose(
        quaternion_to_rotation_matrix(q[0]),
        quaternion_to_rotation_matrix(expected),
        atol=1e-6,
    )


def test_transition_density_peaks_at_noise_free_step():
    scene = default_scene()
    noise = IndoorNoise()
    walk = generate_uwb_walk(scene, 2.0, RandomSource(2), noise=_TINY)
    prior = InitialStatePrior(
        walk.truth.states[0, 0:3], walk.truth.states[0, 3:6], walk.truth.states[0, 6:10]
    )
    model = imu_uwb_model(
        scene, walk.accel, walk.gyro, UwbErrorModel(), noise, walk.observations, prior
    )
    x = walk.truth.states[10][None, :]
    x_next = walk.truth.states[11][None, :]
    clean = model.transition_logpdf(11, x, x_next)[0]
    shifted = model.transition_logpdf(11, x, x_next + 0.05)[0]
    assert clean > shifted


def test_walk_quaternions_unit_norm():
    walk = generate_uwb_walk(default_scene(), 3.0, RandomSource(3))
    norms = np.linalg.norm(walk.truth.states[:, 6:10], axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-9)


def test_walk_pulse_schedule_and_reproducibility():
    scene = default_scene()
    walk = generate_uwb_walk(scene, 2.0, RandomSource(4))
    pulse_rows = [i for i, y in enumerate(walk.observations) if y is not None]
    assert pulse_rows == list(range(0, walk.truth.horizon, scene.uwb_every))
    again = generate_uwb_walk(scene, 2.0, RandomSource(4))
    np.testing.assert_array_equal(walk.truth.states, again.truth.states)
    with pytest.raises(ValueError):
        generate_uwb_walk(scene, 1.0, RandomSource(4))


def test_standstill_accelerometer_norm_is_gravity():
    walk = generate_uwb_walk(
        default_scene(),
        2.0,
        RandomSource(5),
        noise=_TINY,
        amplitude=(0.0, 0.0, 0.0),
        yaw_rate=0.0,
    )
    norms = np.linalg.norm(walk.accel, axis=1)
    np.testing.assert_allclose(norms, np.linalg.norm(GRAVITY), atol=1e-9)


def test_proposal_reduces_to_dynamics_without_measurement():
    scene = default_scene()
    walk = generate_uwb_walk(scene, 2.0, RandomSource(6))
    prior = InitialStatePrior(
        walk.truth.states[0, 0:3], walk.truth.states[0, 3:6], walk.truth.states[0, 6:10]
    )
    model = imu_uwb_model(
        scene, walk.accel, walk.gyro, UwbErrorModel(), IndoorNoise(), walk.observations, prior
    )
    assert model.bootstrap_when_unobserved
    t = 3  # an unobserved step under the default pulse schedule
    assert model.observation(t) is None
    x_prev = walk.truth.states[t - 2][None, :]
    x = walk.truth.states[t - 1][None, :]
    np.testing.assert_allclose(
        model.proposal_logpdf(t, x_prev, x, None),
        model.transition_logpdf(t - 1, x_prev, x),
        atol=1e-9,
    )


def test_measurement_proposal_lands_near_truth():
    scene = default_scene()
    walk = generate_uwb_walk(scene, 2.0, RandomSource(7))
    prior = InitialStatePrior(
        walk.truth.states[0, 0:3], walk.truth.states[0, 3:6], walk.truth.states[0, 6:10]
    )
    model = imu_uwb_model(
        scene, walk.accel, walk.gyro, UwbErrorModel(), IndoorNoise(), walk.observations, prior
    )
    t = scene.uwb_every + 1  # second pulse step (1-based)
    y = model.observation(t)
    assert y is not None
    gen = RandomSource(8).generator()
    x_prev = np.tile(walk.truth.states[t - 2], (64, 1))
    x = model.proposal_sample(t, x_prev, y, gen)
    pos_err = np.linalg.norm(x[:, 0:3] - walk.truth.states[t - 1, 0:3], axis=1)
    assert np.median(pos_err) < 0.5
    logq = model.proposal_logpdf(t, x_prev, x, y)
    assert np.all(np.isfinite(logq))


def test_rollout_tracks_clean_imu():
    scene = default_scene()
    walk = generate_uwb_walk(scene, 2.0, RandomSource(9), noise=_TINY)
    prior = InitialStatePrior(
        walk.truth.states[0, 0:3], walk.truth.states[0, 3:6], walk.truth.states[0, 6:10]
    )
    rollout = rollout_initial_trajectory(
        scene, walk.accel, walk.gyro, _TINY, prior, walk.truth.horizon
    )
    np.testing.assert_allclose(rollout.states, walk.truth.states, atol=1e-6)


def test_model_rejects_short_imu_streams():
    scene = default_scene()
    prior = InitialStatePrior(np.zeros(3), np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        imu_uwb_model(
            scene, np.zeros((3, 3)), np.zeros((3, 3)), UwbErrorModel(), IndoorNoise(),
            [None] * 10, prior,
        )
