"""Ten-state UWB/IMU indoor positioning model and its synthetic data
generator.

State x = [p (3), v (3), q (4)]: position and velocity in the navigation
frame, body-to-navigation orientation as a unit quaternion.  Accelerometer
and gyroscope readings act as inputs to the dynamics; their measurement
noise is what makes the transition density stochastic.  UWB arrival times
are observed only at pulse steps; all other steps carry no observation
weight.  A small position jitter regularizes the otherwise degenerate
position update so the transition density is evaluable pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..rng import as_generator
from ..ssm import StateSpaceModel, Trajectory
from .quaternion import (
    quaternion_conjugate,
    quaternion_exp,
    quaternion_log,
    quaternion_product,
    quaternion_to_rotation_matrix,
)
from .uwb import UwbErrorModel, UwbScene, profile_pulse_time

_LOG_2PI = np.log(2.0 * np.pi)

GRAVITY = np.array([0.0, 0.0, -9.80665])


def _gauss3(resid: np.ndarray, sigma: float) -> np.ndarray:
    return -1.5 * (_LOG_2PI + 2 * np.log(sigma)) - 0.5 * np.sum(resid**2, axis=1) / sigma**2


@dataclass(frozen=True)
class IndoorNoise:
    """Sensor noise scales, biases, and the position regularization jitter."""

    sigma_a: float = 0.5  # m/s^2
    sigma_omega: float = 0.01  # rad/s
    sigma_pos: float = 0.03  # m; keeps the transition density non-degenerate
    accel_bias: np.ndarray = field(default_factory=lambda: np.array([0.01, -0.02, 0.015]))
    gyro_bias: np.ndarray = field(default_factory=lambda: np.array([0.001, 0.002, -0.001]))


@dataclass(frozen=True)
class InitialStatePrior:
    """Gaussian prior on the initial state (rotation via the tangent space)."""

    mean_position: np.ndarray
    mean_velocity: np.ndarray
    mean_quaternion: np.ndarray
    sigma_p: float = 0.02
    sigma_v: float = 0.05
    sigma_q: float = 2e-3  # rad


def split_state(x: np.ndarray):
    """(n, 10) -> positions (n, 3), velocities (n, 3), quaternions (n, 4)."""
    return x[:, 0:3], x[:, 3:6], x[:, 6:10]


def imu_uwb_model(
    scene: UwbScene,
    accel: np.ndarray,
    gyro: np.ndarray,
    err: UwbErrorModel,
    noise: IndoorNoise,
    observations: List[Optional[np.ndarray]],
    prior: InitialStatePrior,
) -> StateSpaceModel:
    """Assemble the positioning problem as a bootstrap state-space model.

    accel/gyro hold at least horizon - 1 readings; reading t drives the
    transition from step t to t + 1.  observations is a length-horizon list
    of per-receiver arrival-time rows, None where no pulse was sent; the
    unknown transmit time is profiled out inside the observation density.
    """
    horizon = len(observations)
    accel = np.asarray(accel, dtype=float)
    gyro = np.asarray(gyro, dtype=float)
    if accel.shape[0] < horizon - 1 or gyro.shape[0] < horizon - 1:
        raise ValueError("need at least horizon - 1 accelerometer and gyroscope readings")
    if accel.shape[1] != 3 or gyro.shape[1] != 3:
        raise ValueError("IMU readings must have three axes")
    Ts = scene.sample_period
    half_Ts = Ts / 2.0

    def initial_sample(gen, n):
        p = prior.mean_position + prior.sigma_p * gen.standard_normal((n, 3))
        v = prior.mean_velocity + prior.sigma_v * gen.standard_normal((n, 3))
        axis = prior.sigma_q * gen.standard_normal((n, 3))
        q = quaternion_product(np.tile(prior.mean_quaternion, (n, 1)), quaternion_exp(axis))
        return np.concatenate([p, v, q], axis=1)

    def initial_logpdf(x):
        p, v, q = split_state(x)
        dq = quaternion_product(np.tile(quaternion_conjugate(prior.mean_quaternion), (q.shape[0], 1)), q)
        axis = np.atleast_2d(quaternion_log(dq))
        return (
            _gauss3(p - prior.mean_position, prior.sigma_p)
            + _gauss3(v - prior.mean_velocity, prior.sigma_v)
            + _gauss3(axis, prior.sigma_q)
        )

    def transition_sample(t, x, gen):
        p, v, q = split_state(x)
        n = x.shape[0]
        e_a = noise.sigma_a * gen.standard_normal((n, 3))
        e_w = noise.sigma_omega * gen.standard_normal((n, 3))
        R = quaternion_to_rotation_matrix(q)
        a_nav = np.einsum("nij,nj->ni", R, accel[t - 1] - noise.accel_bias - e_a) + GRAVITY
        p_next = p + Ts * v + 0.5 * Ts**2 * a_nav
        p_next = p_next + noise.sigma_pos * gen.standard_normal((n, 3))
        v_next = v + Ts * a_nav
        omega = gyro[t - 1] - noise.gyro_bias - e_w
        q_next = quaternion_product(q, quaternion_exp(omega, half_Ts))
        return np.concatenate([p_next, v_next, q_next], axis=1)

    def transition_logpdf(t, x, x_next):
        p, v, q = split_state(x)
        p2, v2, q2 = split_state(np.atleast_2d(x_next))
        a_nav = (v2 - v) / Ts
        R = quaternion_to_rotation_matrix(q)
        body = np.einsum("nji,nj->ni", R, a_nav - GRAVITY)  # R^T (a - g)
        e_a = accel[t - 1] - noise.accel_bias - body
        logp = _gauss3(e_a, noise.sigma_a)
        p_pred = p + Ts * v + 0.5 * Ts**2 * a_nav
        logp = logp + _gauss3(p2 - p_pred, noise.sigma_pos)
        dq = quaternion_product(quaternion_conjugate(q), q2)
        omega = np.atleast_2d(quaternion_log(dq)) * (2.0 / Ts)
        e_w = gyro[t - 1] - noise.gyro_bias - omega
        return logp + _gauss3(e_w, noise.sigma_omega)

    def observation_logpdf(t, x, y_row):
        p, _, _ = split_state(x)
        loglik, _ = profile_pulse_time(scene, err, p, y_row)
        return loglik

    def _pulse_fit(p_pred, y_row, prior_sigma=None, iterations=2):
        """Robust Gauss-Newton fit of the pulse position around p_pred.

        Minimizes the arrival-time misfit (inlier-reweighted per receiver)
        plus the prior ||p - p_pred||^2 / prior_sigma^2 (the dynamics jitter
        scale by default); the unknown transmit time is re-profiled at each
        iterate.  Returns the fitted positions (n, 3) and the per-particle
        3x3 posterior covariance.
        """
        n = p_pred.shape[0]
        prior_info = 1.0 / (prior_sigma if prior_sigma is not None else noise.sigma_pos) ** 2
        p_hat = p_pred.copy()
        A = np.empty((n, 3, 3))
        for _ in range(iterations):
            _, tau_hat = profile_pulse_time(scene, err, p_hat, y_row)
            diff = p_hat[:, None, :] - scene.receivers[None, :, :]
            d = np.linalg.norm(diff, axis=2)
            u = diff / d[:, :, None]
            r = y_row[None, :] - tau_hat[:, None] - d / scene.c
            # IRLS weights from the error-model curvature psi(r) / r.
            w_gauss = 1.0 / err.sigma**2
            w_cauchy = 2.0 / (err.gamma**2 + r**2)
            w = np.where(r < 0, w_gauss, w_cauchy) / scene.c**2
            A = np.einsum("nm,nmi,nmj->nij", w, u, u)
            A[:, 0, 0] += prior_info
            A[:, 1, 1] += prior_info
            A[:, 2, 2] += prior_info
            grad = np.einsum("nm,nmi->ni", w * r * scene.c, u)
            grad -= (p_hat - p_pred) * prior_info
            p_hat = p_hat + np.linalg.solve(A, grad[..., None])[..., 0]
        return p_hat, np.linalg.inv(A)

    _PROPOSAL_INFLATION = 1.5  # covariance safety margin over the local fit

    def _dynamics_rest(t, x, gen):
        """Velocity and orientation part of the transition draw plus the
        position mean conditioned on the drawn velocity."""
        p, v, q = split_state(x)
        n = x.shape[0]
        e_a = noise.sigma_a * gen.standard_normal((n, 3))
        e_w = noise.sigma_omega * gen.standard_normal((n, 3))
        R = quaternion_to_rotation_matrix(q)
        a_nav = np.einsum("nij,nj->ni", R, accel[t - 1] - noise.accel_bias - e_a) + GRAVITY
        v_next = v + Ts * a_nav
        omega = gyro[t - 1] - noise.gyro_bias - e_w
        q_next = quaternion_product(q, quaternion_exp(omega, half_Ts))
        p_mean = p + half_Ts * (v + v_next)
        return p_mean, v_next, q_next

    def proposal_sample(t, x_prev, y_row, gen):
        if y_row is None:
            return transition_sample(t - 1, x_prev, gen)
        p_mean, v_next, q_next = _dynamics_rest(t - 1, x_prev, gen)
        p_hat, cov = _pulse_fit(p_mean, np.asarray(y_row, dtype=float))
        L = np.linalg.cholesky(_PROPOSAL_INFLATION * cov)
        p_next = p_hat + np.einsum("nij,nj->ni", L, gen.standard_normal(p_hat.shape))
        return np.concatenate([p_next, v_next, q_next], axis=1)

    def proposal_logpdf(t, x_prev, x, y_row):
        if y_row is None:
            return transition_logpdf(t - 1, x_prev, x)
        p, v, q = split_state(x_prev)
        p2, v2, q2 = split_state(np.atleast_2d(x))
        # Velocity and orientation come from the dynamics unchanged.
        a_nav = (v2 - v) / Ts
        R = quaternion_to_rotation_matrix(q)
        body = np.einsum("nji,nj->ni", R, a_nav - GRAVITY)
        e_a = accel[t - 2] - noise.accel_bias - body
        logp = _gauss3(e_a, noise.sigma_a)
        dq = quaternion_product(quaternion_conjugate(q), q2)
        omega = np.atleast_2d(quaternion_log(dq)) * (2.0 / Ts)
        e_w = gyro[t - 2] - noise.gyro_bias - omega
        logp = logp + _gauss3(e_w, noise.sigma_omega)
        # Position from the measurement-driven Gaussian around the fit.
        p_mean = p + half_Ts * (v + v2)
        p_hat, cov = _pulse_fit(p_mean, np.asarray(y_row, dtype=float))
        cov = _PROPOSAL_INFLATION * cov
        resid = p2 - p_hat
        sign, logdet = np.linalg.slogdet(cov)
        maha = np.einsum("ni,nij,nj->n", resid, np.linalg.inv(cov), resid)
        return logp - 0.5 * (3.0 * _LOG_2PI + logdet + maha)

    return StateSpaceModel(
        state_dim=10,
        horizon=horizon,
        observations=observations,
        initial_logpdf=initial_logpdf,
        initial_sample=initial_sample,
        transition_logpdf=transition_logpdf,
        transition_sample=transition_sample,
        observation_logpdf=observation_logpdf,
        proposal_logpdf=proposal_logpdf,
        proposal_sample=proposal_sample,
        bootstrap_when_unobserved=True,
    )


@dataclass
class WalkData:
    """Synthetic figure-eight walk: ground truth plus sensor streams."""

    truth: Trajectory
    accel: np.ndarray  # (T - 1, 3) accelerometer readings
    gyro: np.ndarray  # (T - 1, 3) gyroscope readings
    observations: List[Optional[np.ndarray]]  # length T; arrival rows at pulse steps
    pulse_times: dict  # 1-based step -> true transmit time (unknown to estimators)


def generate_uwb_walk(
    scene: UwbScene,
    duration: float,
    rng,
    err: UwbErrorModel = UwbErrorModel(),
    noise: IndoorNoise = IndoorNoise(),
    center=(0.0, 0.0, 1.0),
    loop_period: float = 10.0,
    amplitude=(1.2, 0.8, 0.1),
    yaw_rate: float = 0.2,
) -> WalkData:
    """Simulate a smooth figure-eight path with noisy IMU and UWB streams.

    The planar path is a Lissajous figure-eight; the vertical component is a
    small bob.  Orientation spins about the vertical axis at a constant rate
    so the constant-rate integration is exact.  IMU readings come from the
    analytic accelerations plus Gaussian noise and constant biases; UWB
    arrivals follow the range model with mixture noise, with the transmit
    time drawn uniformly per pulse.
    """
    if duration < 2.0:
        raise ValueError("duration must be at least 2 seconds")
    gen = as_generator(rng)
    Ts = scene.sample_period
    T = int(round(duration * scene.imu_rate))
    times = np.arange(T) * Ts
    w = 2.0 * np.pi / loop_period
    ax, ay, az = amplitude
    center = np.asarray(center, dtype=float)

    def accel_nav(tt):
        return np.array(
            [
                -ax * w**2 * np.sin(w * tt),
                -ay * (2 * w) ** 2 * np.sin(2 * w * tt),
                -az * w**2 * np.sin(w * tt),
            ]
        )

    # Ground truth follows the discrete-time dynamics driven by the analytic
    # accelerations, so noise-free IMU readings reproduce it exactly.
    states = np.empty((T, 10))
    p = center + np.array([0.0, 0.0, 0.0])
    v = np.array([ax * w, ay * 2 * w, az * w])
    q = np.array([1.0, 0.0, 0.0, 0.0])
    omega_body = np.array([0.0, 0.0, yaw_rate])
    step_rot = quaternion_exp(omega_body, Ts / 2.0)
    accel_clean = np.empty((T - 1, 3))
    for t in range(T):
        states[t] = np.concatenate([p, v, q])
        if t == T - 1:
            break
        a_nav = accel_nav(times[t])
        R = quaternion_to_rotation_matrix(q)
        accel_clean[t] = R.T @ (a_nav - GRAVITY)
        p = p + Ts * v + 0.5 * Ts**2 * a_nav + noise.sigma_pos * gen.standard_normal(3)
        v = v + Ts * a_nav
        q = quaternion_product(q, step_rot)

    accel = accel_clean + noise.accel_bias + noise.sigma_a * gen.standard_normal((T - 1, 3))
    gyro = (
        np.tile(omega_body, (T - 1, 1))
        + noise.gyro_bias
        + noise.sigma_omega * gen.standard_normal((T - 1, 3))
    )

    observations: List[Optional[np.ndarray]] = [None] * T
    pulse_times = {}
    for t in range(1, T + 1, scene.uwb_every):
        tau = gen.uniform(0.0, 100e-9)
        ranges = np.linalg.norm(scene.receivers - states[t - 1, 0:3], axis=1)
        arrivals = tau + ranges / scene.c + err.sample(gen, scene.n_receivers)
        observations[t - 1] = arrivals
        pulse_times[t] = tau
    return WalkData(Trajectory(states), accel, gyro, observations, pulse_times)


def default_scene() -> UwbScene:
    """Ten receivers around an 8 x 6 x 3 m room."""
    receivers = np.array(
        [
            [-4.0, -3.0, 0.5],
            [4.0, -3.0, 0.7],
            [4.0, 3.0, 0.6],
            [-4.0, 3.0, 0.8],
            [-4.0, 0.0, 2.5],
            [4.0, 0.0, 2.6],
            [0.0, -3.0, 2.4],
            [0.0, 3.0, 2.7],
            [-2.0, -1.5, 0.2],
            [2.0, 1.5, 2.9],
        ]
    )
    return UwbScene(receivers=receivers)


def rollout_initial_trajectory(
    scene: UwbScene, accel: np.ndarray, gyro: np.ndarray, noise: IndoorNoise,
    prior: InitialStatePrior, horizon: int,
) -> Trajectory:
    """Deterministic zero-noise rollout of the prior mean through the IMU
    stream; the default chain initialization."""
    Ts = scene.sample_period
    states = np.empty((horizon, 10))
    p = np.asarray(prior.mean_position, dtype=float).copy()
    v = np.asarray(prior.mean_velocity, dtype=float).copy()
    q = np.asarray(prior.mean_quaternion, dtype=float).copy()
    for t in range(horizon):
        states[t] = np.concatenate([p, v, q])
        if t == horizon - 1:
            break
        R = quaternion_to_rotation_matrix(q)
        a_nav = R @ (accel[t] - noise.accel_bias) + GRAVITY
        p = p + Ts * v + 0.5 * Ts**2 * a_nav
        v = v + Ts * a_nav
        q = quaternion_product(q, quaternion_exp(gyro[t] - noise.gyro_bias, Ts / 2.0))
    return Trajectory(states)
