"""Exact reference solvers: Kalman/RTS for linear-Gaussian models (with
joint-posterior sampling) and forward-backward smoothing for small discrete
HMMs.  Pure functions of immutable inputs; safe for concurrent use."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .rng import as_generator
from .ssm import Trajectory


@dataclass(frozen=True)
class LinearGaussianModel:
    """x_{t+1} = A x_t + B u_t + w_t,  y_t = C x_t + v_t.

    w_t ~ N(0, Q), v_t ~ N(0, R), x_1 ~ N(m1, P1).  All matrices are 2-D,
    means are 1-D; inputs is (T, n_u) or None; observations is (T, n_y).
    """

    A: np.ndarray
    Q: np.ndarray
    C: np.ndarray
    R: np.ndarray
    m1: np.ndarray
    P1: np.ndarray
    observations: np.ndarray
    B: Optional[np.ndarray] = None
    inputs: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("A", "Q", "C", "R", "m1", "P1", "observations"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        for name in ("A", "Q", "C", "R", "P1"):
            object.__setattr__(self, name, np.atleast_2d(getattr(self, name)))
        obs = self.observations
        if obs.ndim == 1:
            object.__setattr__(self, "observations", obs[:, None])
        if self.B is not None:
            object.__setattr__(self, "B", np.atleast_2d(np.asarray(self.B, dtype=float)))
        if self.inputs is not None:
            u = np.asarray(self.inputs, dtype=float)
            if u.ndim == 1:
                u = u[:, None]
            object.__setattr__(self, "inputs", u)
        for name in ("Q", "R", "P1"):
            mat = getattr(self, name)
            if np.min(np.linalg.eigvalsh((mat + mat.T) / 2)) < -1e-10:
                raise ValueError(f"{name} must be positive semidefinite")

    @property
    def horizon(self) -> int:
        return self.observations.shape[0]

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    def control(self, t: int) -> np.ndarray:
        """B u_t for the transition out of time t (1-based); zero if absent."""
        if self.B is None or self.inputs is None:
            return np.zeros(self.state_dim)
        return self.B @ self.inputs[t - 1]


@dataclass(frozen=True)
class GaussianBelief:
    """Per-time Gaussian marginals: means (T, n_x), covariances (T, n_x, n_x)."""

    means: np.ndarray
    covariances: np.ndarray


def _symmetrize(P: np.ndarray) -> np.ndarray:
    return (P + P.T) / 2


def kalman_filter(model: LinearGaussianModel) -> GaussianBelief:
    """Filtered beliefs p(x_t | y_{1:t}) via the standard predict/update
    recursion with a Joseph-form covariance update."""
    T, nx = model.horizon, model.state_dim
    A, Q, C, R = model.A, model.Q, model.C, model.R
    means = np.empty((T, nx))
    covs = np.empty((T, nx, nx))
    m_pred, P_pred = model.m1.copy(), model.P1.copy()
    I = np.eye(nx)
    for t in range(1, T + 1):
        y = model.observations[t - 1]
        S = C @ P_pred @ C.T + R
        if np.linalg.cond(S) > 1e14:
            raise np.linalg.LinAlgError(f"innovation covariance near-singular at t={t}")
        K = P_pred @ C.T @ np.linalg.inv(S)
        m = m_pred + K @ (y - C @ m_pred)
        P = _symmetrize((I - K @ C) @ P_pred @ (I - K @ C).T + K @ R @ K.T)
        means[t - 1], covs[t - 1] = m, P
        if t < T:
            m_pred = A @ m + model.control(t)
            P_pred = _symmetrize(A @ P @ A.T + Q)
    return GaussianBelief(means, covs)


def rts_smoother(model: LinearGaussianModel) -> GaussianBelief:
    """Smoothed beliefs p(x_t | y_{1:T}) by the backward gain recursion.

    The final-time belief equals the filtered belief exactly.
    """
    filt = kalman_filter(model)
    T, nx = model.horizon, model.state_dim
    A, Q = model.A, model.Q
    means = filt.means.copy()
    covs = filt.covariances.copy()
    for t in range(T - 1, 0, -1):
        m_f, P_f = filt.means[t - 1], filt.covariances[t - 1]
        m_pred = A @ m_f + model.control(t)
        P_pred = _symmetrize(A @ P_f @ A.T + Q)
        if np.linalg.cond(P_pred) > 1e14:
            raise np.linalg.LinAlgError(f"predicted covariance near-singular at t={t}")
        G = P_f @ A.T @ np.linalg.inv(P_pred)
        means[t - 1] = m_f + G @ (means[t] - m_pred)
        covs[t - 1] = _symmetrize(P_f + G @ (covs[t] - P_pred) @ G.T)
    return GaussianBelief(means, covs)


def rts_joint_sample(model: LinearGaussianModel, rng) -> Trajectory:
    """One exact draw from the joint smoothing distribution p(x_{1:T}|y_{1:T}).

    Backward sampling from the filtered beliefs: draw x_T from the filtered
    marginal, then x_t | x_{t+1} from the conditional Gaussian implied by the
    filtered belief and the transition.
    """
    gen = as_generator(rng)
    filt = kalman_filter(model)
    T, nx = model.horizon, model.state_dim
    A, Q = model.A, model.Q
    states = np.empty((T, nx))
    m_T, P_T = filt.means[T - 1], filt.covariances[T - 1]
    states[T - 1] = gen.multivariate_normal(m_T, P_T, method="svd")
    for t in range(T - 1, 0, -1):
        m_f, P_f = filt.means[t - 1], filt.covariances[t - 1]
        m_pred = A @ m_f + model.control(t)
        P_pred = _symmetrize(A @ P_f @ A.T + Q)
        G = P_f @ A.T @ np.linalg.inv(P_pred)
        mean = m_f + G @ (states[t] - m_pred)
        cov = _symmetrize(P_f - G @ P_pred @ G.T)
        states[t - 1] = gen.multivariate_normal(mean, cov, method="svd")
    return Trajectory(states)


@dataclass(frozen=True)
class DiscreteHMM:
    """Finite-state HMM with per-time emission log-likelihoods.

    initial          length-S probability vector
    transition       (S, S) row-stochastic matrix
    emission_loglik  (T, S) log g(y_t | state) table
    """

    initial: np.ndarray
    transition: np.ndarray
    emission_loglik: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "initial", np.asarray(self.initial, dtype=float))
        object.__setattr__(self, "transition", np.asarray(self.transition, dtype=float))
        object.__setattr__(self, "emission_loglik", np.asarray(self.emission_loglik, dtype=float))
        if abs(self.initial.sum() - 1.0) > 1e-12:
            raise ValueError("initial probabilities must sum to 1")
        if np.max(np.abs(self.transition.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("transition rows must sum to 1")

    @property
    def n_states(self) -> int:
        return self.initial.shape[0]

    @property
    def horizon(self) -> int:
        return self.emission_loglik.shape[0]


def hmm_forward_backward(model: DiscreteHMM) -> np.ndarray:
    """Exact smoothing marginals p(x_t = s | y_{1:T}) as a (T, S) matrix.

    Works in the log domain with per-step normalization; each output row
    sums to 1 to within 1e-12.
    """
    T, S = model.horizon, model.n_states
    with np.errstate(divide="ignore"):
        log_init = np.log(model.initial)
        log_trans = np.log(model.transition)
    log_alpha = np.empty((T, S))
    log_alpha[0] = log_init + model.emission_loglik[0]
    if np.max(log_alpha[0]) == -np.inf:
        raise ValueError("zero total likelihood at t=1")
    log_alpha[0] -= _logsumexp(log_alpha[0])
    for t in range(1, T):
        log_alpha[t] = _logsumexp(log_alpha[t - 1][:, None] + log_trans, axis=0)
        log_alpha[t] += model.emission_loglik[t]
        norm = _logsumexp(log_alpha[t])
        if norm == -np.inf:
            raise ValueError(f"zero total likelihood at t={t + 1}")
        log_alpha[t] -= norm
    log_beta = np.zeros((T, S))
    for t in range(T - 2, -1, -1):
        log_beta[t] = _logsumexp(
            log_trans + (model.emission_loglik[t + 1] + log_beta[t + 1])[None, :], axis=1
        )
        log_beta[t] -= np.max(log_beta[t])
    log_post = log_alpha + log_beta
    log_post -= _logsumexp(log_post, axis=1)[:, None]
    return np.exp(log_post)


def _logsumexp(a: np.ndarray, axis=None):
    m = np.max(a, axis=axis, keepdims=axis is not None)
    if axis is None:
        m_scalar = np.max(a)
        if m_scalar == -np.inf:
            return -np.inf
        return m_scalar + np.log(np.sum(np.exp(a - m_scalar)))
    safe = np.where(np.isfinite(m), m, 0.0)
    out = np.squeeze(safe, axis=axis) + np.log(np.sum(np.exp(a - safe), axis=axis))
    return np.where(np.isfinite(np.squeeze(m, axis=axis)), out, -np.inf)
