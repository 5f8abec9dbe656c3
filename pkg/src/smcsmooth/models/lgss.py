"""Scalar linear-Gaussian benchmark model.

x_{t+1} = 0.2 x_t + u_t + w_t,  w_t ~ N(0, 0.3)
y_t     = x_t + e_t,            e_t ~ N(0, 1)

with E[x_1] = 0, E[x_1^2] = 0.1 and T = 80.  The exogenous input u_t is
low-pass filtered white noise, generated by the first-order recursion
u_{t+1} = 0.9 u_t + 0.1 eps_t with u_1 = 0 from the supplied seed.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from ..oracles import LinearGaussianModel
from ..rng import RandomSource, as_generator
from ..ssm import StateSpaceModel

A = 0.2
Q = 0.3
R = 1.0
M1 = 0.0
P1 = 0.1
DEFAULT_T = 80

_LOG_2PI = np.log(2.0 * np.pi)


def _norm_logpdf(x, mean, var):
    return -0.5 * (_LOG_2PI + np.log(var)) - 0.5 * (x - mean) ** 2 / var


def lowpass_input(horizon: int, rng) -> np.ndarray:
    gen = as_generator(rng)
    u = np.zeros(horizon)
    for t in range(1, horizon):
        u[t] = 0.9 * u[t - 1] + 0.1 * gen.standard_normal()
    return u


def lgss_model(
    rng: RandomSource, horizon: int = DEFAULT_T
) -> Tuple[StateSpaceModel, LinearGaussianModel]:
    """Simulate one data set and return both encodings of the same model.

    The generic state-space view feeds the particle algorithms; the
    linear-Gaussian view feeds the Kalman/RTS oracle.  Both evaluate
    identical densities on the same simulated observations.
    """
    gen = as_generator(rng)
    u = lowpass_input(horizon, gen)
    x = np.zeros(horizon)
    x[0] = M1 + np.sqrt(P1) * gen.standard_normal()
    for t in range(1, horizon):
        x[t] = A * x[t - 1] + u[t - 1] + np.sqrt(Q) * gen.standard_normal()
    y = x + gen.standard_normal(horizon)

    def initial_logpdf(x1):
        return _norm_logpdf(x1[:, 0], M1, P1)

    def initial_sample(gen, n):
        return (M1 + np.sqrt(P1) * gen.standard_normal(n))[:, None]

    def transition_logpdf(t, x_t, x_next):
        return _norm_logpdf(x_next[:, 0], A * x_t[:, 0] + u[t - 1], Q)

    def transition_sample(t, x_t, gen):
        n = x_t.shape[0]
        return (A * x_t[:, 0] + u[t - 1] + np.sqrt(Q) * gen.standard_normal(n))[:, None]

    def observation_logpdf(t, x_t, y_t):
        return _norm_logpdf(y_t, x_t[:, 0], R)

    ssm = StateSpaceModel(
        state_dim=1,
        horizon=horizon,
        observations=list(y),
        initial_logpdf=initial_logpdf,
        initial_sample=initial_sample,
        transition_logpdf=transition_logpdf,
        transition_sample=transition_sample,
        observation_logpdf=observation_logpdf,
        inputs=u,
    )
    lgm = LinearGaussianModel(
        A=A, Q=Q, C=1.0, R=R, m1=M1, P1=P1, observations=y, B=1.0, inputs=u
    )
    return ssm, lgm
