"""Embed a small discrete HMM as a real-valued state-space model.

State s is represented by the float value s (0-based), so particle
algorithms run unchanged while the exact forward-backward oracle stays
available for comparison.
"""

from __future__ import annotations

import numpy as np

from ..oracles import DiscreteHMM
from ..ssm import StateSpaceModel


def embed_hmm(hmm: DiscreteHMM) -> StateSpaceModel:
    S = hmm.n_states
    with np.errstate(divide="ignore"):
        log_init = np.log(hmm.initial)
        log_trans = np.log(hmm.transition)

    def to_idx(x):
        return np.rint(x[:, 0]).astype(int)

    def initial_logpdf(x1):
        return log_init[to_idx(x1)]

    def initial_sample(gen, n):
        draws = gen.choice(S, size=n, p=hmm.initial)
        return draws.astype(float)[:, None]

    def transition_logpdf(t, x_t, x_next):
        return log_trans[to_idx(x_t), to_idx(x_next)]

    def transition_sample(t, x_t, gen):
        rows = hmm.transition[to_idx(x_t)]
        u = gen.random(x_t.shape[0])
        draws = (np.cumsum(rows, axis=1) < u[:, None]).sum(axis=1)
        return draws.astype(float)[:, None]

    def observation_logpdf(t, x_t, y_t):
        return hmm.emission_loglik[t - 1, to_idx(x_t)]

    return StateSpaceModel(
        state_dim=1,
        horizon=hmm.horizon,
        observations=list(range(hmm.horizon)),  # emissions are baked into the table
        initial_logpdf=initial_logpdf,
        initial_sample=initial_sample,
        transition_logpdf=transition_logpdf,
        transition_sample=transition_sample,
        observation_logpdf=observation_logpdf,
    )


def occupancy(trajectories: np.ndarray, n_states: int) -> np.ndarray:
    """Per-t empirical state frequencies of (K, T, 1) chain trajectories."""
    idx = np.rint(trajectories[:, :, 0]).astype(int)
    T = idx.shape[1]
    out = np.zeros((T, n_states))
    for s in range(n_states):
        out[:, s] = (idx == s).mean(axis=0)
    return out
