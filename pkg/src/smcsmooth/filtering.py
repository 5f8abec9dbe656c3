"""Multinomial resampling, the particle filter, and path-degeneracy
measurement.

The filter resamples at every time step with multinomial draws; effective
sample size is reported as a diagnostic only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import as_generator
from .ssm import (
    ParticleSystem,
    StateSpaceModel,
    log_weight_initial_batch,
    log_weight_step_batch,
    normalize_weights,
)


@dataclass
class FilterResult:
    """Output of one particle-filter run.

    filtered_means are self-normalized estimates of E[x_t | y_{1:t}];
    unique_ancestry[t-1] counts distinct time-t ancestors among the paths
    surviving to the final time (non-increasing backward in t).
    """

    system: ParticleSystem
    filtered_means: np.ndarray
    log_likelihood: float
    unique_ancestry: np.ndarray
    ess: np.ndarray


def resample_multinomial(probabilities, count: int, rng) -> np.ndarray:
    """Draw `count` i.i.d. categorical indices (1-based) from `probabilities`."""
    return _resample_indices(_checked_probabilities(probabilities), count, as_generator(rng)) + 1


def _checked_probabilities(probabilities) -> np.ndarray:
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def _resample_indices(p: np.ndarray, count: int, gen: np.random.Generator) -> np.ndarray:
    """Internal 0-based multinomial resampling via inverse-CDF lookup."""
    if count < 1:
        raise ValueError("count must be >= 1")
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, gen.random(count), side="right").astype(np.intp)


def particle_filter(model: StateSpaceModel, n_particles: int, rng) -> FilterResult:
    """Bootstrap-capable particle filter over the model horizon.

    Samples from the initial proposal, then alternates resampling,
    propagation through the proposal, and reweighting.  Weights are kept
    unnormalized; normalization happens at resampling and when extracting
    the filtered means.
    """
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    gen = as_generator(rng)
    T, N, nx = model.horizon, n_particles, model.state_dim

    particles = np.empty((T, N, nx))
    log_weights = np.empty((T, N))
    ancestors = np.empty((T, N), dtype=np.intp)
    ancestors[0] = np.arange(1, N + 1)

    x = np.asarray(model.sample_initial(gen, N), dtype=float).reshape(N, nx)
    logw = log_weight_initial_batch(model, x)
    particles[0], log_weights[0] = x, logw

    log_likelihood = _log_mean_weight(logw)
    for t in range(2, T + 1):
        probs = normalize_weights(logw)
        anc = _resample_indices(probs, N, gen)
        x_prev = particles[t - 2][anc]
        x = np.asarray(model.sample_step(t, x_prev, gen), dtype=float).reshape(N, nx)
        logw = log_weight_step_batch(model, t, x_prev, x)
        particles[t - 1], log_weights[t - 1] = x, logw
        ancestors[t - 1] = anc + 1
        log_likelihood += _log_mean_weight(logw)

    system = ParticleSystem(particles, log_weights, ancestors)
    means = np.empty((T, nx))
    ess = np.empty(T)
    for t in range(T):
        probs = normalize_weights(log_weights[t])
        means[t] = probs @ particles[t]
        ess[t] = 1.0 / np.sum(probs**2)
    return FilterResult(system, means, float(log_likelihood), _unique_ancestry(system), ess)


def measure_path_degeneracy(result: FilterResult) -> np.ndarray:
    """Distinct time-t ancestors of the final-time survivors, for each t."""
    return _unique_ancestry(result.system)


def _unique_ancestry(system: ParticleSystem) -> np.ndarray:
    T, N = system.horizon, system.n_particles
    counts = np.empty(T, dtype=int)
    idx = np.arange(N)
    counts[T - 1] = len(np.unique(idx))
    for t in range(T - 1, 0, -1):
        idx = system.ancestors[t, idx] - 1
        counts[t - 1] = len(np.unique(idx))
    return counts


def _log_mean_weight(logw: np.ndarray) -> float:
    m = np.max(logw)
    if m == -np.inf:
        return -np.inf
    return float(m + np.log(np.mean(np.exp(logw - m))))
