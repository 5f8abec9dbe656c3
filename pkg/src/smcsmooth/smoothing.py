"""Trajectory-space smoothers: the conditional particle filter with ancestor
sampling, the MCMC smoother built from it, and the forward filtering -
backward simulation baseline, plus chain summaries.

The MCMC chain is inherently sequential in the iteration index; the
backward-simulation draws in `ffbsi` are mutually independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .filtering import _resample_indices, particle_filter
from .rng import RandomSource, as_generator
from .ssm import (
    DegenerateWeightsError,
    ParticleSystem,
    StateSpaceModel,
    Trajectory,
    log_weight_initial_batch,
    log_weight_step_batch,
    normalize_weights,
)


@dataclass
class SmoothingChain:
    """Ordered Markov-chain trajectories with mixing diagnostics.

    trajectories       (K, T, n_x) array, chain order
    burn_in            default prefix to discard (user-overridable downstream)
    update_rate        per-t fraction of consecutive iterations that changed x_t
    seed               RandomSource the chain was generated from
    ancestor_fallbacks times the pinned particle's ancestor draw degenerated
    """

    trajectories: np.ndarray
    burn_in: int
    update_rate: np.ndarray
    seed: Optional[RandomSource] = None
    ancestor_fallbacks: int = 0

    @property
    def length(self) -> int:
        return self.trajectories.shape[0]

    @property
    def horizon(self) -> int:
        return self.trajectories.shape[1]

    def trajectory(self, k: int) -> Trajectory:
        """Chain element k (1-based)."""
        return Trajectory(self.trajectories[k - 1])


@dataclass
class SmoothingEstimate:
    """Ergodic-average summary of a chain after burn-in.

    means/variances are (T, n_x); intervals is (T, n_x, 2) empirical
    quantiles at the configured credibility level.
    """

    means: np.ndarray
    variances: np.ndarray
    intervals: np.ndarray
    level: float


@dataclass
class _CpfasOutput:
    trajectory: Trajectory
    system: ParticleSystem
    ancestor_fallbacks: int
    ancestor_logprobs: List[np.ndarray] = field(default_factory=list)


def _cpfas(
    model: StateSpaceModel,
    n_particles: int,
    conditional: np.ndarray,
    gen: np.random.Generator,
    record_ancestor_probs: bool = False,
) -> _CpfasOutput:
    """One sweep of the conditional particle filter with ancestor sampling.

    Particle N is pinned to the conditional trajectory at every time step;
    its ancestor is redrawn with probability proportional to the previous
    weights times the transition density into the pinned state.  Returns the
    trajectory selected from the final weights along with the full system.
    """
    T, N, nx = model.horizon, n_particles, model.state_dim
    cond = np.asarray(conditional, dtype=float).reshape(T, nx)

    particles = np.empty((T, N, nx))
    log_weights = np.empty((T, N))
    ancestors = np.empty((T, N), dtype=np.intp)
    ancestors[0] = np.arange(1, N + 1)
    fallbacks = 0
    ancestor_logprobs: List[np.ndarray] = []

    x = np.empty((N, nx))
    x[: N - 1] = np.asarray(model.sample_initial(gen, N - 1), dtype=float).reshape(N - 1, nx)
    x[N - 1] = cond[0]
    logw = log_weight_initial_batch(model, x)
    particles[0], log_weights[0] = x, logw

    for t in range(2, T + 1):
        probs = normalize_weights(logw)
        anc = np.empty(N, dtype=np.intp)
        anc[: N - 1] = _resample_indices(probs, N - 1, gen)

        x = np.empty((N, nx))
        x_free_prev = particles[t - 2][anc[: N - 1]]
        x[: N - 1] = np.asarray(
            model.sample_step(t, x_free_prev, gen), dtype=float
        ).reshape(N - 1, nx)
        x[N - 1] = cond[t - 1]

        # Ancestor sampling for the pinned particle: P(a = j) prop. to
        # w_{t-1}^j * f(x_t^N | x_{t-1}^j).
        pinned = np.broadcast_to(cond[t - 1], (N, nx))
        log_as = logw + model.transition_logpdf(t - 1, particles[t - 2], pinned)
        if np.max(log_as) == -np.inf:
            # Degenerate: keep the conditional path's own history.
            anc[N - 1] = N - 1
            fallbacks += 1
            if record_ancestor_probs:
                ancestor_logprobs.append(np.full(N, -np.inf))
        else:
            as_probs = normalize_weights(log_as)
            anc[N - 1] = _resample_indices(as_probs, 1, gen)[0]
            if record_ancestor_probs:
                ancestor_logprobs.append(as_probs)

        x_prev = particles[t - 2][anc]
        logw = log_weight_step_batch(model, t, x_prev, x)
        particles[t - 1], log_weights[t - 1] = x, logw
        ancestors[t - 1] = anc + 1

    system = ParticleSystem(particles, log_weights, ancestors)
    j = _resample_indices(normalize_weights(logw), 1, gen)[0]
    return _CpfasOutput(system.path(j + 1), system, fallbacks, ancestor_logprobs)


def cpfas_step(
    model: StateSpaceModel, n_particles: int, conditional: Trajectory, rng
) -> Trajectory:
    """Map one trajectory to another with the CPF-AS Markov kernel.

    Requires n_particles >= 2: the kernel's ergodicity holds for any number
    of particles above one.
    """
    if n_particles < 2:
        raise ValueError("cpfas_step requires n_particles >= 2")
    if conditional.horizon != model.horizon:
        raise ValueError("conditional trajectory length must equal the model horizon")
    gen = as_generator(rng)
    return _cpfas(model, n_particles, conditional.states, gen).trajectory


def mcmc_smoother(
    model: StateSpaceModel,
    n_particles: int,
    n_iterations: int,
    init: Trajectory,
    rng,
    thin: int = 1,
    on_iteration: Optional[Callable[[int, ParticleSystem], None]] = None,
) -> SmoothingChain:
    """Iterate the CPF-AS kernel from `init` for `n_iterations` steps.

    Keeps every `thin`-th trajectory.  `on_iteration(k, system)` is invoked
    with each sweep's full particle system, e.g. to accumulate particle
    densities.
    """
    if n_particles < 2:
        raise ValueError("mcmc_smoother requires n_particles >= 2")
    if n_iterations < 1:
        raise ValueError("n_iterations must be >= 1")
    if init.horizon != model.horizon:
        raise ValueError("initial trajectory length must equal the model horizon")
    gen = as_generator(rng)
    kept = []
    fallbacks = 0
    current = init.states
    changed = np.zeros(model.horizon)
    for k in range(1, n_iterations + 1):
        out = _cpfas(model, n_particles, current, gen)
        fallbacks += out.ancestor_fallbacks
        nxt = out.trajectory.states
        changed += np.any(nxt != current, axis=1)
        current = nxt
        if k % thin == 0:
            kept.append(current)
        if on_iteration is not None:
            on_iteration(k, out.system)
    trajectories = np.asarray(kept)
    source = rng if isinstance(rng, RandomSource) else None
    return SmoothingChain(
        trajectories=trajectories,
        burn_in=len(kept) // 10,
        update_rate=changed / n_iterations,
        seed=source,
        ancestor_fallbacks=fallbacks,
    )


def default_initial_trajectory(model: StateSpaceModel, mean_initial: np.ndarray) -> Trajectory:
    """Constant trajectory repeating `mean_initial`, for chain initialization.

    A crude but always-valid starting point; models with informative
    dynamics (e.g. the inertial positioning model) provide their own rollout
    helpers instead.
    """
    states = np.tile(np.asarray(mean_initial, dtype=float), (model.horizon, 1))
    return Trajectory(states)


def ffbsi(model: StateSpaceModel, n_particles: int, n_draws: int, rng) -> List[Trajectory]:
    """Forward filtering - backward simulation.

    Runs a particle filter with N particles, then draws M trajectories
    backward, choosing index i at time t with probability proportional to
    w_t^i * f(x_{t+1} | x_t^i).  Cost is O(NM) per time step.
    """
    if n_particles < 1 or n_draws < 1:
        raise ValueError("n_particles and n_draws must be >= 1")
    gen = as_generator(rng)
    result = particle_filter(model, n_particles, gen)
    return backward_simulate(model, result.system, n_draws, gen)


def backward_simulate(
    model: StateSpaceModel, system: ParticleSystem, n_draws: int, rng
) -> List[Trajectory]:
    """Backward-simulation pass over an existing forward particle system."""
    gen = as_generator(rng)
    T, N, nx = system.horizon, system.n_particles, system.particles.shape[2]
    M = n_draws
    states = np.empty((M, T, nx))
    final_probs = normalize_weights(system.log_weights[T - 1])
    idx = _resample_indices(final_probs, M, gen)
    states[:, T - 1] = system.particles[T - 1][idx]
    for t in range(T - 1, 0, -1):
        logw = system.log_weights[t - 1]
        x_t = system.particles[t - 1]
        for m in range(M):
            log_bw = logw + model.transition_logpdf(
                t, x_t, np.broadcast_to(states[m, t], (N, nx))
            )
            top = np.max(log_bw)
            if top == -np.inf:
                raise DegenerateWeightsError(f"degenerate backward weights at t={t}")
            probs = np.exp(log_bw - top)
            probs /= probs.sum()
            states[m, t - 1] = x_t[_resample_indices(probs, 1, gen)[0]]
    return [Trajectory(states[m]) for m in range(M)]


def estimate(chain: SmoothingChain, burn_in: int, level: float = 0.99) -> SmoothingEstimate:
    """Ergodic averages and credibility intervals over the retained chain."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if burn_in >= chain.length:
        raise ValueError("burn_in must be smaller than the chain length")
    retained = chain.trajectories[burn_in:]
    if retained.shape[0] < 10:
        raise ValueError(
            f"only {retained.shape[0]} retained samples; need at least 10 for quantiles"
        )
    lo = (1.0 - level) / 2
    means = retained.mean(axis=0)
    variances = retained.var(axis=0)
    lower = np.quantile(retained, lo, axis=0)
    upper = np.quantile(retained, 1.0 - lo, axis=0)
    return SmoothingEstimate(means, variances, np.stack([lower, upper], axis=-1), level)


def chain_update_rate(chain: SmoothingChain) -> np.ndarray:
    """Per-t fraction of consecutive stored trajectories that changed."""
    if chain.length < 2:
        raise ValueError("need at least two chain elements")
    diff = np.any(chain.trajectories[1:] != chain.trajectories[:-1], axis=2)
    return diff.mean(axis=0)
