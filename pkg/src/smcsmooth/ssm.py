"""State-space-model abstraction, particle containers, and weight functions.

All densities are handled in the log domain.  Model callables are vectorized
over a batch of particles: state arguments have shape (n, state_dim) and
log-densities come back as shape (n,).  Time indices in the public interface
are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np


class ModelDensityError(RuntimeError):
    """A model density produced NaN, which signals a model bug."""


class DegenerateWeightsError(RuntimeError):
    """Every particle received zero weight (log-weight -inf)."""


# Callable signatures (t is 1-based throughout):
#   initial_logpdf(x)                      (n, nx) -> (n,)
#   initial_sample(gen, n)                 -> (n, nx)
#   transition_logpdf(t, x_t, x_next)      f(x_{t+1} | x_t); t in 1..T-1
#   transition_sample(t, x_t, gen)         -> (n, nx) draw of x_{t+1}
#   observation_logpdf(t, x_t, y_t)        log g(y_t | x_t); t in 1..T
#   proposal_logpdf(t, x_prev, x_t, y_t)   log q(x_t | x_{t-1}, y_t); t in 2..T
#   proposal_sample(t, x_prev, y_t, gen)   -> (n, nx)


@dataclass(frozen=True)
class StateSpaceModel:
    """Density/sampler bundle defining one smoothing problem.

    Observations may contain None entries for time steps without a
    measurement; those steps carry no observation weight.  Exogenous inputs,
    when present, are captured inside the transition callables.  The model
    is immutable and safe to share across threads.
    """

    state_dim: int
    horizon: int
    observations: Sequence[Any]
    initial_logpdf: Callable
    initial_sample: Callable
    transition_logpdf: Callable
    transition_sample: Callable
    observation_logpdf: Callable
    proposal_logpdf: Optional[Callable] = None
    proposal_sample: Optional[Callable] = None
    initial_proposal_logpdf: Optional[Callable] = None
    initial_proposal_sample: Optional[Callable] = None
    inputs: Optional[np.ndarray] = None
    # True asserts q(. | x_prev, None) is the transition density, letting the
    # step-weight computation skip the f/q correction where y_t is None.
    bootstrap_when_unobserved: bool = False

    def __post_init__(self):
        if self.state_dim < 1:
            raise ValueError("state_dim must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if len(self.observations) != self.horizon:
            raise ValueError(
                f"got {len(self.observations)} observations for horizon {self.horizon}"
            )
        if (self.proposal_logpdf is None) != (self.proposal_sample is None):
            raise ValueError("proposal sampler and log-density must be given together")
        if (self.initial_proposal_logpdf is None) != (self.initial_proposal_sample is None):
            raise ValueError("initial proposal sampler and log-density must be given together")

    @property
    def is_bootstrap(self) -> bool:
        """True when the step proposal defaults to the transition density."""
        return self.proposal_sample is None

    def observation(self, t: int):
        """Observation y_t (1-based); None means no measurement at t."""
        return self.observations[t - 1]

    # Proposal accessors fall back to the bootstrap choice q = f, q1 = mu.

    def sample_initial(self, gen: np.random.Generator, n: int) -> np.ndarray:
        if self.initial_proposal_sample is not None:
            return self.initial_proposal_sample(gen, n)
        return self.initial_sample(gen, n)

    def sample_step(self, t: int, x_prev: np.ndarray, gen: np.random.Generator) -> np.ndarray:
        """Draw x_t from q(. | x_{t-1}, y_t) for 2 <= t <= T."""
        if self.proposal_sample is not None:
            return self.proposal_sample(t, x_prev, self.observation(t), gen)
        return self.transition_sample(t - 1, x_prev, gen)


@dataclass(frozen=True)
class Trajectory:
    """One state path x_{1:T}, stored as a (T, state_dim) array."""

    states: np.ndarray

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if states.ndim != 2:
            raise ValueError("trajectory states must be a (T, state_dim) array")
        if not np.all(np.isfinite(states)):
            raise ValueError("trajectory contains non-finite states")
        object.__setattr__(self, "states", states)

    @property
    def horizon(self) -> int:
        return self.states.shape[0]

    @property
    def state_dim(self) -> int:
        return self.states.shape[1]


@dataclass
class ParticleSystem:
    """Per-time-step particles, unnormalized log-weights, ancestor indices.

    particles   (T, N, state_dim)
    log_weights (T, N), unnormalized
    ancestors   (T, N), 1-based indices into 1..N; row t=1 is unused and
                filled with the identity assignment.
    """

    particles: np.ndarray
    log_weights: np.ndarray
    ancestors: np.ndarray

    @property
    def horizon(self) -> int:
        return self.particles.shape[0]

    @property
    def n_particles(self) -> int:
        return self.particles.shape[1]

    def path(self, j: int) -> Trajectory:
        """Trace the ancestral path of final-time particle j (1-based)."""
        T = self.horizon
        states = np.empty((T, self.particles.shape[2]))
        idx = j - 1
        for t in range(T - 1, -1, -1):
            states[t] = self.particles[t, idx]
            if t > 0:
                idx = self.ancestors[t, idx] - 1
        return Trajectory(states)


def _check_no_nan(logp: np.ndarray, what: str) -> np.ndarray:
    logp = np.asarray(logp, dtype=float)
    if np.any(np.isnan(logp)):
        raise ModelDensityError(f"NaN in {what}; -inf is the only legal non-finite value")
    return logp


def _batched(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :]
    return x


def log_weight_initial(model: StateSpaceModel, x1) -> float:
    """Initial weight log W_1 = log g(y_1|x_1) + log mu(x_1) - log q_1(x_1|y_1)."""
    return float(log_weight_initial_batch(model, _batched(x1))[0])


def log_weight_initial_batch(model: StateSpaceModel, x1: np.ndarray) -> np.ndarray:
    y1 = model.observation(1)
    logw = np.zeros(x1.shape[0])
    if y1 is not None:
        logw = logw + _check_no_nan(model.observation_logpdf(1, x1, y1), "observation density")
    if model.initial_proposal_logpdf is not None:
        logw = logw + _check_no_nan(model.initial_logpdf(x1), "initial density")
        logw = logw - _check_no_nan(model.initial_proposal_logpdf(x1), "initial proposal density")
    return logw


def log_weight_step(model: StateSpaceModel, t: int, x_prev, x_t) -> float:
    """Step weight log W = log g(y_t|x_t) + log f(x_t|x_{t-1}) - log q(x_t|x_{t-1},y_t).

    With the bootstrap proposal (q = f) this reduces to the observation
    log-density alone.  Requires 2 <= t <= T.
    """
    if not 2 <= t <= model.horizon:
        raise ValueError(f"t must lie in 2..{model.horizon}, got {t}")
    return float(log_weight_step_batch(model, t, _batched(x_prev), _batched(x_t))[0])


def log_weight_step_batch(
    model: StateSpaceModel, t: int, x_prev: np.ndarray, x_t: np.ndarray
) -> np.ndarray:
    y_t = model.observation(t)
    logw = np.zeros(x_t.shape[0])
    if y_t is not None:
        logw = logw + _check_no_nan(model.observation_logpdf(t, x_t, y_t), "observation density")
    if model.proposal_logpdf is not None and not (y_t is None and model.bootstrap_when_unobserved):
        logw = logw + _check_no_nan(model.transition_logpdf(t - 1, x_prev, x_t), "transition density")
        logw = logw - _check_no_nan(
            model.proposal_logpdf(t, x_prev, x_t, y_t), "proposal density"
        )
    return logw


def normalize_weights(log_weights: np.ndarray) -> np.ndarray:
    """Exponentiate and normalize log-weights with max-log subtraction.

    Raises DegenerateWeightsError when every entry is -inf (total particle
    death).  The result sums to 1 to within 1e-12.
    """
    logw = _check_no_nan(log_weights, "log-weights")
    m = np.max(logw)
    if m == -np.inf:
        raise DegenerateWeightsError("all log-weights are -inf")
    w = np.exp(logw - m)
    return w / np.sum(w)
