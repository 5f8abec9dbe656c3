import numpy as np
import pytest

from smcsmooth import (
    DegenerateWeightsError,
    ModelDensityError,
    ParticleSystem,
    RandomSource,
    StateSpaceModel,
    Trajectory,
    log_weight_initial,
    log_weight_step,
    normalize_weights,
)
from smcsmooth.ssm import log_weight_step_batch


def _toy_model(horizon=4, observations=None, **kwargs):
    if observations is None:
        observations = [0.5] * horizon
    return StateSpaceModel(
        state_dim=1,
        horizon=horizon,
        observations=observations,
        initial_logpdf=lambda x: -0.5 * x[:, 0] ** 2,
        initial_sample=lambda gen, n: gen.standard_normal((n, 1)),
        transition_logpdf=lambda t, x, x2: -0.5 * (x2[:, 0] - x[:, 0]) ** 2,
        transition_sample=lambda t, x, gen: x + gen.standard_normal(x.shape),
        observation_logpdf=lambda t, x, y: -0.5 * (y - x[:, 0]) ** 2,
        **kwargs,
    )


def test_model_validation():
    with pytest.raises(ValueError):
        _toy_model(observations=[0.0] * 3)  # wrong observation count
    with pytest.raises(ValueError):
        _toy_model(proposal_sample=lambda t, x, y, gen: x)  # sampler without density


def test_bootstrap_step_weight_is_observation_density():
    model = _toy_model()
    x_prev, x = np.array([[0.2]]), np.array([[0.4]])
    assert log_weight_step(model, 2, x_prev, x) == pytest.approx(-0.5 * (0.5 - 0.4) ** 2)


def test_missing_observation_gives_zero_weight():
    model = _toy_model(observations=[0.5, None, 0.5, 0.5])
    assert log_weight_step(model, 2, np.array([[0.2]]), np.array([[0.4]])) == 0.0


def test_initial_weight_includes_observation():
    model = _toy_model()
    assert log_weight_initial(model, np.array([[0.1]])) == pytest.approx(-0.5 * 0.4**2)


def test_proposal_correction_cancels_for_bootstrap_proposal():
    bootstrap = _toy_model()
    explicit = _toy_model(
        proposal_logpdf=lambda t, xp, x, y: -0.5 * (x[:, 0] - xp[:, 0]) ** 2,
        proposal_sample=lambda t, xp, y, gen: xp + gen.standard_normal(xp.shape),
    )
    x_prev, x = np.array([[0.3]]), np.array([[-0.2]])
    assert log_weight_step(explicit, 2, x_prev, x) == pytest.approx(
        log_weight_step(bootstrap, 2, x_prev, x)
    )


def test_bootstrap_when_unobserved_skips_correction():
    marker = {"called": False}

    def proposal_logpdf(t, xp, x, y):
        marker["called"] = True
        return np.zeros(x.shape[0])

    model = _toy_model(
        observations=[0.5, None, 0.5, 0.5],
        proposal_logpdf=proposal_logpdf,
        proposal_sample=lambda t, xp, y, gen: xp,
        bootstrap_when_unobserved=True,
    )
    logw = log_weight_step_batch(model, 2, np.array([[0.0]]), np.array([[0.0]]))
    assert logw[0] == 0.0
    assert not marker["called"]


def test_nan_density_raises():
    model = _toy_model(observations=[np.nan] * 4)
    with pytest.raises(ModelDensityError):
        log_weight_step(model, 2, np.array([[0.0]]), np.array([[0.0]]))


def test_normalize_weights():
    probs = normalize_weights(np.array([-1000.0, -1000.0 + np.log(3.0)]))
    np.testing.assert_allclose(probs, [0.25, 0.75], atol=1e-12)
    with pytest.raises(DegenerateWeightsError):
        normalize_weights(np.array([-np.inf, -np.inf]))


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(np.array([[np.inf]]))
    traj = Trajectory(np.arange(3.0))
    assert traj.horizon == 3 and traj.state_dim == 1


def test_particle_system_path_traces_ancestry():
    particles = np.arange(12.0).reshape(3, 2, 2)
    ancestors = np.array([[1, 2], [2, 2], [1, 2]])
    system = ParticleSystem(particles, np.zeros((3, 2)), ancestors)
    path = system.path(1)
    # final particle 1 at t=3 has ancestor 1 at t=2, whose ancestor is 2 at t=1.
    np.testing.assert_array_equal(path.states, [[2.0, 3.0], [4.0, 5.0], [8.0, 9.0]])
