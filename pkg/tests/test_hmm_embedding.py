import numpy as np

from smcsmooth import DiscreteHMM, RandomSource, hmm_forward_backward, mcmc_smoother
from smcsmooth.models.hmm_embed import embed_hmm, occupancy
from smcsmooth.ssm import Trajectory


def _hmm(seed=0, T=8, S=3):
    gen = RandomSource(seed).generator()
    return DiscreteHMM(
        initial=gen.dirichlet(np.ones(S)),
        transition=gen.dirichlet(np.ones(S), size=S),
        emission_loglik=gen.standard_normal((T, S)),
    )


def test_embedded_densities_match_tables():
    hmm = _hmm()
    ssm = embed_hmm(hmm)
    x = np.array([[0.0], [1.0], [2.0]])
    np.testing.assert_allclose(ssm.initial_logpdf(x), np.log(hmm.initial))
    x2 = np.array([[2.0], [0.0], [1.0]])
    np.testing.assert_allclose(
        ssm.transition_logpdf(1, x, x2),
        np.log(hmm.transition[[0, 1, 2], [2, 0, 1]]),
    )
    np.testing.assert_allclose(ssm.observation_logpdf(3, x, None), hmm.emission_loglik[2])


def test_embedded_transition_sampler_matches_matrix():
    hmm = _hmm(seed=1)
    ssm = embed_hmm(hmm)
    gen = RandomSource(2).generator()
    x = np.zeros((200_000, 1))
    draws = ssm.transition_sample(1, x, gen)
    freq = np.bincount(draws[:, 0].astype(int), minlength=3) / draws.shape[0]
    np.testing.assert_allclose(freq, hmm.transition[0], atol=0.005)


def test_occupancy_counts_states():
    trajectories = np.array([[[0.0], [1.0]], [[0.0], [2.0]]])
    occ = occupancy(trajectories, 3)
    np.testing.assert_allclose(occ, [[1.0, 0.0, 0.0], [0.0, 0.5, 0.5]])


def test_chain_marginals_approach_forward_backward():
    hmm = _hmm(seed=3, T=6)
    ssm = embed_hmm(hmm)
    exact = hmm_forward_backward(hmm)
    chain = mcmc_smoother(
        ssm, 5, 4000, Trajectory(np.zeros((6, 1))), RandomSource(4)
    )
    occ = occupancy(chain.trajectories[200:], 3)
    tv = 0.5 * np.abs(occ - exact).sum(axis=1)
    assert tv.max() < 0.05
