"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test states its tolerance inline; timing assertions use wall-clock
bounds from the criteria.  Tests are self-contained and runnable in any
order.
"""

import time
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import ks_2samp

from smcsmooth import (
    RandomSource,
    cpfas_step,
    ffbsi,
    mcmc_smoother,
    particle_filter,
    rts_joint_sample,
    rts_smoother,
)
from smcsmooth.experiments import ExperimentConfig, run
from smcsmooth.models.hmm_embed import embed_hmm, occupancy
from smcsmooth.models.lgss import lgss_model
from smcsmooth.models.quaternion import (
    quaternion_exp,
    quaternion_product,
    quaternion_to_rotation_matrix,
)
from smcsmooth.models.uwb import UwbErrorModel
from smcsmooth.experiments import make_benchmark_hmm
from smcsmooth.oracles import hmm_forward_backward
from smcsmooth.smoothing import default_initial_trajectory, estimate
from smcsmooth.ssm import Trajectory


def _read_csv(path: Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1)


# -- 1 ----------------------------------------------------------------------


def test_smoother_matches_rts_oracle_on_scalar_benchmark(tmp_path):
    """MCMC smoother at N=5, K=5000, burn-in 500 reproduces the exact
    smoother on the scalar benchmark: per-t means within 0.15, mean absolute
    deviation below 0.05, standard deviations within 20%; runtime < 60 s."""
    config = ExperimentConfig(
        "lgss", n_particles=5, n_iterations=5000, burn_in=500, seed=0,
        out_dir=str(tmp_path),
    )
    start = time.perf_counter()
    run(config)
    elapsed = time.perf_counter() - start

    est = _read_csv(tmp_path / "estimate.csv")  # t, mean, variance, lower, upper
    oracle = _read_csv(tmp_path / "oracle.csv")  # t, mean, variance
    dev = np.abs(est[:, 1] - oracle[:, 1])
    assert dev.max() < 0.15
    assert dev.mean() < 0.05
    sd_ratio = np.sqrt(est[:, 2]) / np.sqrt(oracle[:, 2])
    assert np.all(np.abs(sd_ratio - 1.0) < 0.20)
    assert elapsed < 60.0


# -- 2 ----------------------------------------------------------------------


def test_cpfas_kernel_preserves_exact_posterior(tmp_path):
    """2000 exact posterior draws passed once through the CPF-AS kernel
    (N=5) remain distributed as 2000 fresh exact draws: per-t two-sample KS
    at alpha=0.001 Bonferroni-corrected over t, at most one failing t;
    runtime < 2 min."""
    start = time.perf_counter()
    ssm, lgm = lgss_model(RandomSource(0))
    T = ssm.horizon
    n = 2000
    gen_a = RandomSource(1).generator()
    gen_b = RandomSource(2).generator()
    through_kernel = np.empty((n, T))
    fresh = np.empty((n, T))
    for i in range(n):
        draw = rts_joint_sample(lgm, gen_a)
        through_kernel[i] = cpfas_step(ssm, 5, draw, gen_a).states[:, 0]
        fresh[i] = rts_joint_sample(lgm, gen_b).states[:, 0]
    alpha = 0.001 / T
    failures = sum(
        ks_2samp(through_kernel[:, t], fresh[:, t]).pvalue < alpha for t in range(T)
    )
    elapsed = time.perf_counter() - start
    assert failures <= 1
    assert elapsed < 120.0


# -- 3 ----------------------------------------------------------------------


def _hmm_tv_curve(seed: int, k_total: int):
    hmm = make_benchmark_hmm(3, 10, RandomSource(seed, 0))
    ssm = embed_hmm(hmm)
    exact = hmm_forward_backward(hmm)
    chain = mcmc_smoother(
        ssm, 5, k_total, Trajectory(np.zeros((10, 1))), RandomSource(seed, 1)
    )

    def max_tv(k):
        burn = k // 20
        occ = occupancy(chain.trajectories[burn:k], 3)
        return float((0.5 * np.abs(occ - exact).sum(axis=1)).max())

    return max_tv(500), max_tv(k_total)


def test_hmm_marginals_match_forward_backward(tmp_path):
    """S=3, T=10, N=5, K=20000 chain marginals within 0.05 total variation
    of exact forward-backward; runtime of the required run < 2 min."""
    config = ExperimentConfig(
        "hmm-oracle", n_particles=5, n_iterations=20_000, burn_in=1000, seed=0,
        out_dir=str(tmp_path),
    )
    start = time.perf_counter()
    manifest = run(config)
    elapsed = time.perf_counter() - start
    assert manifest["diagnostics"]["max_tv"] <= 0.05
    assert elapsed < 120.0


def test_hmm_tv_shrinks_with_chain_length():
    """Max-over-t TV at K=20000 is strictly below TV at K=500, as the
    median over 5 seeds."""
    short, long = zip(*(_hmm_tv_curve(seed, 20_000) for seed in range(5)))
    assert np.median(long) < np.median(short)


# -- 4 ----------------------------------------------------------------------


def test_ffbsi_agrees_with_oracle_and_mcmc_smoother():
    """FFBSi at N=M=500: per-t means within 0.15 of the exact smoother and
    within 0.2 of the MCMC smoother's means; runtime < 2 min."""
    start = time.perf_counter()
    ssm, lgm = lgss_model(RandomSource(0))
    oracle = rts_smoother(lgm)
    draws = ffbsi(ssm, 500, 500, RandomSource(1))
    ffbsi_means = np.mean([d.states[:, 0] for d in draws], axis=0)
    assert np.abs(ffbsi_means - oracle.means[:, 0]).max() < 0.15

    init = default_initial_trajectory(ssm, np.zeros(1))
    chain = mcmc_smoother(ssm, 5, 3000, init, RandomSource(2))
    mcmc_means = estimate(chain, burn_in=300).means[:, 0]
    elapsed = time.perf_counter() - start
    assert np.abs(ffbsi_means - mcmc_means).max() < 0.2
    assert elapsed < 120.0


# -- 5 ----------------------------------------------------------------------


def _median_time(fn, repeats=5):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def test_mcmc_cost_is_linear_in_iterations():
    """Doubling K at fixed N scales MCMC wall time by a factor in
    [1.5, 2.6] (median of 5 repeats)."""
    ssm, _ = lgss_model(RandomSource(0))
    init = default_initial_trajectory(ssm, np.zeros(1))

    def run_k(k):
        mcmc_smoother(ssm, 20, k, init, RandomSource(1))

    ratio = _median_time(lambda: run_k(300)) / _median_time(lambda: run_k(150))
    assert 1.5 <= ratio <= 2.6


def test_ffbsi_cost_scales_with_particle_draw_product():
    """Quadrupling the N*M budget scales FFBSi wall time by a factor in
    [3.0, 5.5] (median of 5 repeats).  The budget is grown through the draw
    count so the backward pass, the N*M term, dominates the measurement."""
    ssm, _ = lgss_model(RandomSource(0))
    small = _median_time(lambda: ffbsi(ssm, 500, 100, RandomSource(1)))
    large = _median_time(lambda: ffbsi(ssm, 500, 400, RandomSource(1)))
    assert 3.0 <= large / small <= 5.5


# -- 6 ----------------------------------------------------------------------


def test_every_step_resampling_collapses_ancestries():
    """Multinomial resampling at every step on the scalar benchmark
    (T=40, N=100): at most 5 distinct time-1 ancestors among the final
    survivors in at least 99 of 100 seeds."""
    collapsed = 0
    for seed in range(100):
        ssm, _ = lgss_model(RandomSource(seed), horizon=40)
        result = particle_filter(ssm, 100, RandomSource(seed, 1))
        if result.unique_ancestry[0] <= 5:
            collapsed += 1
    assert collapsed >= 99


# -- 7 ----------------------------------------------------------------------


def test_smoother_explores_modes_the_filter_misses(tmp_path):
    """Matched 50000-particle budget on the two-ridge surface: the MCMC
    smoother's mean path is closer to the left (smoothing-correct) ridge on
    t in [30, 60] than the filter's, and puts strictly more particle mass
    within 2 sigma of that ridge than FFBSi; runtime < 5 min."""
    config = ExperimentConfig(
        "landscape", n_particles=50, n_iterations=1020, burn_in=100,
        n_draws=100, seed=0, out_dir=str(tmp_path),
    )
    start = time.perf_counter()
    manifest = run(config)
    elapsed = time.perf_counter() - start
    diag = manifest["diagnostics"]
    dist = diag["mean_distance_to_left_ridge"]
    assert dist["mcmc"] < dist["filter"]
    mass = diag["mass_within_2sigma_of_left_ridge"]
    assert mass["mcmc"] > mass["ffbsi"]
    assert elapsed < 300.0


# -- 8 ----------------------------------------------------------------------


def test_arrival_error_density_normalizes():
    """The asymmetric mixture density integrates to 1 within 1e-6 for
    alpha in {0.1, 0.5, 1.0, 1.5, 1.9}."""
    for alpha in (0.1, 0.5, 1.0, 1.5, 1.9):
        err = UwbErrorModel(alpha=alpha, sigma=1.0, gamma=1.0)
        left, _ = quad(lambda e: np.exp(err.logpdf(e)), -30.0, 0.0)
        right, _ = quad(lambda e: np.exp(err.logpdf(e)), 0.0, np.inf)
        assert left + right == pytest.approx(1.0, abs=1e-6)


# -- 9 ----------------------------------------------------------------------


def test_quaternion_norm_survives_long_integration():
    """Unit norm preserved within 1e-9 over 10^4 dynamics steps; constant
    rotation rate matches the closed-form axis-angle solution to 1e-6."""
    gen = RandomSource(0).generator()
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for _ in range(10_000):
        q = quaternion_product(q, quaternion_exp(gen.normal(0.0, 0.01, 3), 0.5))
        assert abs(np.linalg.norm(q) - 1.0) < 1e-9

    rate = np.array([0.4, -0.2, 0.1])
    dt = 1.0 / 120.0
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for _ in range(1200):
        q = quaternion_product(q, quaternion_exp(rate, dt / 2.0))
    expected = quaternion_exp(rate * 1200 * dt, 0.5)
    np.testing.assert_allclose(
        quaternion_to_rotation_matrix(q), quaternion_to_rotation_matrix(expected),
        atol=1e-6,
    )


# -- 10 ---------------------------------------------------------------------


def test_indoor_positioning_recovers_synthetic_walk(tmp_path):
    """20 s synthetic walk, N=100, K=200: posterior mean position RMSE
    below 0.3 m and truth inside the 99% interval for at least 90% of
    steps; runtime < 10 min."""
    config = ExperimentConfig(
        "indoor", n_particles=100, n_iterations=200, burn_in=20, seed=0,
        out_dir=str(tmp_path),
    )
    start = time.perf_counter()
    manifest = run(config)
    elapsed = time.perf_counter() - start
    diag = manifest["diagnostics"]
    assert elapsed < 600.0
    assert diag["position_rmse_m"] < 0.3
    assert diag["interval_coverage"] >= 0.90


# -- 11 ---------------------------------------------------------------------


_SMALL_CONFIGS = [
    dict(experiment="lgss", n_particles=5, n_iterations=40, burn_in=5),
    dict(
        experiment="landscape", n_particles=10, n_iterations=30, burn_in=5,
        n_draws=20, model_overrides={"filter_particles": 100, "ffbsi_particles": 100},
    ),
    dict(experiment="hmm-oracle", n_particles=5, n_iterations=200, burn_in=20),
    dict(
        experiment="indoor", n_particles=20, n_iterations=25, burn_in=5,
        model_overrides={"duration_s": 2.0},
    ),
]


@pytest.mark.parametrize("kwargs", _SMALL_CONFIGS, ids=lambda c: c["experiment"])
def test_identical_configs_produce_identical_outputs(tmp_path, kwargs):
    """Rerunning any experiment with an identical configuration reproduces
    every CSV byte for byte."""
    dirs = (tmp_path / "a", tmp_path / "b")
    for out_dir in dirs:
        run(ExperimentConfig(**dict(kwargs, seed=7, out_dir=str(out_dir))))
    first = sorted(dirs[0].rglob("*.csv"))
    assert first, "experiment produced no CSV output"
    for path in first:
        twin = dirs[1] / path.relative_to(dirs[0])
        assert path.read_bytes() == twin.read_bytes(), f"{path.name} differs"
