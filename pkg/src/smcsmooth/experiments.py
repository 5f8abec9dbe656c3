"""Experiment harness: reproducible runs of each benchmark with
machine-readable CSV/JSON outputs.

Every run takes an ExperimentConfig, writes its outputs under the configured
directory, and finishes with a manifest recording the exact configuration,
per-phase wall-clock timings, and diagnostic counters.  All CSV numbers are
formatted with %.17g so a rerun with the same configuration is byte-identical.
"""

from __future__ import annotations

import dataclasses
import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from scipy.stats import norm

from . import __version__
from .filtering import particle_filter
from .models.hmm_embed import embed_hmm, occupancy
from .models.indoor import (
    IndoorNoise,
    InitialStatePrior,
    default_scene,
    generate_uwb_walk,
    imu_uwb_model,
    rollout_initial_trajectory,
)
from .models.landscape import LandscapeSpec, landscape_model, ridge_centers, write_grid_file
from .models.lgss import lgss_model
from .models.quaternion import quaternion_normalize, quaternion_to_euler
from .models.uwb import UwbErrorModel
from .oracles import DiscreteHMM, hmm_forward_backward, rts_smoother
from .rng import RandomSource
from .smoothing import (
    chain_update_rate,
    default_initial_trajectory,
    estimate,
    ffbsi,
    mcmc_smoother,
)
from .ssm import Trajectory

EXPERIMENTS = ("lgss", "landscape", "indoor", "hmm-oracle")


@dataclass
class ExperimentConfig:
    """Run parameters shared by every experiment.

    model_overrides carries experiment-specific knobs (e.g. duration_s for
    the indoor run or n_states for the HMM oracle); unknown keys are
    rejected by the experiment that receives them.
    """

    experiment: str
    n_particles: int = 100
    n_iterations: int = 200
    n_draws: int = 100
    burn_in: int = 20
    seed: int = 0
    threads: int = 1
    out_dir: str = "results"
    model_overrides: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.n_particles < 2:
            raise ConfigError("n_particles must be >= 2 for the MCMC smoother")
        if self.n_iterations < 1:
            raise ConfigError("n_iterations must be >= 1")
        if self.n_draws < 1:
            raise ConfigError("n_draws must be >= 1")
        if not 0 <= self.burn_in < self.n_iterations:
            raise ConfigError("burn_in must lie in [0, n_iterations)")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def load_config(path, **cli_overrides) -> ExperimentConfig:
    """Read a JSON config file and apply command-line overrides on top."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    raw.update({k: v for k, v in cli_overrides.items() if v is not None})
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def apply_override(config: ExperimentConfig, key: str, value: str) -> ExperimentConfig:
    """Apply one `key=value` override; dotted keys go to model_overrides."""
    if key.startswith("model_overrides."):
        overrides = dict(config.model_overrides)
        overrides[key.split(".", 1)[1]] = json.loads(value)
        return dataclasses.replace(config, model_overrides=overrides)
    known = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    if key not in known:
        raise ConfigError(f"unknown override key {key!r}")
    if key == "model_overrides":
        return dataclasses.replace(config, model_overrides=json.loads(value))
    caster = str if key in ("experiment", "out_dir") else json.loads
    return dataclasses.replace(config, **{key: caster(value)})


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


def write_csv(path: Path, header: List[str], rows) -> None:
    """Deterministic CSV writer: fixed header, %.17g for every number."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


class _Phases:
    """Wall-clock accounting for manifest timings."""

    def __init__(self):
        self.durations: Dict[str, float] = {}
        self._start = time.perf_counter()

    def done(self, name: str) -> None:
        now = time.perf_counter()
        self.durations[name] = round(now - self._start, 3)
        self._start = now


def _write_manifest(config: ExperimentConfig, out: Path, phases: _Phases, extra: dict) -> dict:
    manifest = {
        "config": dataclasses.asdict(config),
        "library_version": __version__,
        "timings_s": phases.durations,
        **extra,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _summary(values: np.ndarray) -> dict:
    return {
        "min": float(np.min(values)),
        "median": float(np.median(values)),
        "max": float(np.max(values)),
    }


def _out_dir(config: ExperimentConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Scalar linear-Gaussian benchmark


def run_lgss(config: ExperimentConfig) -> dict:
    """MCMC smoother vs. the exact RTS oracle on the scalar benchmark.

    Writes chain.csv (one row per iteration), estimate.csv, oracle.csv,
    error_vs_k.csv (ergodic-mean error as the chain grows), and lineage.csv
    (a small particle-filter ancestry snapshot for degeneracy plots).
    """
    out = _out_dir(config)
    phases = _Phases()
    horizon = int(config.model_overrides.get("horizon", 80))
    ssm, lgm = lgss_model(RandomSource(config.seed, 0), horizon=horizon)
    phases.done("simulate")

    init = default_initial_trajectory(ssm, np.zeros(1))
    chain = mcmc_smoother(
        ssm, config.n_particles, config.n_iterations, init, RandomSource(config.seed, 1)
    )
    phases.done("mcmc")

    smoothed = rts_smoother(lgm)
    phases.done("oracle")

    est = estimate(chain, burn_in=config.burn_in)
    write_csv(
        out / "chain.csv",
        ["iteration"] + [f"x_t{t}" for t in range(1, horizon + 1)],
        ([k + 1] + list(chain.trajectories[k, :, 0]) for k in range(chain.length)),
    )
    write_csv(
        out / "estimate.csv",
        ["t", "mean", "variance", "lower", "upper"],
        (
            [t + 1, est.means[t, 0], est.variances[t, 0], est.intervals[t, 0, 0], est.intervals[t, 0, 1]]
            for t in range(horizon)
        ),
    )
    write_csv(
        out / "oracle.csv",
        ["t", "mean", "variance"],
        ([t + 1, smoothed.means[t, 0], smoothed.covariances[t, 0, 0]] for t in range(horizon)),
    )

    # Ergodic-mean error against the oracle as a function of chain length.
    ks, max_errs, mean_errs = [], [], []
    running = np.cumsum(chain.trajectories[:, :, 0], axis=0)
    k = max(config.burn_in + 1, 1)
    while k <= chain.length:
        mean_k = (running[k - 1] - (running[config.burn_in - 1] if config.burn_in else 0.0)) / (
            k - config.burn_in
        )
        err = np.abs(mean_k - smoothed.means[:, 0])
        ks.append(k)
        max_errs.append(err.max())
        mean_errs.append(err.mean())
        k *= 2
    write_csv(
        out / "error_vs_k.csv",
        ["k", "max_abs_error", "mean_abs_error"],
        zip(ks, max_errs, mean_errs),
    )

    lineage_n = int(config.model_overrides.get("lineage_particles", 30))
    fr = particle_filter(ssm, lineage_n, RandomSource(config.seed, 2))
    rows = []
    for t in range(horizon):
        probs = np.exp(fr.system.log_weights[t] - np.max(fr.system.log_weights[t]))
        probs /= probs.sum()
        for i in range(lineage_n):
            rows.append(
                [t + 1, i + 1, int(fr.system.ancestors[t, i]), fr.system.particles[t, i, 0], probs[i]]
            )
    write_csv(out / "lineage.csv", ["t", "particle", "ancestor", "x", "weight"], rows)
    phases.done("write")

    dev = np.abs(est.means[:, 0] - smoothed.means[:, 0])
    return _write_manifest(
        config,
        out,
        phases,
        {
            "diagnostics": {
                "ancestor_fallbacks": chain.ancestor_fallbacks,
                "update_rate": _summary(chain_update_rate(chain)),
                "abs_mean_deviation_vs_oracle": _summary(dev),
            }
        },
    )


# ---------------------------------------------------------------------------
# Multimodal landscape benchmark


def _density_rows(states: np.ndarray, weights: np.ndarray, edges: np.ndarray):
    """Per-t weighted histogram rows (t, bin center, density); each t sums to 1."""
    T = states.shape[0]
    centers = (edges[:-1] + edges[1:]) / 2.0
    for t in range(T):
        hist, _ = np.histogram(states[t], bins=edges, weights=weights[t])
        total = hist.sum()
        if total > 0:
            hist = hist / total
        for j, center in enumerate(centers):
            yield [t + 1, center, hist[j]]


def run_landscape(config: ExperimentConfig) -> dict:
    """Particle filter vs. FFBSi vs. MCMC smoother on the two-ridge surface.

    The default configuration matches a 50 000-sampled-particles budget on
    each side: the filter runs N=500 over T=100, FFBSi draws M=100 paths
    from an N=500 filter, and the MCMC smoother runs N=50 for K=1020 sweeps
    ((N-1)K = 49 980 fresh draws per time step pool).
    """
    out = _out_dir(config)
    phases = _Phases()
    spec = LandscapeSpec(
        sigma=float(config.model_overrides.get("sigma", LandscapeSpec.sigma)),
    )
    ssm, surface = landscape_model(spec)
    write_grid_file(surface, out / "landscape_grid.txt")
    T = spec.horizon
    edges = np.linspace(spec.x_min, spec.x_max, 121)
    phases.done("build")

    filter_n = int(config.model_overrides.get("filter_particles", 500))
    fr = particle_filter(ssm, filter_n, RandomSource(config.seed, 0))
    filter_weights = np.exp(
        fr.system.log_weights - fr.system.log_weights.max(axis=1, keepdims=True)
    )
    filter_weights /= filter_weights.sum(axis=1, keepdims=True)
    write_csv(
        out / "estimate_filter.csv",
        ["t", "mean"],
        ([t + 1, fr.filtered_means[t, 0]] for t in range(T)),
    )
    write_csv(
        out / "density_filter.csv",
        ["t", "x", "density"],
        _density_rows(fr.system.particles[:, :, 0], filter_weights, edges),
    )
    phases.done("filter")

    ffbsi_n = int(config.model_overrides.get("ffbsi_particles", 500))
    draws = ffbsi(ssm, ffbsi_n, config.n_draws, RandomSource(config.seed, 1))
    ffbsi_states = np.stack([d.states[:, 0] for d in draws], axis=1)  # (T, M)
    ffbsi_weights = np.full_like(ffbsi_states, 1.0 / ffbsi_states.shape[1])
    write_csv(
        out / "estimate_ffbsi.csv",
        ["t", "mean", "lower", "upper"],
        (
            [
                t + 1,
                ffbsi_states[t].mean(),
                np.quantile(ffbsi_states[t], 0.005),
                np.quantile(ffbsi_states[t], 0.995),
            ]
            for t in range(T)
        ),
    )
    write_csv(
        out / "density_ffbsi.csv",
        ["t", "x", "density"],
        _density_rows(ffbsi_states, ffbsi_weights, edges),
    )
    phases.done("ffbsi")

    init = default_initial_trajectory(ssm, np.zeros(1))
    chain = mcmc_smoother(
        ssm, config.n_particles, config.n_iterations, init, RandomSource(config.seed, 2)
    )
    est = estimate(chain, burn_in=config.burn_in)
    retained = chain.trajectories[config.burn_in :, :, 0].T  # (T, K - burn)
    mcmc_weights = np.full_like(retained, 1.0 / retained.shape[1])
    write_csv(
        out / "estimate_mcmc.csv",
        ["t", "mean", "lower", "upper"],
        (
            [t + 1, est.means[t, 0], est.intervals[t, 0, 0], est.intervals[t, 0, 1]]
            for t in range(T)
        ),
    )
    write_csv(
        out / "density_mcmc.csv",
        ["t", "x", "density"],
        _density_rows(retained, mcmc_weights, edges),
    )
    phases.done("mcmc")

    left, _ = ridge_centers(spec, np.arange(1, T + 1))
    window = slice(29, 60)  # t in [30, 60]
    filter_dist = float(np.mean(np.abs(fr.filtered_means[window, 0] - left[window])))
    mcmc_dist = float(np.mean(np.abs(est.means[window, 0] - left[window])))
    band = 2.0 * spec.ridge_width

    def mass_near_left(states, weights):
        close = np.abs(states - left[:, None]) <= band
        return float(np.mean(np.sum(weights * close, axis=1)))

    diagnostics = {
        "ancestor_fallbacks": chain.ancestor_fallbacks,
        "update_rate": _summary(chain_update_rate(chain)),
        "mean_distance_to_left_ridge": {"filter": filter_dist, "mcmc": mcmc_dist},
        "mass_within_2sigma_of_left_ridge": {
            "ffbsi": mass_near_left(ffbsi_states, ffbsi_weights),
            "mcmc": mass_near_left(retained, mcmc_weights),
        },
        "sampled_particles": {
            "filter": filter_n,
            "ffbsi_forward": ffbsi_n,
            "mcmc_fresh_per_step": (config.n_particles - 1) * config.n_iterations,
        },
    }
    phases.done("write")
    return _write_manifest(config, out, phases, {"diagnostics": diagnostics})


# ---------------------------------------------------------------------------
# Synthetic indoor positioning


_STATE_NAMES = ["p_x", "p_y", "p_z", "v_x", "v_y", "v_z", "q_w", "q_x", "q_y", "q_z"]


def run_indoor(config: ExperimentConfig) -> dict:
    """Smooth a synthetic UWB/IMU walk and report calibrated position bands.

    Writes the full synthetic dataset bundle under dataset/ and estimate.csv
    with per-state means and 99% credibility intervals plus roll/pitch/yaw
    derived from the mean orientation.  Intervals are Gaussian (mean +/-
    z * sd) because extreme empirical quantiles are unstable at the default
    chain length; see README.
    """
    out = _out_dir(config)
    phases = _Phases()
    overrides = dict(config.model_overrides)
    duration = float(overrides.pop("duration_s", 20.0))
    level = float(overrides.pop("level", 0.99))
    err = UwbErrorModel(
        alpha=float(overrides.pop("alpha", UwbErrorModel.alpha)),
        sigma=float(overrides.pop("uwb_sigma", UwbErrorModel.sigma)),
        gamma=float(overrides.pop("uwb_gamma", UwbErrorModel.gamma)),
    )
    noise = IndoorNoise(
        sigma_a=float(overrides.pop("sigma_a", IndoorNoise.sigma_a)),
        sigma_omega=float(overrides.pop("sigma_omega", IndoorNoise.sigma_omega)),
        sigma_pos=float(overrides.pop("sigma_pos", IndoorNoise.sigma_pos)),
    )
    if overrides:
        raise ConfigError(f"unknown indoor model overrides: {sorted(overrides)}")
    if config.n_particles >= 500 and config.n_iterations >= 1000:
        warnings.warn(
            "full-scale configuration (N >= 500, K >= 1000): expect a runtime "
            "of many hours at this horizon",
            stacklevel=2,
        )

    scene = default_scene()
    walk = generate_uwb_walk(scene, duration, RandomSource(config.seed, 0), err=err, noise=noise)
    truth = walk.truth.states
    prior = InitialStatePrior(truth[0, 0:3], truth[0, 3:6], truth[0, 6:10])
    model = imu_uwb_model(scene, walk.accel, walk.gyro, err, noise, walk.observations, prior)
    _write_dataset(out / "dataset", scene, walk, err, noise, config.seed)
    phases.done("generate")

    init = rollout_initial_trajectory(scene, walk.accel, walk.gyro, noise, prior, model.horizon)
    chain = mcmc_smoother(
        model, config.n_particles, config.n_iterations, init, RandomSource(config.seed, 1)
    )
    phases.done("mcmc")

    retained = chain.trajectories[config.burn_in :]
    means = retained.mean(axis=0)
    sds = retained.std(axis=0)
    z = norm.ppf(0.5 + level / 2.0)
    lower = means - z * sds
    upper = means + z * sds
    mean_q = quaternion_normalize(means[:, 6:10])
    rpy = quaternion_to_euler(mean_q)

    header = ["t"]
    for name in _STATE_NAMES:
        header += [f"mean_{name}", f"lower_{name}", f"upper_{name}"]
    header += ["roll", "pitch", "yaw"]

    def rows():
        for t in range(model.horizon):
            row = [t + 1]
            for d in range(10):
                value = mean_q[t, d - 6] if d >= 6 else means[t, d]
                row += [value, lower[t, d], upper[t, d]]
            row += list(rpy[t])
            yield row

    write_csv(out / "estimate.csv", header, rows())
    phases.done("write")

    pos_err = means[:, 0:3] - truth[:, 0:3]
    rmse = float(np.sqrt(np.mean(np.sum(pos_err**2, axis=1))))
    inside = np.all(
        (truth[:, 0:3] >= lower[:, 0:3]) & (truth[:, 0:3] <= upper[:, 0:3]), axis=1
    )
    diagnostics = {
        "ancestor_fallbacks": chain.ancestor_fallbacks,
        "update_rate": _summary(chain_update_rate(chain)),
        "position_rmse_m": rmse,
        "interval_coverage": float(inside.mean()),
        "interval_level": level,
    }
    return _write_manifest(config, out, phases, {"diagnostics": diagnostics})


def _write_dataset(dataset_dir: Path, scene, walk, err, noise, seed: int) -> None:
    dataset_dir.mkdir(parents=True, exist_ok=True)
    T = walk.truth.horizon
    write_csv(
        dataset_dir / "truth.csv",
        ["t"] + _STATE_NAMES,
        ([t + 1] + list(walk.truth.states[t]) for t in range(T)),
    )
    write_csv(
        dataset_dir / "imu.csv",
        ["t", "accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z"],
        ([t + 1] + list(walk.accel[t]) + list(walk.gyro[t]) for t in range(T - 1)),
    )
    uwb_rows = []
    for t in range(T):
        if walk.observations[t] is None:
            continue
        for m, arrival in enumerate(walk.observations[t]):
            uwb_rows.append([t + 1, m + 1, arrival])
    write_csv(dataset_dir / "uwb.csv", ["t", "receiver", "arrival_s"], uwb_rows)
    descriptor = {
        "receivers": scene.receivers.tolist(),
        "speed_of_light": scene.c,
        "imu_rate_hz": scene.imu_rate,
        "uwb_every": scene.uwb_every,
        "error_model": {"alpha": err.alpha, "sigma_s": err.sigma, "gamma_s": err.gamma},
        "noise": {
            "sigma_a": noise.sigma_a,
            "sigma_omega": noise.sigma_omega,
            "sigma_pos": noise.sigma_pos,
            "accel_bias": list(noise.accel_bias),
            "gyro_bias": list(noise.gyro_bias),
        },
        "seed": seed,
    }
    with open(dataset_dir / "scene.json", "w") as fh:
        json.dump(descriptor, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Discrete-HMM oracle comparison


def make_benchmark_hmm(n_states: int, horizon: int, rng: RandomSource) -> DiscreteHMM:
    """Random well-conditioned HMM: Dirichlet rows, informative emissions."""
    gen = rng.generator()
    initial = gen.dirichlet(np.full(n_states, 2.0))
    transition = gen.dirichlet(np.full(n_states, 2.0), size=n_states)
    emission = np.log(gen.dirichlet(np.full(n_states, 1.0), size=horizon) + 1e-3)
    return DiscreteHMM(initial=initial, transition=transition, emission_loglik=emission)


def run_hmm_oracle(config: ExperimentConfig) -> dict:
    """MCMC smoother marginals vs. exact forward-backward, in total variation.

    Writes oracle.csv and estimate.csv (per-t state probabilities) and
    tv_vs_k.csv (max-over-t TV distance as the chain grows).
    """
    out = _out_dir(config)
    phases = _Phases()
    n_states = int(config.model_overrides.get("n_states", 3))
    horizon = int(config.model_overrides.get("horizon", 10))
    hmm = make_benchmark_hmm(n_states, horizon, RandomSource(config.seed, 0))
    ssm = embed_hmm(hmm)
    exact = hmm_forward_backward(hmm)
    phases.done("build")

    init = Trajectory(np.zeros((horizon, 1)))
    chain = mcmc_smoother(
        ssm, config.n_particles, config.n_iterations, init, RandomSource(config.seed, 1)
    )
    phases.done("mcmc")

    ks, tvs = [], []
    k = max(config.burn_in + 10, 10)
    while True:
        occ = occupancy(chain.trajectories[config.burn_in : k], n_states)
        tv = 0.5 * np.abs(occ - exact).sum(axis=1)
        ks.append(k)
        tvs.append(tv.max())
        if k == chain.length:
            break
        k = min(2 * k, chain.length)
    occ = occupancy(chain.trajectories[config.burn_in :], n_states)
    write_csv(
        out / "oracle.csv",
        ["t", "state", "probability"],
        ([t + 1, s, exact[t, s]] for t in range(horizon) for s in range(n_states)),
    )
    write_csv(
        out / "estimate.csv",
        ["t", "state", "probability"],
        ([t + 1, s, occ[t, s]] for t in range(horizon) for s in range(n_states)),
    )
    write_csv(out / "tv_vs_k.csv", ["k", "max_tv"], zip(ks, tvs))
    phases.done("write")

    diagnostics = {
        "ancestor_fallbacks": chain.ancestor_fallbacks,
        "update_rate": _summary(chain_update_rate(chain)),
        "max_tv": float(tvs[-1]),
    }
    return _write_manifest(config, out, phases, {"diagnostics": diagnostics})


RUNNERS = {
    "lgss": run_lgss,
    "landscape": run_landscape,
    "indoor": run_indoor,
    "hmm-oracle": run_hmm_oracle,
}


def run(config: ExperimentConfig) -> dict:
    """Dispatch a config to its experiment runner; returns the manifest."""
    return RUNNERS[config.experiment](config)
