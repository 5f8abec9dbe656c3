"""Sequential Monte Carlo smoothing: particle filter, CPF-AS MCMC smoother,
FFBSi baseline, exact Kalman/RTS and discrete forward-backward oracles, and
the experiment harness around them."""

__version__ = "0.1.0"

from .rng import RandomSource
from .ssm import (
    DegenerateWeightsError,
    ModelDensityError,
    ParticleSystem,
    StateSpaceModel,
    Trajectory,
    log_weight_initial,
    log_weight_step,
    normalize_weights,
)
from .filtering import FilterResult, measure_path_degeneracy, particle_filter, resample_multinomial
from .smoothing import (
    SmoothingChain,
    SmoothingEstimate,
    backward_simulate,
    chain_update_rate,
    cpfas_step,
    estimate,
    ffbsi,
    mcmc_smoother,
)
from .oracles import (
    DiscreteHMM,
    GaussianBelief,
    LinearGaussianModel,
    hmm_forward_backward,
    kalman_filter,
    rts_joint_sample,
    rts_smoother,
)

__all__ = [
    "RandomSource",
    "StateSpaceModel",
    "Trajectory",
    "ParticleSystem",
    "DegenerateWeightsError",
    "ModelDensityError",
    "log_weight_initial",
    "log_weight_step",
    "normalize_weights",
    "FilterResult",
    "particle_filter",
    "resample_multinomial",
    "measure_path_degeneracy",
    "SmoothingChain",
    "SmoothingEstimate",
    "cpfas_step",
    "mcmc_smoother",
    "ffbsi",
    "backward_simulate",
    "estimate",
    "chain_update_rate",
    "LinearGaussianModel",
    "GaussianBelief",
    "kalman_filter",
    "rts_smoother",
    "rts_joint_sample",
    "DiscreteHMM",
    "hmm_forward_backward",
]
