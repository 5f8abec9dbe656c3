from .lgss import lgss_model
from .landscape import LandscapeSpec, LandscapeModel, landscape_model
from .hmm_embed import embed_hmm
from .quaternion import (
    quaternion_product,
    quaternion_exp,
    quaternion_log,
    quaternion_conjugate,
    quaternion_to_rotation_matrix,
)
from .uwb import UwbErrorModel, UwbScene, uwb_loglik, profile_pulse_time
from .indoor import imu_uwb_model, generate_uwb_walk, IndoorNoise

__all__ = [
    "lgss_model",
    "LandscapeSpec",
    "LandscapeModel",
    "landscape_model",
    "embed_hmm",
    "quaternion_product",
    "quaternion_exp",
    "quaternion_log",
    "quaternion_conjugate",
    "quaternion_to_rotation_matrix",
    "UwbErrorModel",
    "UwbScene",
    "uwb_loglik",
    "profile_pulse_time",
    "imu_uwb_model",
    "generate_uwb_walk",
    "IndoorNoise",
]
