"""Wind forecast-error Markov chain."""

from .chain import (
    DEFAULT_BINS,
    PRNG_ALGORITHM,
    diagonal_dominance,
    estimate_dtmc,
    identity_dtmc,
    interpolate,
    joint_successors,
    make_rng,
    map_error,
    sample_joint_trajectory,
    sample_trajectory,
    successors,
)
from .synth import Profiles, ar1_path, synthetic_error_series, synthetic_profiles

__all__ = [
    "DEFAULT_BINS",
    "PRNG_ALGORITHM",
    "Profiles",
    "ar1_path",
    "diagonal_dominance",
    "estimate_dtmc",
    "identity_dtmc",
    "interpolate",
    "joint_successors",
    "make_rng",
    "map_error",
    "sample_joint_trajectory",
    "sample_trajectory",
    "successors",
    "synthetic_error_series",
    "synthetic_profiles",
]
