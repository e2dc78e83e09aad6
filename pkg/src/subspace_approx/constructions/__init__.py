"""Explicit subspaces and constructive approximation procedures."""

from .dirichlet import DirichletResult, dirichlet
from .pipeline import CandidateNotFound, going_up_search, lower_bound_pipeline
from .r4 import construct_r4
from .r5 import construct_r5, r5_obstruction_search
from .spectrum import SpectrumConfig, spectrum_build, spectrum_infinite_variant, spectrum_theta

__all__ = [
    "CandidateNotFound",
    "DirichletResult",
    "SpectrumConfig",
    "construct_r4",
    "construct_r5",
    "dirichlet",
    "going_up_search",
    "lower_bound_pipeline",
    "r5_obstruction_search",
    "spectrum_build",
    "spectrum_infinite_variant",
    "spectrum_theta",
]
