"""Conditional L-mixing quantities and the weighted-sum inequalities."""

from .gamma import (
    MonteCarloEstimate,
    chi_root,
    gamma_linear_analytic,
    gamma_mc_estimate,
    stationary_moment_root,
)
from .maximal import (
    InequalityReport,
    maximal_constant,
    maximal_inequality_check,
    moment_constant,
    moment_inequality_check,
)
from .profile import MixingProfile, Provenance, certificate_remainder, profile_build

__all__ = [
    "gamma_linear_analytic",
    "gamma_mc_estimate",
    "MonteCarloEstimate",
    "chi_root",
    "stationary_moment_root",
    "MixingProfile",
    "Provenance",
    "profile_build",
    "certificate_remainder",
    "maximal_inequality_check",
    "moment_inequality_check",
    "maximal_constant",
    "moment_constant",
    "InequalityReport",
]
