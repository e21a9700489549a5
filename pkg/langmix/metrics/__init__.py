"""Wasserstein-2 estimators and auxiliary inequality checks."""

from .inequalities import (
    GaussianMomentCheck,
    MaximalMomentCheck,
    MultinomialCheck,
    chi_moment,
    gaussian_norm_moment,
    maximal_moment_check,
    multinomial_inequality_check,
)
from .measures import EmpiricalMeasure, GaussianLaw
from .wasserstein import (
    psd_sqrt,
    w2_assignment,
    w2_empirical_1d,
    w2_gaussian,
    w2_to_gaussian_1d,
    w2_to_gaussian_diagonal,
)

__all__ = [
    "EmpiricalMeasure",
    "GaussianLaw",
    "w2_empirical_1d",
    "w2_to_gaussian_1d",
    "w2_to_gaussian_diagonal",
    "w2_gaussian",
    "w2_assignment",
    "psd_sqrt",
    "chi_moment",
    "gaussian_norm_moment",
    "GaussianMomentCheck",
    "multinomial_inequality_check",
    "MultinomialCheck",
    "maximal_moment_check",
    "MaximalMomentCheck",
]
