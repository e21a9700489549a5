"""Explicit constants and the epsilon -> (lambda, n) planners."""

from .base import ConvexityConstants, ScaledValue, compute_base, log_sum, safe_log, tilde_a
from .bias import BiasConstants, bias_constants, c_bias, c_hat
from .chain import (
    ChainConstants,
    ChainInputs,
    MixingInputs,
    ThetaZeroMoments,
    compute_chain,
    compute_Cunder,
    require_even_p,
)
from .iid import IIDLawMoments, iid_C, iid_c0, iid_cbar, iid_law_moments, lambda0
from .moments import MomentConstants, compute_Cdprime, compute_Cprime
from .planners import (
    DependentPlan,
    DependentPlanInputs,
    DependentStep,
    IIDPlan,
    IIDPlanInputs,
    IIDStepConstants,
    choose_p,
    dependent_step,
    iid_step_constants,
    plan_dependent,
    plan_iid,
)
from .report import ConstantReport, constant_report

__all__ = [
    # Base
    "ConvexityConstants",
    "ScaledValue",
    "compute_base",
    "tilde_a",
    "log_sum",
    "safe_log",
    # Moments
    "MomentConstants",
    "compute_Cprime",
    "compute_Cdprime",
    # Chain
    "ChainConstants",
    "ChainInputs",
    "MixingInputs",
    "ThetaZeroMoments",
    "compute_chain",
    "compute_Cunder",
    "require_even_p",
    # Bias
    "BiasConstants",
    "bias_constants",
    "c_bias",
    "c_hat",
    # Independent data
    "IIDLawMoments",
    "iid_law_moments",
    "lambda0",
    "iid_C",
    "iid_c0",
    "iid_cbar",
    # Planners
    "DependentPlan",
    "DependentPlanInputs",
    "DependentStep",
    "IIDPlan",
    "IIDPlanInputs",
    "IIDStepConstants",
    "choose_p",
    "dependent_step",
    "iid_step_constants",
    "plan_dependent",
    "plan_iid",
    # Report
    "ConstantReport",
    "constant_report",
]
