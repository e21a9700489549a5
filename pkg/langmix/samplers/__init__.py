"""ULA and SGLD samplers, synchronous coupling and the Gaussian closed forms."""

from .blocks import BlockDiagnostics, run_auxiliary_blocks
from .chains import (
    ContractionStats,
    CoupledStats,
    InitialLaw,
    MomentRun,
    RunInfo,
    StationaryEstimate,
    TraceSummary,
    moment_name,
    run_contraction,
    run_coupled,
    run_sgld,
    run_ula,
)
from .checks import (
    BoundCheck,
    coupled_envelope_check,
    drift_check,
    geometric_convergence_check,
    iid_second_moment_check,
    sup_bound_check,
    ula_second_moment_bound,
    ula_second_moment_check,
)
from .config import SamplerConfig, guard_step, oracle_base
from .stationary import stationary_ula_gaussian, target_law, ula_law_at
from .steps import sgld_step, ula_step

__all__ = [
    "SamplerConfig",
    "guard_step",
    "oracle_base",
    "ula_step",
    "sgld_step",
    "run_coupled",
    "run_sgld",
    "run_ula",
    "run_contraction",
    "run_auxiliary_blocks",
    "CoupledStats",
    "MomentRun",
    "ContractionStats",
    "BlockDiagnostics",
    "InitialLaw",
    "RunInfo",
    "StationaryEstimate",
    "TraceSummary",
    "moment_name",
    "stationary_ula_gaussian",
    "target_law",
    "ula_law_at",
    "BoundCheck",
    "drift_check",
    "sup_bound_check",
    "coupled_envelope_check",
    "ula_second_moment_bound",
    "ula_second_moment_check",
    "iid_second_moment_check",
    "geometric_convergence_check",
]
