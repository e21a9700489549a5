"""CLI, experiment configuration, orchestration and run persistence."""

from .builders import ExperimentConfig, ExperimentKind, load_config, load_mixing
from .manifest import RunManifest, run_manifest
from .schemas import CheckResult, CheckSuite, ErrorResponse, RunStatus

__all__ = [
    "ExperimentConfig",
    "ExperimentKind",
    "load_config",
    "load_mixing",
    "RunManifest",
    "run_manifest",
    "CheckResult",
    "CheckSuite",
    "ErrorResponse",
    "RunStatus",
]
