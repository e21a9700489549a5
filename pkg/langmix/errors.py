"""
Exception hierarchy for langmix.

Every error carries the exit code the CLI reports for it:
0 success, 2 configuration or input error, 3 hypothesis violation,
4 verification failure.
"""

from typing import Any, Optional


class LangmixError(Exception):
    """Base class for all langmix errors."""

    exit_code: int = 2

    def __init__(self, message: str, detail: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


class ConfigError(LangmixError):
    """Invalid, missing or unreadable configuration."""

    exit_code = 2


class DomainError(LangmixError, ValueError):
    """Numerical input outside the domain of an operation."""

    exit_code = 2


class ContractViolationError(LangmixError):
    """Shape or state contract broken by the caller."""

    exit_code = 2


class UnsupportedOperationError(LangmixError):
    """The operation is not available for the supplied inputs."""

    exit_code = 2


class HypothesisViolationError(DomainError):
    """An explicit hypothesis of a bound does not hold."""

    exit_code = 3


class StepSizeError(HypothesisViolationError):
    """Step size outside the admissible range lambda < lambda_bar (or lambda <= lambda_0)."""

    exit_code = 3


class VerificationFailure(LangmixError):
    """At least one verification check failed."""

    exit_code = 4


__all__ = [
    "LangmixError",
    "ConfigError",
    "DomainError",
    "ContractViolationError",
    "UnsupportedOperationError",
    "HypothesisViolationError",
    "StepSizeError",
    "VerificationFailure",
]
