"""
Shared report schemas.

Harness layer is responsible for this module.
"""

from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


class ErrorResponse(BaseModel):
    """Error payload printed to stderr and stored in manifests."""

    error: str = Field(..., description="Error type")
    message: str = Field(..., description="Error message")
    detail: Optional[Any] = Field(None, description="Structured detail, when the error has one")
    exit_code: int = Field(..., description="Process exit code")
    timestamp: str = Field(default_factory=utc_now, description="Error timestamp")


class RunStatus(str, Enum):
    INCOMPLETE = "incomplete"
    COMPLETE = "complete"


class CheckResult(BaseModel):
    """One named pass/fail verdict with its margin (positive means slack)."""

    name: str = Field(..., description="Check name")
    passed: bool = Field(..., description="Verdict")
    margin: Optional[float] = Field(None, description="Bound minus observed, when defined")
    detail: Dict[str, Any] = Field(default_factory=dict, description="Numbers behind the verdict")


class CheckSuite(BaseModel):
    """Ordered collection of check results."""

    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def failures(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]
