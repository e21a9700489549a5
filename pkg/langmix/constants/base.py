"""
Convexity constants and log-space arithmetic for large constants.

Constants layer is responsible for this module.
"""

import math
from typing import Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp

from langmix.errors import DomainError, StepSizeError

# Largest natural log representable as a finite float64.
LOG_FLOAT_MAX = math.log(np.finfo(float).max)


class ScaledValue(BaseModel):
    """A positive constant stored with its logarithm so it survives float overflow."""

    model_config = ConfigDict(frozen=True)

    value: Optional[float] = Field(None, description="Natural value; None when it overflows")
    log_value: float = Field(..., description="Natural logarithm")
    log10_value: float = Field(..., description="Base-10 logarithm")
    overflow: bool = False

    @classmethod
    def from_log(cls, log_value: float) -> "ScaledValue":
        if math.isnan(log_value):
            raise DomainError("constant evaluated to NaN")
        overflow = log_value > LOG_FLOAT_MAX
        value = None if overflow else (0.0 if log_value == -math.inf else math.exp(log_value))
        return cls(
            value=value,
            log_value=log_value,
            log10_value=log_value / math.log(10.0),
            overflow=overflow,
        )

    @classmethod
    def from_value(cls, value: float) -> "ScaledValue":
        if value < 0:
            raise DomainError(f"scaled values must be nonnegative, got {value}")
        return cls.from_log(safe_log(value))

    def root(self, order: float) -> float:
        """value^{1/order}, computed from the logarithm."""
        return math.exp(self.log_value / order)

    def require(self) -> float:
        """The natural value, or a DomainError when it overflowed."""
        if self.value is None:
            raise DomainError(
                f"constant overflows float64 (log10 = {self.log10_value:.1f})",
                detail={"log10_value": self.log10_value},
            )
        return self.value


def safe_log(x: float) -> float:
    """log(x) with log(0) = -inf and no warning."""
    if x < 0:
        raise DomainError(f"log of a negative number: {x}")
    return math.log(x) if x > 0 else -math.inf


def log_sum(terms: Iterable[float]) -> float:
    """log(sum exp(t)) over log-terms, tolerating -inf entries."""
    arr = np.asarray(list(terms), dtype=float)
    if arr.size == 0 or np.all(arr == -np.inf):
        return -math.inf
    return float(logsumexp(arr))


def tilde_a(a: float, L1: float) -> float:
    """a L1 / (a + L1)."""
    return a * L1 / (a + L1)


class ConvexityConstants(BaseModel):
    """Strong monotonicity and smoothness constants of an oracle."""

    model_config = ConfigDict(frozen=True)

    a: float
    L1: float
    L2: float
    H_star: float = 0.0
    d: int
    lambda_bar: float = Field(..., description="2 / (a + L1)")
    a_tilde: float = Field(..., description="a L1 / (a + L1)")

    def rho_lambda(self, lam: float) -> float:
        """Contraction factor 1 - a_tilde * lambda, in (0, 1) for 0 < lambda < lambda_bar."""
        return 1.0 - self.a_tilde * lam

    def check_step(self, lam: float) -> None:
        if not 0.0 < lam < self.lambda_bar:
            raise StepSizeError(
                f"step size {lam} must satisfy 0 < lambda < lambda_bar = 2/(a+L1) = "
                f"{self.lambda_bar:.6g}",
                detail={"lambda": lam, "lambda_bar": self.lambda_bar},
            )


def compute_base(
    a: float, L1: float, L2: float, d: int, H_star: float = 0.0
) -> ConvexityConstants:
    """
    lambda_bar = 2/(a+L1) and a_tilde = a L1/(a+L1).

    L2 = 0 is accepted (the chains then coincide); a and L1 must be positive.
    """
    if a <= 0 or L1 <= 0:
        raise DomainError(f"a and L1 must be positive, got a={a}, L1={L1}")
    if L2 < 0 or H_star < 0:
        raise DomainError(f"L2 and H_star must be nonnegative, got L2={L2}, H_star={H_star}")
    if d < 1:
        raise DomainError(f"dimension must be positive, got d={d}")
    return ConvexityConstants(
        a=a,
        L1=L1,
        L2=L2,
        H_star=H_star,
        d=int(d),
        lambda_bar=2.0 / (a + L1),
        a_tilde=tilde_a(a, L1),
    )
