"""
Linear process specifications X_n = sum_k a_k eps_{n-k}.

Streams layer is responsible for this module.
"""

import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TAIL_TOLERANCE = 1e-12


class InnovationLaw(str, Enum):
    """Innovation distributions; only Gaussian ships."""

    GAUSSIAN = "gaussian"


class DecayCertificate(BaseModel):
    """Certificate |a_k| <= c (1 + k)^(-beta) with beta > 3/2."""

    model_config = ConfigDict(frozen=True)

    c: float = Field(..., gt=0, description="Scale c")
    beta: float = Field(..., gt=1.5, description="Decay exponent beta > 3/2")

    def bound(self, k: np.ndarray) -> np.ndarray:
        return self.c * (1.0 + k) ** (-self.beta)

    def sigma_bound(self, tau: float) -> float:
        """Upper bound on sqrt(sum_{k >= tau} a_k^2) for tau >= 1."""
        return self.c * tau ** (0.5 - self.beta) / math.sqrt(2.0 * self.beta - 1.0)


def truncation_order(c: float, beta: float, tol: float = TAIL_TOLERANCE) -> int:
    """
    Smallest K with sum_{k>K} c^2 (1+k)^(-2 beta) < tol.

    The tail is bounded by the integral c^2 (1+K)^(1-2 beta) / (2 beta - 1).
    """
    exponent = 2.0 * beta - 1.0
    threshold = (c * c / (tol * exponent)) ** (1.0 / exponent)
    return max(0, math.ceil(threshold) - 1)


class LinearProcessSpec(BaseModel):
    """Causal linear process with Gaussian innovations, stacked over m coordinates."""

    model_config = ConfigDict(frozen=True)

    coeffs: Tuple[float, ...] = Field(..., description="Truncated coefficients a_0..a_K")
    decay_cert: Optional[DecayCertificate] = Field(None, description="Optional decay certificate")
    innovation: InnovationLaw = Field(default=InnovationLaw.GAUSSIAN)
    m: int = Field(default=1, ge=1, description="Independent coordinates stacked per value")
    m_bound: Optional[float] = Field(None, description="Cached spectral minimum")
    M_bound: Optional[float] = Field(None, description="Cached spectral maximum")

    @field_validator("coeffs")
    @classmethod
    def validate_coeffs(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        """Coefficients must be a nonempty list of finite reals."""
        if len(v) == 0:
            raise ValueError("coeffs must contain at least one coefficient")
        if not all(math.isfinite(c) for c in v):
            raise ValueError("coeffs must be finite")
        return tuple(float(c) for c in v)

    @model_validator(mode="after")
    def validate_certificate(self) -> "LinearProcessSpec":
        """Every stored coefficient must respect the decay certificate."""
        if self.decay_cert is not None:
            k = np.arange(len(self.coeffs))
            bound = self.decay_cert.bound(k)
            if np.any(np.abs(self.coefficients) > bound * (1.0 + 1e-12)):
                raise ValueError("coeffs violate the decay certificate |a_k| <= c (1+k)^-beta")
        return self

    @classmethod
    def iid(cls, m: int = 1) -> "LinearProcessSpec":
        """I.i.d. standard Gaussian stream."""
        return cls(coeffs=(1.0,), m=m)

    @classmethod
    def from_decay(
        cls, c: float, beta: float, m: int = 1, tol: float = TAIL_TOLERANCE
    ) -> "LinearProcessSpec":
        """Coefficients a_k = c (1 + k)^(-beta), truncated by the tail rule."""
        K = truncation_order(c, beta, tol)
        k = np.arange(K + 1, dtype=float)
        coeffs = tuple((c * (1.0 + k) ** (-beta)).tolist())
        return cls(coeffs=coeffs, decay_cert=DecayCertificate(c=c, beta=beta), m=m)

    @property
    def coefficients(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @property
    def sigma(self) -> float:
        """Stationary standard deviation per coordinate."""
        return float(np.sqrt(np.sum(self.coefficients**2)))

    @property
    def is_iid(self) -> bool:
        return bool(np.all(self.coefficients[1:] == 0.0))

    def tail_sigma(self, tau: int) -> float:
        """sqrt(sum_{k >= tau} a_k^2); zero beyond the truncation."""
        if tau > self.K:
            return 0.0
        return float(np.sqrt(np.sum(self.coefficients[tau:] ** 2)))

    def with_spectral_bounds(self, grid: int = 4096) -> "LinearProcessSpec":
        """Copy with m_bound and M_bound cached."""
        from langmix.streams.spectral import spectral_bounds

        bounds = spectral_bounds(self, grid)
        return self.model_copy(update={"m_bound": bounds.m_bound, "M_bound": bounds.M_bound})
