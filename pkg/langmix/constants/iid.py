"""
Constants of the independent-data setting.

Constants layer is responsible for this module.

Law moments of the stream are computed from the chi distribution of ||X_0|| / sigma,
X_0 ~ N(0, sigma^2 I_m).
"""

import math
from typing import Callable

from pydantic import BaseModel, Field
from scipy.stats import chi

from langmix.errors import DomainError
from langmix.streams.spec import LinearProcessSpec


class IIDLawMoments(BaseModel):
    """Moments of (1 + ||X_0||) entering the independent-data constants."""

    rho: float = Field(..., ge=0)
    sigma: float = Field(..., ge=0, description="Per-coordinate standard deviation")
    m: int = Field(..., ge=1)
    growth_rho: float = Field(..., description="E(1 + ||X||)^rho")
    growth_2rho: float = Field(..., description="E(1 + ||X||)^{2 rho}")
    growth_2rho_2: float = Field(..., description="E(1 + ||X||)^{2 rho + 2}")
    var_W: float = Field(
        ..., description="E[(1 + ||X|| + ||EX||)^{2 rho} ||X - EX||^2] (EX = 0 here)"
    )


def _norm_expect(m: int, sigma: float, fn: Callable[[float], float]) -> float:
    if sigma == 0.0:
        return float(fn(0.0))
    return float(chi(m).expect(lambda t: fn(sigma * t)))


def iid_law_moments(spec: LinearProcessSpec, rho: float) -> IIDLawMoments:
    """
    Law moments of an i.i.d. Gaussian stream.

    Raises:
        DomainError: the stream is not i.i.d. or rho < 0
    """
    if not spec.is_iid:
        raise DomainError("independent-data constants need an i.i.d. stream (coeffs=(a_0,))")
    if rho < 0:
        raise DomainError(f"growth exponent must be nonnegative, got {rho}")
    sigma, m = spec.sigma, spec.m
    return IIDLawMoments(
        rho=rho,
        sigma=sigma,
        m=m,
        growth_rho=_norm_expect(m, sigma, lambda x: (1.0 + x) ** rho),
        growth_2rho=_norm_expect(m, sigma, lambda x: (1.0 + x) ** (2.0 * rho)),
        growth_2rho_2=_norm_expect(m, sigma, lambda x: (1.0 + x) ** (2.0 * rho + 2.0)),
        var_W=_norm_expect(m, sigma, lambda x: (1.0 + x) ** (2.0 * rho) * x * x),
    )


def lambda0(a: float, L1: float, growth_2rho: float) -> float:
    """lambda_0 = min(a / (2 L1^2 E(1+||X||)^{2rho}), 1/a)."""
    return min(a / (2.0 * L1 * L1 * growth_2rho), 1.0 / a)


def relaxed_step_bound(L1: float, lambda_bar: float) -> float:
    """Step bound when rho = 0: min(1/(2 L1), lambda_bar/2)."""
    return 0.5 * min(1.0 / L1, lambda_bar)


def iid_C(L2: float, theta_star_norm: float, growth_2rho_2: float, H_star: float, d: int) -> float:
    """C = 4 L2^2 (1+||theta*||)^2 E(1+||X||)^{2rho+2} + 4 H*^2 + 2d."""
    return 4.0 * L2 * L2 * (1.0 + theta_star_norm) ** 2 * growth_2rho_2 + 4.0 * H_star**2 + 2.0 * d


def iid_c0(theta0_second_moment: float, C: float, a: float, theta_star_norm: float) -> float:
    """c0 = 2 E||theta_0 - theta*||^2 + 2C/a + 2||theta*||^2."""
    return 2.0 * theta0_second_moment + 2.0 * C / a + 2.0 * theta_star_norm**2


def iid_cbar(L2: float, c0: float, var_W: float, a_tilde: float) -> float:
    """c_bar = sqrt(8 L2^2 (1 + c0) Var_W / a_tilde)."""
    return math.sqrt(8.0 * L2 * L2 * (1.0 + c0) * var_W / a_tilde)
