"""
Constants of the ULA discretisation bias and its convergence to stationarity:

    W2(Law(theta_bar_n), pi_lambda) <= c_hat e^{-a lambda n}
    W2(pi, pi_lambda) <= c sqrt(lambda)
"""

import math

from pydantic import BaseModel, Field

from langmix.constants.base import ConvexityConstants
from langmix.errors import DomainError


class BiasConstants(BaseModel):
    """c_hat for a given initial law and c at a given step size."""

    lam: float = Field(..., description="Step size c was evaluated at")
    c_hat: float = Field(..., description="sqrt(2) (E||theta_0 - theta*||^2 + d/a_tilde)^{1/2}")
    c: float = Field(..., description="Discretisation bias constant at lam")


def c_hat(base: ConvexityConstants, theta0_second_moment: float = 0.0) -> float:
    if theta0_second_moment < 0:
        raise DomainError("E||theta_0 - theta*||^2 must be nonnegative")
    return math.sqrt(2.0) * math.sqrt(theta0_second_moment + base.d / base.a_tilde)


def c_bias(base: ConvexityConstants, lam: float) -> float:
    """
    c = (L1^2/a~ (2 lambda + 1/a~) (d + lambda^2 L1^2 d/12 + L1^2 lambda d/(2a)))^{1/2}.

    Increasing in lambda, tends to L1 sqrt(d)/a~ as lambda -> 0.
    """
    a, L1, at, d = base.a, base.L1, base.a_tilde, base.d
    inner = d + lam * lam * L1 * L1 * d / 12.0 + L1 * L1 * lam * d / (2.0 * a)
    return math.sqrt(L1 * L1 / at * (2.0 * lam + 1.0 / at) * inner)


def bias_constants(
    lam: float, base: ConvexityConstants, theta0_second_moment: float = 0.0
) -> BiasConstants:
    """
    Evaluate c_hat and c(lambda).

    Raises:
        StepSizeError: lambda outside (0, lambda_bar)
    """
    base.check_step(lam)
    return BiasConstants(
        lam=lam, c_hat=c_hat(base, theta0_second_moment), c=c_bias(base, lam)
    )
