"""
Mixing profiles: M_r, gamma_r(tau), Gamma_r, script M_r and script C_{r,s}.

Mixing layer is responsible for this module.
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Sequence

from loguru import logger
from pydantic import BaseModel, Field

from langmix.errors import DomainError
from langmix.mixing.gamma import (
    MIN_MC_PATHS,
    chi_root,
    gamma_linear_analytic,
    gamma_mc_estimate,
    stationary_moment_root,
)
from langmix.streams.spec import LinearProcessSpec


class Provenance(str, Enum):
    """How the gamma values of a profile were obtained."""

    ANALYTIC = "analytic"
    ANALYTIC_UPPER = "analytic-upper"
    MONTE_CARLO = "monte-carlo"


class MixingProfile(BaseModel):
    """Mixing quantities of one stream at moment order r, evaluated at n = 0."""

    r: float = Field(..., ge=1, description="Moment order")
    M_r: float = Field(..., description="sup_m E^{1/r}||X_m||^r")
    gamma: List[float] = Field(..., description="gamma_r(tau) for tau = 0..tau_max")
    gamma_std_error: Optional[List[float]] = Field(
        None, description="Bootstrap standard errors (monte-carlo only)"
    )
    tau_max: int
    Gamma_r: float = Field(..., description="sum_{tau <= tau_max} gamma_r(tau)")
    Gamma_r_remainder: Optional[float] = Field(
        None, description="Upper bound on sum_{tau > tau_max} gamma_r(tau); None when unbounded"
    )
    Gamma_r_upper: Optional[float] = Field(
        None, description="Gamma_r + remainder bound; None when unbounded"
    )
    remainder_unbounded: bool = False
    script_M_r: float = Field(
        ..., description="script M_r(X) = sup_n E||X_n||^r, a power rather than a root"
    )
    script_C_rs: Dict[str, float] = Field(
        default_factory=dict, description="script C_{r,s} keyed 'r,s', from Gamma_r_upper"
    )
    provenance: Provenance
    conditioning: str = Field(
        default="n=0",
        description="Conditional quantities evaluated at n = 0; exact for stationary streams, "
        "a lower bound on the sup over n otherwise",
    )

    @property
    def Gamma_r_interval(self) -> tuple[float, Optional[float]]:
        return self.Gamma_r, self.Gamma_r_upper

    def script_C(self, s: float) -> float:
        """script C_{r,s} for an arbitrary s, computed like the stored pairs."""
        return _script_C(self.Gamma_r, self.Gamma_r_upper, s)


def _pair_key(r: float, s: float) -> str:
    return f"{r:g},{s:g}"


def _script_C(gamma_sum: float, gamma_upper: Optional[float], s: float) -> float:
    base = gamma_upper if gamma_upper is not None else gamma_sum
    return float(base**s)


def _next_even(r: float) -> int:
    return 2 * math.ceil(r / 2.0)


def certificate_remainder(spec: LinearProcessSpec, tau_max: int, r_even: int) -> Optional[float]:
    """
    Bound on sum_{tau > tau_max} gamma_r(tau).

    Zero once tau_max covers the truncation. Otherwise sigma(tau) <= c tau^{1/2-beta}/sqrt(2beta-1)
    from the decay certificate is summed by the integral test; None without a certificate.
    """
    if tau_max >= spec.K:
        return 0.0
    cert = spec.decay_cert
    if cert is None:
        return None

    g = chi_root(spec.m, r_even)
    scale = cert.c / math.sqrt(2.0 * cert.beta - 1.0)
    decay = cert.beta - 1.5
    if tau_max >= 1:
        tail = scale * tau_max ** (-decay) / decay
    else:
        tail = scale * (1.0 + 1.0 / decay)
    return float(g * tail)


def profile_build(
    spec: LinearProcessSpec,
    r: float,
    s: Optional[float | Sequence[float]] = None,
    tau_max: Optional[int] = None,
    method: str = "analytic",
    paths: int = 10_000,
    seed: int = 0,
) -> MixingProfile:
    """
    Assemble the mixing profile of ``spec`` at order ``r``.

    Args:
        spec: Linear process
        r: Moment order, at least 1; non-even orders are bounded by the next even order
        s: Exponent(s) for script C_{r,s}
        tau_max: Last lag summed explicitly (defaults to the truncation order K)
        method: "analytic" or "monte-carlo"
        paths: Monte Carlo paths per lag
        seed: Monte Carlo seed

    Returns:
        MixingProfile with Gamma_r, its remainder bound and provenance
    """
    if r < 1:
        raise DomainError(f"moment order must be at least 1, got {r}")
    tau_max = spec.K if tau_max is None else int(tau_max)
    if tau_max < 0:
        raise DomainError(f"tau_max must be nonnegative, got {tau_max}")
    exponents = [] if s is None else ([float(s)] if isinstance(s, (int, float)) else list(s))
    if any(e <= 0 for e in exponents):
        raise DomainError(f"script C exponents must be positive, got {exponents}")

    r_even = _next_even(r)
    std_errors: Optional[List[float]] = None
    if method == "analytic":
        gamma = [gamma_linear_analytic(spec, tau, r_even) for tau in range(tau_max + 1)]
        provenance = Provenance.ANALYTIC if r_even == r else Provenance.ANALYTIC_UPPER
        M_r = stationary_moment_root(spec, r)
    elif method == "monte-carlo":
        if paths < MIN_MC_PATHS:
            raise DomainError(f"monte-carlo profiles need at least {MIN_MC_PATHS} paths")
        estimates = [gamma_mc_estimate(spec, tau, r, paths, seed) for tau in range(tau_max + 1)]
        gamma = [e.estimate for e in estimates]
        std_errors = [e.std_error for e in estimates]
        provenance = Provenance.MONTE_CARLO
        # The residual at lag 0 is X itself.
        M_r = gamma[0]
    else:
        raise DomainError(f"unknown profile method {method!r}; use 'analytic' or 'monte-carlo'")

    gamma_sum = float(sum(gamma))
    remainder = certificate_remainder(spec, tau_max, r_even)
    if remainder is None:
        logger.warning(
            f"tau_max={tau_max} < K={spec.K} and no decay certificate: "
            "Gamma_r remainder is unbounded"
        )
    gamma_upper = None if remainder is None else gamma_sum + remainder

    return MixingProfile(
        r=r,
        M_r=M_r,
        gamma=gamma,
        gamma_std_error=std_errors,
        tau_max=tau_max,
        Gamma_r=gamma_sum,
        Gamma_r_remainder=remainder,
        Gamma_r_upper=gamma_upper,
        remainder_unbounded=remainder is None,
        script_M_r=float(M_r**r),
        script_C_rs={_pair_key(r, e): _script_C(gamma_sum, gamma_upper, e) for e in exponents},
        provenance=provenance,
    )
