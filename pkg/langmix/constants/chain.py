"""
The constant chain c', c'' -> C_under -> C_flat, C_star -> C0 behind the
sup_n ||theta_n - theta_bar_n||_2 <= C0(p) lambda^{1/2 - 1/p} bound.

Constants layer is responsible for this module.
"""

import math
from typing import Dict, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import ncx2

from langmix.constants.base import ConvexityConstants, ScaledValue, log_sum, safe_log
from langmix.constants.moments import MomentConstants, compute_Cdprime, compute_Cprime
from langmix.errors import DomainError, HypothesisViolationError
from langmix.metrics.inequalities import chi_moment
from langmix.mixing.profile import profile_build
from langmix.streams.spec import LinearProcessSpec


def require_even_p(p: int) -> None:
    """The chain needs an even p >= 4."""
    if int(p) != p or p < 4 or p % 2 != 0:
        raise HypothesisViolationError(
            f"C0(p) is defined for even p >= 4 only, got p={p}",
            detail={"p": p, "hypothesis": "p even, p >= 4"},
        )


class MixingInputs(BaseModel):
    """Stream quantities entering the chain: script M_r (powers), C_{3,2} and C_{2,1}."""

    model_config = ConfigDict(frozen=True)

    script_M: Dict[int, float] = Field(default_factory=dict, description="r -> sup_n E||X_n||^r")
    default_M: Optional[float] = Field(None, description="Value for orders not listed")
    C32: float = Field(..., ge=0, description="script C_{3,2}")
    C21: float = Field(..., ge=0, description="script C_{2,1}")
    provenance: str = "supplied"

    def M(self, r: int) -> float:
        if r in self.script_M:
            return self.script_M[r]
        if self.default_M is not None:
            return self.default_M
        raise DomainError(f"script M_{r} is required but was not supplied")

    @classmethod
    def constant(cls, value: float = 1.0) -> "MixingInputs":
        """Every mixing constant set to ``value``."""
        return cls(default_M=value, C32=value, C21=value, provenance="constant")

    @classmethod
    def zero(cls) -> "MixingInputs":
        return cls.constant(0.0)

    @classmethod
    def from_stream(cls, spec: LinearProcessSpec, orders: Sequence[int]) -> "MixingInputs":
        """Analytic profiles of a linear process at the requested orders plus r = 2, 3."""
        wanted = sorted(set(int(r) for r in orders) | {2, 3})
        profiles = {r: profile_build(spec, r) for r in wanted}
        p2, p3 = profiles[2], profiles[3]
        return cls(
            script_M={r: prof.script_M_r for r, prof in profiles.items()},
            C32=p3.script_C(2.0),
            C21=p2.script_C(1.0),
            provenance=", ".join(sorted({prof.provenance.value for prof in profiles.values()})),
        )


class ThetaZeroMoments(BaseModel):
    """Initial law N(theta* + offset, std^2 I_d); std = 0 is the point mass."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(..., ge=1)
    offset_norm: float = Field(default=0.0, ge=0, description="||E theta_0 - theta*||")
    std: float = Field(default=0.0, ge=0, description="Isotropic standard deviation")

    @classmethod
    def point_mass(
        cls, d: int, offset: Sequence[float] | np.ndarray | None = None
    ) -> "ThetaZeroMoments":
        norm = 0.0 if offset is None else float(np.linalg.norm(offset))
        return cls(d=d, offset_norm=norm)

    def norm(self, r: float) -> float:
        """||theta_0 - theta*||_r = E^{1/r}||theta_0 - theta*||^r."""
        if r <= 0:
            raise DomainError(f"norm order must be positive, got {r}")
        if self.std == 0.0:
            return self.offset_norm
        nc = (self.offset_norm / self.std) ** 2
        if nc == 0.0:
            moment = chi_moment(self.d, r)
        elif float(r / 2).is_integer():
            moment = float(ncx2(self.d, nc).moment(int(r / 2)))
        else:
            moment = float(ncx2(self.d, nc).expect(lambda y: y ** (r / 2)))
        return self.std * moment ** (1.0 / r)

    def second_moment(self) -> float:
        """E||theta_0 - theta*||^2 = ||offset||^2 + d std^2."""
        return self.offset_norm**2 + self.d * self.std**2


class ChainInputs(BaseModel):
    """Everything the chain depends on."""

    base: ConvexityConstants
    p: int
    theta_star_norm: float = Field(default=0.0, ge=0)
    mixing: MixingInputs
    theta0: ThetaZeroMoments


class ChainConstants(BaseModel):
    """Every intermediate of the chain, named after the quantity it holds."""

    p: int
    q: int = Field(..., description="p / 2")
    Cprime: MomentConstants = Field(..., description="C'(p), c'(p)")
    Cdprime: MomentConstants = Field(..., description="C''(p), c''(p)")
    Cprime_q: MomentConstants
    Cdprime_q: MomentConstants
    Cdprime_1: MomentConstants
    Cunder: float = Field(..., description="C_under(p/2)")
    Cunder_1: float = Field(..., description="C_under(1)")
    Cflat_stmt: float = Field(..., description="C_flat with C''(1)/a_tilde")
    Cflat_proof: float = Field(..., description="C_flat with (C''(1)/a_tilde)^{1/2}")
    Cstar: float
    C0: ScaledValue = Field(..., description="C0(p) built with Cflat_stmt")
    C0_proof: ScaledValue = Field(..., description="C0(p) built with Cflat_proof")


def _moments(inputs: ChainInputs, p: int) -> tuple[MomentConstants, MomentConstants]:
    b = inputs.base
    Cp = compute_Cprime(p, b.d, b.a_tilde)
    Cdp = compute_Cdprime(
        p, b.d, b.a_tilde, b.L1, b.L2, inputs.theta_star_norm, inputs.mixing.M(2 * p), b.H_star
    )
    return Cp, Cdp


def compute_Cunder(
    inputs: ChainInputs, q: int, Cp: MomentConstants, Cdp: MomentConstants
) -> float:
    """C_under(q) = ||theta_0 - theta*||_{2q} + (c'(q) + c''(q)) / a_tilde^{1/2q}."""
    return inputs.theta0.norm(2 * q) + (Cp.c + Cdp.c) / inputs.base.a_tilde ** (0.5 / q)


def _log_C0(log_Cstar: float, Cflat: float, base: ConvexityConstants) -> float:
    """log[(30 e^{L1} C_star + C_flat) / (1 - e^{-a_tilde}) + C_star]."""
    numerator = log_sum([math.log(30.0) + base.L1 + log_Cstar, safe_log(Cflat)])
    denominator = math.log(-math.expm1(-base.a_tilde))
    return log_sum([numerator - denominator, log_Cstar])


def compute_chain(inputs: ChainInputs) -> ChainConstants:
    """
    Evaluate the full chain for even p >= 4.

    Raises:
        HypothesisViolationError: p odd or p < 4
    """
    p = inputs.p
    require_even_p(p)
    q = p // 2
    b = inputs.base
    mix = inputs.mixing

    Cp, Cdp = _moments(inputs, p)
    Cp_q, Cdp_q = _moments(inputs, q)
    Cp_1, Cdp_1 = _moments(inputs, 1)

    Cunder = compute_Cunder(inputs, q, Cp_q, Cdp_q)
    Cunder_1 = compute_Cunder(inputs, 1, Cp_1, Cdp_1)

    Cd1 = Cdp_1.C.require() / b.a_tilde
    theta0_l2 = inputs.theta0.norm(2)
    common = 2.0 * b.L2 * math.sqrt(mix.M(2)) + 2.0 * b.H_star + Cunder_1 * b.L1
    Cflat_stmt = b.L1 * (theta0_l2 + Cd1) + common
    Cflat_proof = b.L1 * (theta0_l2 + math.sqrt(Cd1)) + common

    Cstar = 10.0 * (
        b.L1 * Cunder + b.L2 * math.sqrt(mix.C32) + b.L2 * mix.M(3) ** (1.0 / 3.0) + b.H_star
    ) + 2.0 * b.L2 * mix.C21
    log_Cstar = safe_log(Cstar)

    return ChainConstants(
        p=p,
        q=q,
        Cprime=Cp,
        Cdprime=Cdp,
        Cprime_q=Cp_q,
        Cdprime_q=Cdp_q,
        Cdprime_1=Cdp_1,
        Cunder=Cunder,
        Cunder_1=Cunder_1,
        Cflat_stmt=Cflat_stmt,
        Cflat_proof=Cflat_proof,
        Cstar=Cstar,
        C0=ScaledValue.from_log(_log_C0(log_Cstar, Cflat_stmt, b)),
        C0_proof=ScaledValue.from_log(_log_C0(log_Cstar, Cflat_proof, b)),
    )
