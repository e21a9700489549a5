"""
Planners: accuracy epsilon -> (step size lambda, horizon n) with
W2(Law(theta_n), pi) <= epsilon.

Constants layer is responsible for this module.

Both planners need the bias constant c, which itself depends on lambda. It is resolved
by one sweep: evaluate c at lambda_bar/2, compute lambda, re-evaluate c at that lambda
and recompute lambda once.
"""

import math
from typing import Optional

from loguru import logger
from pydantic import BaseModel, Field

from langmix.constants.base import ConvexityConstants, ScaledValue, compute_base, safe_log
from langmix.constants.bias import c_bias, c_hat
from langmix.constants.chain import ChainInputs, MixingInputs, ThetaZeroMoments, compute_chain
from langmix.constants.iid import (
    IIDLawMoments,
    iid_C,
    iid_c0,
    iid_cbar,
    lambda0,
    relaxed_step_bound,
)
from langmix.errors import DomainError, HypothesisViolationError

RELATIVE_TOLERANCE = 1e-12
# Horizons above this are reported by their logarithm only.
_MAX_EXACT_HORIZON = 2.0**62


def choose_p(kappa: float) -> int:
    """Smallest even p >= 4 with kappa > 2/(p-1)."""
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    p = 4
    while not kappa > 2.0 / (p - 1):
        p += 2
    return p


def _horizon(log_n: float) -> Optional[int]:
    if log_n > math.log(_MAX_EXACT_HORIZON):
        return None
    return max(1, math.ceil(math.exp(log_n) * (1.0 - RELATIVE_TOLERANCE)))


class DependentStep(BaseModel):
    lam: float
    c1_kappa: float


def dependent_step(epsilon: float, kappa: float, c_tilde: float) -> DependentStep:
    """lambda = epsilon^{2+kappa} / (4 C~)^{2+kappa} = c1(kappa) epsilon^{2+kappa}."""
    if epsilon <= 0 or kappa <= 0 or c_tilde <= 0:
        raise DomainError("epsilon, kappa and C~ must be positive")
    exponent = 2.0 + kappa
    log_c1 = -exponent * math.log(4.0 * c_tilde)
    return DependentStep(
        lam=math.exp(exponent * math.log(epsilon) + log_c1), c1_kappa=math.exp(log_c1)
    )


class DependentPlanInputs(BaseModel):
    base: ConvexityConstants
    theta_star_norm: float = Field(default=0.0, ge=0)
    mixing: MixingInputs
    theta0: ThetaZeroMoments


class DependentPlan(BaseModel):
    """Step size and horizon for dependent data, with the substitution checks."""

    epsilon: float
    kappa: float
    p: int
    lam: float
    n_min: Optional[int] = Field(None, description="None when the horizon exceeds 2^62")
    log10_n_min: float
    C0: ScaledValue
    c_hat: float
    c: float = Field(..., description="Bias constant at the final lambda")
    c_first: float = Field(..., description="Bias constant at lambda_bar / 2")
    C_tilde: ScaledValue
    c1_kappa: ScaledValue
    c2_kappa: ScaledValue
    scaled: bool = Field(False, description="lambda was reduced below lambda_bar")
    contraction_ok: bool = Field(..., description="a lambda n >= ln(2 C~ / epsilon)")
    half_budget_ok: bool = Field(..., description="2 C~ lambda^{1/(2+kappa)} <= epsilon/2")
    tail_ok: bool = Field(..., description="C~ e^{-a lambda n} <= epsilon/2")
    note: str = "C~ uses c from one sweep: c(lambda_bar/2) -> lambda -> c(lambda)"


def _log_dependent_lambda(epsilon: float, kappa: float, log_c_tilde: float) -> float:
    return (2.0 + kappa) * (math.log(epsilon) - math.log(4.0) - log_c_tilde)


def plan_dependent(epsilon: float, kappa: float, inputs: DependentPlanInputs) -> DependentPlan:
    """
    Plan (lambda, n) for conditionally L-mixing data.

    Raises:
        HypothesisViolationError: epsilon outside (0, 1/e]
    """
    if not 0.0 < epsilon <= math.exp(-1.0):
        raise HypothesisViolationError(
            f"epsilon must lie in (0, 1/e], got {epsilon}", detail={"epsilon": epsilon}
        )
    p = choose_p(kappa)
    base = inputs.base
    chain = compute_chain(
        ChainInputs(
            base=base,
            p=p,
            theta_star_norm=inputs.theta_star_norm,
            mixing=inputs.mixing,
            theta0=inputs.theta0,
        )
    )
    log_C0 = chain.C0.log_value
    ch = c_hat(base, inputs.theta0.second_moment())

    c_first = c_bias(base, 0.5 * base.lambda_bar)
    log_ct_first = max(log_C0, math.log(ch), safe_log(c_first))
    lam_first = math.exp(_log_dependent_lambda(epsilon, kappa, log_ct_first))
    c_final = c_bias(base, lam_first)
    log_ct = max(log_C0, math.log(ch), safe_log(c_final))
    log_lam = _log_dependent_lambda(epsilon, kappa, log_ct)
    lam = math.exp(log_lam)
    if lam == 0.0:
        raise DomainError(
            "planned step size underflows float64",
            detail={"log10_lambda": log_lam / math.log(10.0)},
        )

    exponent = 2.0 + kappa
    log_c1 = -exponent * (math.log(4.0) + log_ct)
    log_2ct = math.log(2.0) + log_ct
    if log_2ct <= -1.0:
        raise DomainError(f"c2(kappa) needs 1 + ln(2 C~) > 0, got C~ = {math.exp(log_ct):.3g}")
    log_c2 = exponent * (math.log(4.0) + log_ct) + math.log1p(log_2ct) - math.log(base.a)
    log_n = log_c2 - exponent * math.log(epsilon) + math.log(math.log(1.0 / epsilon))

    scaled = False
    if lam >= base.lambda_bar:
        scaled = True
        lam = 0.5 * base.lambda_bar
        log_lam = math.log(lam)
        logger.warning(
            f"planned step size reaches lambda_bar={base.lambda_bar:.6g}; using lambda_bar/2"
        )
        log_required = math.log(max(log_2ct - math.log(epsilon), 1e-300)) - math.log(base.a * lam)
        log_n = max(log_n, log_required)

    n_min = _horizon(log_n)
    log_n_eff = math.log(n_min) if n_min is not None else log_n

    # a lambda n versus ln(2 C~ / epsilon), both in logs of positive quantities.
    required = log_2ct - math.log(epsilon)
    achieved = math.exp(math.log(base.a) + log_lam + log_n_eff)
    contraction_ok = achieved >= required * (1.0 - RELATIVE_TOLERANCE)
    half_budget_ok = log_2ct + log_lam / exponent <= math.log(epsilon / 2.0) + RELATIVE_TOLERANCE
    tail_ok = log_ct - achieved <= math.log(epsilon / 2.0) + RELATIVE_TOLERANCE
    for name, ok in (
        ("contraction", contraction_ok),
        ("half budget", half_budget_ok),
        ("tail", tail_ok),
    ):
        if not ok:
            logger.warning(f"dependent plan {name} check fails at epsilon={epsilon}")

    return DependentPlan(
        epsilon=epsilon,
        kappa=kappa,
        p=p,
        lam=lam,
        n_min=n_min,
        log10_n_min=log_n_eff / math.log(10.0),
        C0=chain.C0,
        c_hat=ch,
        c=c_final,
        c_first=c_first,
        C_tilde=ScaledValue.from_log(log_ct),
        c1_kappa=ScaledValue.from_log(log_c1),
        c2_kappa=ScaledValue.from_log(log_c2),
        scaled=scaled,
        contraction_ok=contraction_ok,
        half_budget_ok=half_budget_ok,
        tail_ok=tail_ok,
    )


class IIDStepConstants(BaseModel):
    c1: float = Field(..., description="(4 C_bar)^{-1}")
    c2: float = Field(..., description="(a c1)^{-1} (ln(2 C_bar) + 1)")


def iid_step_constants(Cbar: float, a: float) -> IIDStepConstants:
    if Cbar <= 0 or a <= 0:
        raise DomainError("C_bar and a must be positive")
    c1 = 1.0 / (4.0 * Cbar)
    return IIDStepConstants(c1=c1, c2=(math.log(2.0 * Cbar) + 1.0) / (a * c1))


class IIDPlanInputs(BaseModel):
    a: float = Field(..., gt=0)
    L1: float = Field(..., gt=0, description="Local Lipschitz scale in theta")
    L2: float = Field(..., ge=0)
    d: int = Field(..., ge=1)
    H_star: float = Field(default=0.0, ge=0)
    theta_star_norm: float = Field(default=0.0, ge=0)
    theta0_second_moment: float = Field(default=0.0, ge=0)
    law: IIDLawMoments

    @property
    def L1_effective(self) -> float:
        """Lipschitz constant of h: L1 E(1+||X||)^rho."""
        return self.L1 * self.law.growth_rho

    def base(self) -> ConvexityConstants:
        return compute_base(self.a, self.L1_effective, self.L2, self.d, self.H_star)


class IIDPlan(BaseModel):
    """Step size and horizon for independent data, with the consistency checks."""

    epsilon: float
    lam: float
    n_min: Optional[int]
    log10_n_min: float
    lambda0: float
    step_bound: float = Field(..., description="lambda_0, or the relaxed bound when rho = 0")
    iid_C: float
    c0: float
    cbar: float
    c_hat: float
    c: float
    c_first: float
    Cbar: float
    c1: float
    c2: float
    half_budget_ok: bool = Field(..., description="C_bar lambda^{1/2} <= epsilon/2")
    tail_ok: bool = Field(..., description="C_bar e^{-a lambda n} <= epsilon/2")
    below_lambda_bar: bool
    note: str = "C_bar uses c from one sweep: c(lambda_bar/2) -> lambda -> c(lambda)"


def plan_iid(epsilon: float, inputs: IIDPlanInputs) -> IIDPlan:
    """
    Plan (lambda, n) for i.i.d. data: lambda = min(c1 epsilon^2, step bound) and
    n = ceil(c2 epsilon^{-2} ln(1/epsilon)).

    Raises:
        HypothesisViolationError: epsilon outside (0, 1/2]
    """
    if not 0.0 < epsilon <= 0.5:
        raise HypothesisViolationError(
            f"epsilon must lie in (0, 1/2], got {epsilon}", detail={"epsilon": epsilon}
        )
    base = inputs.base()
    law = inputs.law
    lam0 = lambda0(inputs.a, inputs.L1, law.growth_2rho)
    step_bound = relaxed_step_bound(inputs.L1, base.lambda_bar) if law.rho == 0 else lam0

    C = iid_C(inputs.L2, inputs.theta_star_norm, law.growth_2rho_2, inputs.H_star, inputs.d)
    c0 = iid_c0(inputs.theta0_second_moment, C, inputs.a, inputs.theta_star_norm)
    cbar = iid_cbar(inputs.L2, c0, law.var_W, base.a_tilde)
    ch = c_hat(base, inputs.theta0_second_moment)

    c_first = c_bias(base, 0.5 * base.lambda_bar)
    first = iid_step_constants(max(cbar, ch, c_first), inputs.a)
    lam_first = min(first.c1 * epsilon**2, step_bound)
    c_final = c_bias(base, lam_first)
    Cbar = max(cbar, ch, c_final)
    step = iid_step_constants(Cbar, inputs.a)
    lam = min(step.c1 * epsilon**2, step_bound)

    log_n = math.log(step.c2) - 2.0 * math.log(epsilon) + math.log(math.log(1.0 / epsilon))
    n_min = _horizon(log_n)
    n_eff = float(n_min) if n_min is not None else math.exp(log_n)

    half_budget_ok = Cbar * math.sqrt(lam) <= 0.5 * epsilon * (1.0 + RELATIVE_TOLERANCE)
    tail_ok = Cbar * math.exp(-inputs.a * lam * n_eff) <= 0.5 * epsilon * (
        1.0 + RELATIVE_TOLERANCE
    )
    if not half_budget_ok:
        logger.warning(
            f"iid plan: C_bar sqrt(lambda) = {Cbar * math.sqrt(lam):.4g} exceeds epsilon/2; "
            "reported, not corrected"
        )
    if not tail_ok:
        logger.warning(f"iid plan: tail term exceeds epsilon/2 at epsilon={epsilon}")

    return IIDPlan(
        epsilon=epsilon,
        lam=lam,
        n_min=n_min,
        log10_n_min=log_n / math.log(10.0),
        lambda0=lam0,
        step_bound=step_bound,
        iid_C=C,
        c0=c0,
        cbar=cbar,
        c_hat=ch,
        c=c_final,
        c_first=c_first,
        Cbar=Cbar,
        c1=step.c1,
        c2=step.c2,
        half_budget_ok=half_budget_ok,
        tail_ok=tail_ok,
        below_lambda_bar=lam < base.lambda_bar,
    )
