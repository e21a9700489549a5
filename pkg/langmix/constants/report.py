"""
Constant report: every intermediate under the name used in the output files.

Constants layer is responsible for this module.
"""

import math
from typing import Optional

from pydantic import BaseModel, Field

from langmix.constants.base import ConvexityConstants, ScaledValue, safe_log
from langmix.constants.bias import bias_constants
from langmix.constants.chain import (
    ChainConstants,
    ChainInputs,
    MixingInputs,
    ThetaZeroMoments,
    compute_chain,
)
from langmix.constants.planners import IIDPlanInputs, plan_iid


class ConstantReport(BaseModel):
    """Flat view of the constants plus the full chain."""

    a: float
    L1: float
    L2: float
    d: int
    p: int
    H_star: float
    theta_star_norm: float
    lambda_bar: float
    a_tilde: float
    mixing: MixingInputs
    theta0: ThetaZeroMoments

    Cprime: ScaledValue
    cprime: float
    Cdprime: ScaledValue
    cdprime: float
    Cprime_dominance_ok: bool
    Cdprime_dominance_ok: bool
    Cunder: float
    Cflat_stmt: float
    Cflat_proof: float
    Cstar: float
    C0: ScaledValue
    C0_proof: ScaledValue
    C0_gt_Cstar: bool

    c_hat: float
    c: float
    c_lambda: float = Field(..., description="Step size c is reported at")
    kappa: Optional[float] = None
    C_tilde: Optional[ScaledValue] = None
    c1_kappa: Optional[ScaledValue] = None
    c2_kappa: Optional[ScaledValue] = None

    iid_epsilon: Optional[float] = None
    lambda0: Optional[float] = None
    iid_C: Optional[float] = None
    c0: Optional[float] = None
    cbar: Optional[float] = None
    Cbar: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None

    chain: ChainConstants


def constant_report(
    base: ConvexityConstants,
    p: int,
    mixing: MixingInputs,
    theta0: ThetaZeroMoments,
    theta_star_norm: float = 0.0,
    lam: Optional[float] = None,
    kappa: Optional[float] = None,
    iid: Optional[IIDPlanInputs] = None,
    iid_epsilon: float = 0.5,
) -> ConstantReport:
    """
    Evaluate the chain at ``p``, the bias constants at ``lam`` (lambda_bar/2 by default),
    c1(kappa), c2(kappa) from C~ = max(C0, c_hat, c) when ``kappa`` is given, and the
    independent-data constants when ``iid`` is given.
    """
    chain = compute_chain(
        ChainInputs(base=base, p=p, theta_star_norm=theta_star_norm, mixing=mixing, theta0=theta0)
    )
    lam = 0.5 * base.lambda_bar if lam is None else lam
    bias = bias_constants(lam, base, theta0.second_moment())

    kappa_fields: dict = {}
    if kappa is not None:
        log_ct = max(chain.C0.log_value, math.log(bias.c_hat), safe_log(bias.c))
        exponent = 2.0 + kappa
        log_4ct = math.log(4.0) + log_ct
        kappa_fields = {
            "kappa": kappa,
            "C_tilde": ScaledValue.from_log(log_ct),
            "c1_kappa": ScaledValue.from_log(-exponent * log_4ct),
            "c2_kappa": ScaledValue.from_log(
                exponent * log_4ct + math.log1p(math.log(2.0) + log_ct) - math.log(base.a)
            ),
        }

    iid_fields: dict = {}
    if iid is not None:
        plan = plan_iid(iid_epsilon, iid)
        iid_fields = {
            "iid_epsilon": iid_epsilon,
            "lambda0": plan.lambda0,
            "iid_C": plan.iid_C,
            "c0": plan.c0,
            "cbar": plan.cbar,
            "Cbar": plan.Cbar,
            "c1": plan.c1,
            "c2": plan.c2,
        }

    return ConstantReport(
        a=base.a,
        L1=base.L1,
        L2=base.L2,
        d=base.d,
        p=p,
        H_star=base.H_star,
        theta_star_norm=theta_star_norm,
        lambda_bar=base.lambda_bar,
        a_tilde=base.a_tilde,
        mixing=mixing,
        theta0=theta0,
        Cprime=chain.Cprime.C,
        cprime=chain.Cprime.c,
        Cdprime=chain.Cdprime.C,
        cdprime=chain.Cdprime.c,
        Cprime_dominance_ok=chain.Cprime.dominance_ok,
        Cdprime_dominance_ok=chain.Cdprime.dominance_ok,
        Cunder=chain.Cunder,
        Cflat_stmt=chain.Cflat_stmt,
        Cflat_proof=chain.Cflat_proof,
        Cstar=chain.Cstar,
        C0=chain.C0,
        C0_proof=chain.C0_proof,
        C0_gt_Cstar=chain.C0.log_value > safe_log(chain.Cstar),
        c_hat=bias.c_hat,
        c=bias.c,
        c_lambda=lam,
        chain=chain,
        **kappa_fields,
        **iid_fields,
    )
