"""
Uniform moment constants of the ULA and SGLD chains.

Constants layer is responsible for this module.

C'(p) bounds the ULA moments and C''(p) the SGLD moments:
sup_n E||theta_n - theta*||^{2p} <= E||theta_0 - theta*||^{2p} + C/a_tilde.
Both are assembled as log-sums since 2^{p(2p-1)} overflows already for moderate p.
The companion roots c'(p), c''(p) dominate C^{1/2p}; dominance is reported, not
enforced, because it is a numerical fact only over a moderate range of a_tilde.
"""

import math

from loguru import logger
from pydantic import BaseModel, Field

from langmix.constants.base import ScaledValue, log_sum, safe_log
from langmix.errors import DomainError

LN2 = math.log(2.0)
DOMINANCE_TOLERANCE = 1e-12


class MomentConstants(BaseModel):
    """A constant C(p) with its dominating root c(p)."""

    p: int
    C: ScaledValue
    c: float
    dominance_ok: bool = Field(..., description="C(p)^{1/2p} <= c(p)")


def _validate(p: int, d: int, a_tilde: float) -> None:
    if int(p) != p or p < 1:
        raise DomainError(f"p must be an integer >= 1, got {p}")
    if d < 1:
        raise DomainError(f"dimension must be positive, got d={d}")
    if a_tilde <= 0:
        raise DomainError(f"a_tilde must be positive, got {a_tilde}")


def _dominance(p: int, C: ScaledValue, c: float, name: str) -> bool:
    ok = C.log_value / (2 * p) <= math.log(c) + DOMINANCE_TOLERANCE
    if not ok:
        logger.warning(f"{name}(p={p})^(1/2p) exceeds its stated root bound {c:.6g}")
    return ok


def log_Cprime(p: int, d: int, a_tilde: float) -> float:
    """
    log C'(p), where

        C'(p) = d^p (2p-1)^p p^p 2^{p(2p-1)} a~^{1-p} + (2p-1) p 2^{3p-2} 2^{2p} d^p p^{3p/2}.
    """
    ld, lp, l2p1 = math.log(d), math.log(p), math.log(2 * p - 1)
    first = p * ld + p * l2p1 + p * lp + p * (2 * p - 1) * LN2 + (1 - p) * math.log(a_tilde)
    second = l2p1 + lp + (3 * p - 2) * LN2 + 2 * p * LN2 + p * ld + 1.5 * p * lp
    return log_sum([first, second])


def cprime(p: int, d: int, a_tilde: float) -> float:
    """c'(p) = p sqrt(d) (2^{p+1/2} a~^{1/2p - 1/2} + 24)."""
    return p * math.sqrt(d) * (2.0 ** (p + 0.5) * a_tilde ** (0.5 / p - 0.5) + 24.0)


def compute_Cprime(p: int, d: int, a_tilde: float) -> MomentConstants:
    """ULA moment constant C'(p) and its root bound c'(p)."""
    _validate(p, d, a_tilde)
    C = ScaledValue.from_log(log_Cprime(p, d, a_tilde))
    c = cprime(p, d, a_tilde)
    return MomentConstants(p=p, C=C, c=c, dominance_ok=_dominance(p, C, c, "Cprime"))


def _log_data_term(
    p: int, L1: float, L2: float, theta_star_norm: float, script_M_2p: float, H_star: float
) -> float:
    """log{2^{2p-1} L1^{2p} ||theta*||^{2p} + 2^{2p-1} L2^{2p} M_2p + H*^{2p}}."""
    two = (2 * p - 1) * LN2
    return log_sum(
        [
            two + 2 * p * (safe_log(L1) + safe_log(theta_star_norm)),
            two + 2 * p * safe_log(L2) + safe_log(script_M_2p),
            2 * p * safe_log(H_star),
        ]
    )


def log_Cdprime(
    p: int,
    d: int,
    a_tilde: float,
    L1: float,
    L2: float,
    theta_star_norm: float,
    script_M_2p: float,
    H_star: float,
) -> float:
    lp, ld, l2p1 = math.log(p), math.log(d), math.log(2 * p - 1)
    l2a = math.log(2.0 / a_tilde)
    noise = [
        p * (2 * p * LN2 + ld + lp + l2p1) + (p - 1) * l2a,
        (5 * p - 4) * LN2 + lp + l2p1 + 2 * p * LN2 + p * ld + 1.5 * p * lp,
    ]
    bracket = log_sum(
        [
            2 * p * math.log(2 * p) + (2 * p - 1) * l2a,
            p * ((2 * p - 1) * LN2 + lp + l2p1) + (p - 1) * l2a,
            (4 * p - 4) * LN2 + lp + l2p1,
        ]
    )
    data = _log_data_term(p, L1, L2, theta_star_norm, script_M_2p, H_star)
    return log_sum(noise + [(2 * p - 1) * LN2 + bracket + data])


def cdprime(
    p: int,
    d: int,
    a_tilde: float,
    L1: float,
    L2: float,
    theta_star_norm: float,
    script_M_2p: float,
    H_star: float,
) -> float:
    """c''(p), with M_2p entering through its 2p-th root."""
    noise = p * math.sqrt(d) * (2.0 ** (p + 0.5) * a_tilde ** (0.5 / p - 0.5) + 48.0)
    factor = (
        4.0 * p / a_tilde ** (1.0 - 0.5 / p)
        + 2.0**p * p * math.sqrt(2.0) * (2.0 / a_tilde) ** (0.5 - 0.5 / p)
        + 12.0
    )
    data = 2.0 * L1 * theta_star_norm + 2.0 * L2 * script_M_2p ** (1.0 / (2 * p)) + H_star
    return noise + 2.0 * factor * data


def compute_Cdprime(
    p: int,
    d: int,
    a_tilde: float,
    L1: float,
    L2: float,
    theta_star_norm: float,
    script_M_2p: float,
    H_star: float = 0.0,
) -> MomentConstants:
    """
    SGLD moment constant C''(p) and its root bound c''(p).

    Args:
        script_M_2p: sup_n E||X_n||^{2p} of the data stream (a power, not a root)
    """
    _validate(p, d, a_tilde)
    if min(L1, L2, theta_star_norm, script_M_2p, H_star) < 0:
        raise DomainError("data-dependent inputs of C''(p) must be nonnegative")
    args = (p, d, a_tilde, L1, L2, theta_star_norm, script_M_2p, H_star)
    C = ScaledValue.from_log(log_Cdprime(*args))
    c = cdprime(*args)
    return MomentConstants(p=p, C=C, c=c, dominance_ok=_dominance(p, C, c, "Cdprime"))
