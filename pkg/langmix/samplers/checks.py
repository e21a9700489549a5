"""
Empirical checks of the drift, moment, contraction and convergence bounds.

Monte Carlo quantities carry a 3 SE slack; closed-form comparisons are exact up to a
relative tolerance of 1e-9.
"""

import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from langmix.constants.base import ConvexityConstants, ScaledValue
from langmix.errors import DomainError
from langmix.metrics.wasserstein import w2_gaussian
from langmix.model.oracles import GradientOracle
from langmix.samplers.chains import CoupledStats, TraceSummary
from langmix.samplers.stationary import stationary_ula_gaussian, ula_law_at

SE_SLACK = 3.0
_REL_TOL = 1e-9


class BoundCheck(BaseModel):
    """Pointwise comparison of an empirical trace against a bound."""

    name: str
    n: List[int]
    observed: List[float]
    bound: List[float]
    margin: float = Field(..., description="min over n of (bound + slack - observed)")
    passed: bool


def _check(
    name: str, n: Sequence[int], observed: np.ndarray, bound: np.ndarray, slack: np.ndarray
) -> BoundCheck:
    margins = bound + slack + _REL_TOL * np.maximum(np.abs(bound), 1.0) - observed
    return BoundCheck(
        name=name,
        n=[int(k) for k in n],
        observed=observed.tolist(),
        bound=bound.tolist(),
        margin=float(np.min(margins)) if margins.size else math.inf,
        passed=bool(np.all(margins >= 0.0)),
    )


def drift_check(
    name: str, n: Sequence[int], trace: TraceSummary, rho: float, lam: float, C: float
) -> BoundCheck:
    """
    E V(n_{i+1}) <= rho^s E V(n_i) + lam C sum_{j<s} rho^j with s = n_{i+1} - n_i.

    The one-step drift inequality iterated over the record stride.
    """
    if not 0.0 < rho < 1.0:
        raise DomainError(f"contraction factor must lie in (0, 1), got {rho}")
    points = np.asarray(n)
    mean, se = np.asarray(trace.mean), np.asarray(trace.se)
    stride = np.diff(points)
    decay = rho**stride
    geometric = (1.0 - decay) / (1.0 - rho)
    bound = decay * mean[:-1] + lam * C * geometric
    slack = SE_SLACK * np.sqrt(se[1:] ** 2 + (decay * se[:-1]) ** 2)
    return _check(name, points[1:], mean[1:], bound, slack)


def sup_bound_check(
    name: str, n: Sequence[int], trace: TraceSummary, bound: ScaledValue
) -> BoundCheck:
    """Every recorded mean stays below a uniform-in-n bound."""
    mean = np.asarray(trace.mean)
    limit = math.inf if bound.value is None else bound.value
    return _check(name, n, mean, np.full(mean.shape, limit), SE_SLACK * np.asarray(trace.se))


def coupled_envelope_check(stats: CoupledStats, C0: ScaledValue, p: int) -> BoundCheck:
    """sup_{n <= N} ||theta_n - theta_bar_n||_2 <= C0(p) lambda^{1/2 - 1/p}."""
    lam = stats.info.lam
    observed = np.sqrt(np.asarray(stats.sup_so_far))
    log_bound = C0.log_value + (0.5 - 1.0 / p) * math.log(lam)
    limit = math.exp(log_bound) if log_bound < 700 else math.inf
    se = np.asarray(stats.se)
    # delta method on the square root
    slack = SE_SLACK * se / (2.0 * np.maximum(observed, 1e-300))
    slack = np.where(observed > 0, slack, 0.0)
    return _check(f"envelope_p{p}", stats.n, observed, np.full(observed.shape, limit), slack)


def ula_second_moment_bound(
    base: ConvexityConstants, lam: float, n: np.ndarray, offset_sq: float
) -> np.ndarray:
    """(1 - 2 a~ lam)^n E||theta_0 - theta*||^2 + (d/a~)(1 - (1 - 2 a~ lam)^n)."""
    factor = 1.0 - 2.0 * base.a_tilde * lam
    power = factor ** np.asarray(n, dtype=float)
    return power * offset_sq + (base.d / base.a_tilde) * (1.0 - power)


def ula_second_moment_check(
    base: ConvexityConstants,
    lam: float,
    n: Sequence[int],
    trace: TraceSummary,
    offset_sq: float,
) -> List[BoundCheck]:
    """Transient and stationary (d/a~) second-moment bounds of ULA."""
    points = np.asarray(n)
    mean, se = np.asarray(trace.mean), SE_SLACK * np.asarray(trace.se)
    transient = ula_second_moment_bound(base, lam, points, offset_sq)
    stationary = np.full(mean.shape, max(offset_sq, base.d / base.a_tilde))
    return [
        _check("ula_second_moment", points, mean, transient, se),
        _check("ula_stationary_second_moment", points, mean, stationary, se),
    ]


def iid_second_moment_check(
    a: float, lam: float, n: Sequence[int], trace: TraceSummary, offset_sq: float, C: float
) -> BoundCheck:
    """(1 - lam a)^n E||theta_0 - theta*||^2 + C/a for the i.i.d. setting."""
    points = np.asarray(n, dtype=float)
    bound = (1.0 - lam * a) ** points * offset_sq + C / a
    return _check(
        "iid_second_moment", n, np.asarray(trace.mean), bound, SE_SLACK * np.asarray(trace.se)
    )


def geometric_convergence_check(
    oracle: GradientOracle,
    base: ConvexityConstants,
    lam: float,
    n: Sequence[int],
    theta0: Optional[Sequence[float]] = None,
) -> BoundCheck:
    """
    W2(law of ULA at step n from theta0, pi_lambda)
        <= e^{-a~ lam n} sqrt(2) (||theta0 - theta*||^2 + d/a~)^{1/2}.

    Both laws are Gaussian, so the left side is exact.
    """
    stationary = stationary_ula_gaussian(oracle, lam)
    start = oracle.theta_star if theta0 is None else np.asarray(theta0, dtype=float)
    radius = float(np.sum((start - oracle.theta_star) ** 2)) + base.d / base.a_tilde
    points = np.asarray(n)
    observed = np.array(
        [w2_gaussian(ula_law_at(oracle, lam, int(k), start), stationary) for k in points]
    )
    bound = np.exp(-base.a_tilde * lam * points) * math.sqrt(2.0 * radius)
    return _check("geometric_convergence", points, observed, bound, np.zeros_like(observed))
