"""
Auxiliary inequalities used in the moment estimates.

Metrics layer is responsible for this module.
"""

import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import gammaln

from langmix.errors import DomainError


class GaussianMomentCheck(BaseModel):
    """E||xi||^{2r} for a standard Gaussian xi in R^d against its polynomial bound."""

    d: int
    r: int
    exact: float = Field(..., description="2^r Gamma(d/2 + r) / Gamma(d/2)")
    bound: float = Field(..., description="2^{2r} d^r r^{3r/2}")
    holds: bool


class MultinomialCheck(BaseModel):
    """Both sides of the trinomial expansion inequality."""

    p: int
    lhs: float = Field(..., description="Trinomial sum without the (p-1, 1, 0) term")
    rhs: float = Field(..., description="sum_{k != 1} C(2p, k) ||x||^{2p-k} ||y||^k")
    rhs_restricted: float = Field(
        ..., description="The same sum with <x, y> replaced by ||x|| ||y||"
    )
    passed: bool


class MaximalMomentCheck(BaseModel):
    """E max_{i<=j} ||X_i||^r against j^{r/p} (max_i E||X_i||^p)^{r/p}."""

    r: float
    p: float
    j: int
    lhs: float
    rhs: float
    passed: bool


def chi_moment(d: int, order: float) -> float:
    """E||xi||^order for xi ~ N(0, I_d): 2^{order/2} Gamma((d + order)/2) / Gamma(d/2)."""
    if d < 1:
        raise DomainError(f"dimension must be positive, got {d}")
    if order <= -d:
        raise DomainError(f"moment of order {order} does not exist in dimension {d}")
    log_moment = 0.5 * order * math.log(2.0) + gammaln(0.5 * (d + order)) - gammaln(0.5 * d)
    return float(np.exp(log_moment))


def gaussian_norm_moment(d: int, r: int) -> GaussianMomentCheck:
    """Exact 2r-th moment of ||xi|| and the bound 2^{2r} d^r r^{3r/2}."""
    if d < 1 or r < 1:
        raise DomainError(f"d and r must be positive integers, got d={d}, r={r}")
    exact = chi_moment(d, 2 * r)
    bound = float(2.0 ** (2 * r) * float(d) ** r * float(r) ** (1.5 * r))
    return GaussianMomentCheck(d=d, r=r, exact=exact, bound=bound, holds=exact <= bound)


def multinomial_inequality_check(
    x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray, p: int
) -> MultinomialCheck:
    """
    Compare the expansion of ||x + y||^{2p} without its (i, j, k) = (p-1, 1, 0) term,

        sum p!/(i! j! k!) ||x||^{2i} (2<x,y>)^j ||y||^{2k},   i + j + k = p,

    with sum_{k=0, k!=1}^{2p} C(2p, k) ||x||^{2p-k} ||y||^k. The two sides agree once
    <x,y> is replaced by ||x|| ||y||, which is ``rhs_restricted``.
    """
    if p < 1:
        raise DomainError(f"p must be at least 1, got {p}")
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
    inner = float(np.dot(x, y))

    lhs = 0.0
    restricted = 0.0
    for i in range(p + 1):
        for j in range(p - i + 1):
            if i == p - 1 and j == 1:
                continue
            k = p - i - j
            coeff = math.factorial(p) / (math.factorial(i) * math.factorial(j) * math.factorial(k))
            base = coeff * nx ** (2 * i) * ny ** (2 * k)
            lhs += base * (2.0 * inner) ** j
            restricted += base * (2.0 * nx * ny) ** j

    rhs = sum(
        math.comb(2 * p, k) * nx ** (2 * p - k) * ny**k for k in range(2 * p + 1) if k != 1
    )
    passed = lhs <= rhs * (1.0 + 1e-12) + 1e-300
    return MultinomialCheck(p=p, lhs=lhs, rhs=rhs, rhs_restricted=restricted, passed=passed)


def maximal_moment_check(samples: np.ndarray, r: float, p: float) -> MaximalMomentCheck:
    """
    Maximal moment bound on an empirical sample.

    ``samples`` has shape (replicas, j) or (replicas, j, d). The bound holds for every
    law, the empirical one included, so the comparison carries no Monte Carlo error.
    """
    if not 0.0 < r < p:
        raise DomainError(f"need 0 < r < p, got r={r}, p={p}")
    arr = np.asarray(samples, dtype=float)
    norms = np.abs(arr) if arr.ndim == 2 else np.linalg.norm(arr, axis=-1)
    j = norms.shape[1]
    lhs = float(np.mean(np.max(norms, axis=1) ** r))
    M = float(np.max(np.mean(norms**p, axis=0)))
    rhs = float(j ** (r / p) * M ** (r / p))
    return MaximalMomentCheck(r=r, p=p, j=j, lhs=lhs, rhs=rhs, passed=lhs <= rhs * (1.0 + 1e-12))
