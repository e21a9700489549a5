"""
Conditional L-mixing moments of Gaussian linear processes.

Mixing layer is responsible for this module.

All quantities are taken at n = 0, where the conditioning sigma-field is trivial.
For a stationary linear process the residual X_m - E[X_m | eps_{m-tau+1..m}] is
sum_{k >= tau} a_k eps_{m-k}, a centred Gaussian vector with covariance sigma(tau)^2 I_m
whose law does not depend on m, so the sup over m is attained everywhere.
"""

from typing import NamedTuple

import numpy as np
from loguru import logger

from langmix.errors import DomainError, UnsupportedOperationError
from langmix.metrics.inequalities import chi_moment
from langmix.streams.rng import AUX_CHANNEL, STREAM_CHANNEL, make_generator
from langmix.streams.spec import LinearProcessSpec

MIN_MC_PATHS = 1000
BOOTSTRAP_RESAMPLES = 200
# Floats drawn per simulation chunk.
_CHUNK_FLOATS = 1 << 22


class MonteCarloEstimate(NamedTuple):
    estimate: float
    std_error: float


def chi_root(m: int, r: float) -> float:
    """(E||Z||^r)^{1/r} for Z ~ N(0, I_m); ((r-1)!!)^{1/r} when m = 1 and r is even."""
    return chi_moment(m, r) ** (1.0 / r)


def _is_even_order(r: float) -> bool:
    return float(r).is_integer() and int(r) >= 2 and int(r) % 2 == 0


def stationary_moment_root(spec: LinearProcessSpec, r: float) -> float:
    """E^{1/r}||X_0||^r of the stationary law; exact for every r >= 1."""
    if r < 1:
        raise DomainError(f"moment order must be at least 1, got {r}")
    return spec.sigma * chi_root(spec.m, r)


def gamma_linear_analytic(spec: LinearProcessSpec, tau: int, r: float) -> float:
    """
    gamma_r(tau) = sigma(tau) * g_r with sigma(tau)^2 = sum_{k >= tau} a_k^2.

    Raises:
        UnsupportedOperationError: r is not an even integer
        DomainError: tau is negative
    """
    if not _is_even_order(r):
        raise UnsupportedOperationError(
            f"analytic gamma needs an even integer order, got r={r}",
            detail={"hint": "profile_build bounds odd orders by the next even order"},
        )
    if tau < 0:
        raise DomainError(f"lag must be nonnegative, got {tau}")
    return spec.tail_sigma(int(tau)) * chi_root(spec.m, r)


def _simulate_tail_norms(
    spec: LinearProcessSpec, tau: int, paths: int, seed: int
) -> np.ndarray:
    """||sum_{k >= tau} a_k eps_{-k}|| for independent paths."""
    tail = spec.coefficients[tau:]
    per_chunk = max(1, _CHUNK_FLOATS // (tail.size * spec.m))
    norms = np.empty(paths)
    for chunk, start in enumerate(range(0, paths, per_chunk)):
        size = min(per_chunk, paths - start)
        rng = make_generator(seed, chunk, STREAM_CHANNEL)
        eps = rng.standard_normal((size, tail.size, spec.m))
        residual = np.einsum("k,pkm->pm", tail, eps)
        norms[start : start + size] = np.linalg.norm(residual, axis=1)
    return norms


def bootstrap_moment_root(
    values: np.ndarray, r: float, seed: int, resamples: int = BOOTSTRAP_RESAMPLES
) -> float:
    """Bootstrap standard error of mean(values)^{1/r}."""
    rng = make_generator(seed, 0, AUX_CHANNEL)
    n = values.size
    replicates = np.empty(resamples)
    for b in range(resamples):
        idx = rng.integers(0, n, size=n)
        replicates[b] = np.mean(values[idx]) ** (1.0 / r)
    return float(np.std(replicates, ddof=1))


def gamma_mc_estimate(
    spec: LinearProcessSpec,
    tau: int,
    r: float,
    paths: int = 10_000,
    seed: int = 0,
    resamples: int = BOOTSTRAP_RESAMPLES,
) -> MonteCarloEstimate:
    """
    Monte Carlo estimate of gamma_r(tau) with a bootstrap standard error.

    Simulates the residual X_m - sum_{k<tau} a_k eps_{m-k} directly; lags beyond the
    truncation order have an empty tail and return exactly zero.
    """
    if paths < MIN_MC_PATHS:
        raise DomainError(f"gamma_mc_estimate needs at least {MIN_MC_PATHS} paths, got {paths}")
    if r < 1:
        raise DomainError(f"moment order must be at least 1, got {r}")
    if tau < 0:
        raise DomainError(f"lag must be nonnegative, got {tau}")
    if tau > spec.K:
        return MonteCarloEstimate(0.0, 0.0)

    powered = _simulate_tail_norms(spec, int(tau), paths, seed) ** r
    estimate = float(np.mean(powered) ** (1.0 / r))
    std_error = bootstrap_moment_root(powered, r, seed, resamples)
    logger.debug(f"gamma_mc tau={tau} r={r} paths={paths}: {estimate:.6g} +/- {std_error:.2g}")
    return MonteCarloEstimate(estimate, std_error)
