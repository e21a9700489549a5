"""
Spectral tooling for linear processes.

Streams layer is responsible for this module.

The transfer function A(mu) = sum_k a_k e^{-i mu k} is evaluated on uniform grids by
FFT (exact for grids with at least K+1 nodes) and pointwise otherwise.
"""

import math
from typing import Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field
from scipy.optimize import minimize_scalar

from langmix.errors import DomainError
from langmix.streams.spec import LinearProcessSpec

MIN_GRID = 1024
MIN_QUADRATURE_NODES = 1 << 14
MAX_QUADRATURE_NODES = 1 << 24
_POINTWISE_CHUNK = 4096


class SpectralBounds(BaseModel):
    """Extrema of the spectral density modulus over [-pi, pi]."""

    m_bound: float = Field(..., description="Minimum of |A(mu)| (grid plus local refinement)")
    M_bound: float = Field(..., description="Maximum of |A(mu)|")
    mu_min: float = Field(..., description="Location of the minimum")
    mu_max: float = Field(..., description="Location of the maximum")
    grid: int = Field(..., description="Uniform grid size")
    tolerance: float = Field(
        ...,
        description="Lipschitz bound (pi/grid) * sum k|a_k| on the grid-to-true extremum gap",
    )
    degenerate: bool = Field(
        ..., description="m_bound is zero within tolerance; spectral variance bounds are void"
    )


class CoupledVarianceResult(BaseModel):
    """Spectral quadrature of the coupled-chain variance."""

    value: float
    error_estimate: float = Field(..., description="|T_N - T_{N/2}|")
    nodes: int
    lower: float = Field(..., description="m^2 * closed-form i.i.d. value")
    upper: float = Field(..., description="M^2 * closed-form i.i.d. value")


def _transfer(spec: LinearProcessSpec, mu: np.ndarray) -> np.ndarray:
    a = spec.coefficients
    k = np.arange(a.size)
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    out = np.empty(mu.shape, dtype=complex)
    flat_mu, flat_out = mu.ravel(), out.reshape(-1)
    for start in range(0, flat_mu.size, _POINTWISE_CHUNK):
        block = flat_mu[start : start + _POINTWISE_CHUNK]
        flat_out[start : start + block.size] = np.exp(-1j * np.outer(block, k)) @ a
    return out


def _transfer_grid(spec: LinearProcessSpec, nodes: int) -> np.ndarray:
    """A(2 pi j / nodes) for j = 0..nodes-1."""
    if nodes >= spec.K + 1:
        return np.fft.fft(spec.coefficients, nodes)
    return _transfer(spec, 2.0 * np.pi * np.arange(nodes) / nodes)


def spectral_density_modulus(spec: LinearProcessSpec, mu: float | np.ndarray) -> float | np.ndarray:
    """|sum_k a_k e^{-i mu k}| over the truncated coefficients."""
    value = np.abs(_transfer(spec, mu))
    return float(value[0]) if np.ndim(mu) == 0 else value.reshape(np.shape(mu))


def spectral_bounds(spec: LinearProcessSpec, grid: int = 4096) -> SpectralBounds:
    """
    Minimum and maximum of |A(mu)| over [-pi, pi].

    The modulus is tabulated on ``grid`` uniform nodes (including -pi and 0 for even
    grids) and both extrema are refined by bounded scalar minimisation within one grid
    spacing.
    """
    if grid < MIN_GRID:
        raise DomainError(f"grid must be at least {MIN_GRID}, got {grid}")

    values = np.abs(_transfer_grid(spec, grid))
    mu = 2.0 * np.pi * np.arange(grid) / grid
    mu = np.where(mu >= np.pi, mu - 2.0 * np.pi, mu)
    h = 2.0 * np.pi / grid

    def modulus(t: float) -> float:
        return float(np.abs(_transfer(spec, t))[0])

    i_min, i_max = int(np.argmin(values)), int(np.argmax(values))
    lo = minimize_scalar(modulus, bounds=(mu[i_min] - h, mu[i_min] + h), method="bounded")
    hi = minimize_scalar(lambda t: -modulus(t), bounds=(mu[i_max] - h, mu[i_max] + h),
                         method="bounded")

    m_bound, mu_min = float(values[i_min]), float(mu[i_min])
    if lo.fun < m_bound:
        m_bound, mu_min = float(lo.fun), float(lo.x)
    M_bound, mu_max = float(values[i_max]), float(mu[i_max])
    if -hi.fun > M_bound:
        M_bound, mu_max = float(-hi.fun), float(hi.x)

    k = np.arange(spec.K + 1)
    tolerance = float((np.pi / grid) * np.sum(k * np.abs(spec.coefficients)))
    degenerate = m_bound <= 1e-8 * max(1.0, M_bound)
    if degenerate:
        logger.warning(
            f"Spectral minimum {m_bound:.3e} is zero within tolerance; variance bounds inapplicable"
        )
    return SpectralBounds(
        m_bound=max(0.0, m_bound),
        M_bound=M_bound,
        mu_min=mu_min,
        mu_max=mu_max,
        grid=grid,
        tolerance=tolerance,
        degenerate=degenerate,
    )


def coupled_variance_closed_form(lam: float, n: int) -> float:
    """lambda (1 - (1-lambda)^{2n}) / (2 - lambda): the i.i.d. coupled variance."""
    return lam * (1.0 - (1.0 - lam) ** (2 * n)) / (2.0 - lam)


def _quadrature_nodes(spec: LinearProcessSpec, lam: float, n: int) -> int:
    # The integrand is a trigonometric polynomial of degree K + n - 1; beyond ~40/lambda
    # terms the geometric factor is below double precision.
    effective = spec.K + min(n, math.ceil(40.0 / lam))
    nodes = MIN_QUADRATURE_NODES
    while nodes < 2 * (effective + 1) and nodes < MAX_QUADRATURE_NODES:
        nodes *= 2
    return nodes


def _check_step(lam: float, n: int) -> None:
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")


def _coupled_variance_quadrature(
    spec: LinearProcessSpec, lam: float, n: int
) -> Tuple[float, float, int]:
    """
    (lambda^2 / 2 pi) int |A(mu)|^2 |sum_{k<n} (1-lambda)^k e^{-ik mu}|^2 dmu.

    Composite trapezoid on N uniform nodes (spectrally accurate for this periodic
    integrand) with one Richardson step against the N/2-node rule.
    """
    if n == 0:
        return 0.0, 0.0, 0
    nodes = _quadrature_nodes(spec, lam, n)
    A2 = np.abs(_transfer_grid(spec, nodes)) ** 2
    mu = 2.0 * np.pi * np.arange(nodes) / nodes
    q = 1.0 - lam
    z = q * np.exp(-1j * mu)
    zn = q**n * np.exp(-1j * np.mod(n * mu, 2.0 * np.pi))
    G2 = np.abs((1.0 - zn) / (1.0 - z)) ** 2
    integrand = A2 * G2

    fine = lam * lam * float(np.mean(integrand))
    coarse = lam * lam * float(np.mean(integrand[::2]))
    value = (4.0 * fine - coarse) / 3.0
    return max(0.0, value), abs(fine - coarse), nodes


def spectral_coupled_variance(spec: LinearProcessSpec, lam: float, n: int) -> float:
    """Coupled-chain variance E[(theta_bar_n - theta_n)^2] for H(theta, x) = theta + x."""
    _check_step(lam, n)
    return _coupled_variance_quadrature(spec, lam, n)[0]


def spectral_coupled_variance_detail(
    spec: LinearProcessSpec, lam: float, n: int, bounds: SpectralBounds | None = None
) -> CoupledVarianceResult:
    """Quadrature value with its error estimate and the [m^2, M^2] spectral bracket."""
    _check_step(lam, n)
    if bounds is None:
        bounds = spectral_bounds(spec)
    closed = coupled_variance_closed_form(lam, n)
    value, error, nodes = _coupled_variance_quadrature(spec, lam, n)
    return CoupledVarianceResult(
        value=value,
        error_estimate=error,
        nodes=nodes,
        lower=bounds.m_bound**2 * closed,
        upper=bounds.M_bound**2 * closed,
    )


def autocovariance(spec: LinearProcessSpec, lag: int) -> float:
    """Per-coordinate autocovariance sum_k a_k a_{k+lag}."""
    lag = abs(int(lag))
    a = spec.coefficients
    if lag > spec.K:
        return 0.0
    return float(np.dot(a[: a.size - lag], a[lag:]))


def parseval_check(
    spec: LinearProcessSpec, nodes: int = MIN_QUADRATURE_NODES
) -> Tuple[float, float]:
    """(quadrature of (1/2 pi) int |A|^2, direct sum a_k^2)."""
    quadrature = float(np.mean(np.abs(_transfer_grid(spec, max(nodes, spec.K + 1))) ** 2))
    return quadrature, float(np.sum(spec.coefficients**2))
