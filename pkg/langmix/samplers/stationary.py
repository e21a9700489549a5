"""
Closed-form laws of the Gaussian ULA chain for quadratic oracles.

With h(theta) = S(theta - theta*) the chain is linear, so the law at every step and
the invariant law are Gaussian and diagonal in the eigenbasis of S.
"""

from typing import Optional, Sequence

import numpy as np

from langmix.errors import HypothesisViolationError, UnsupportedOperationError
from langmix.metrics.measures import GaussianLaw
from langmix.model.oracles import GradientOracle, QuadraticOracle


def _require_quadratic(oracle: GradientOracle) -> QuadraticOracle:
    if not isinstance(oracle, QuadraticOracle):
        raise UnsupportedOperationError(
            "closed-form ULA laws need a quadratic oracle (Gaussian target)"
        )
    return oracle


def _eigen_variances(oracle: QuadraticOracle, lam: float) -> np.ndarray:
    """v_i = 2 lambda / (1 - (1 - lambda s_i)^2) per eigenvalue s_i of S."""
    if lam <= 0:
        raise HypothesisViolationError(f"step size must be positive, got {lam}")
    s = oracle.eigenvalues
    if np.any(lam * s >= 2.0):
        raise HypothesisViolationError(
            f"ULA diverges: lambda * s_max = {lam * s.max():.6g} >= 2",
            detail={"lambda": lam, "s_max": float(s.max())},
        )
    return 2.0 * lam / (1.0 - (1.0 - lam * s) ** 2)


def _in_eigenbasis(oracle: QuadraticOracle, diag: np.ndarray) -> np.ndarray:
    Q = oracle.eigenvectors
    return (Q * diag) @ Q.T


def stationary_ula_gaussian(oracle: GradientOracle, lam: float) -> GaussianLaw:
    """
    Invariant law pi_lambda = N(theta*, V) of ULA, V = (I - lam S) V (I - lam S)^T + 2 lam I.

    The fixed point exists whenever lam s_i < 2, so lam >= lambda_bar is accepted here;
    bounds that need lam < lambda_bar check it themselves.

    Raises:
        UnsupportedOperationError: oracle is not quadratic
        HypothesisViolationError: lambda s_i >= 2 for some eigenvalue
    """
    quadratic = _require_quadratic(oracle)
    cov = _in_eigenbasis(quadratic, _eigen_variances(quadratic, lam))
    return GaussianLaw(quadratic.theta_star, cov)


def target_law(oracle: GradientOracle) -> GaussianLaw:
    """pi = N(theta*, S^{-1})."""
    quadratic = _require_quadratic(oracle)
    return GaussianLaw(quadratic.theta_star, _in_eigenbasis(quadratic, 1.0 / quadratic.eigenvalues))


def ula_law_at(
    oracle: GradientOracle,
    lam: float,
    n: int,
    theta0: Optional[Sequence[float] | np.ndarray] = None,
) -> GaussianLaw:
    """Law of the ULA chain after n steps from the point mass at theta0 (theta* by default)."""
    quadratic = _require_quadratic(oracle)
    v = _eigen_variances(quadratic, lam)
    factor = 1.0 - lam * quadratic.eigenvalues
    Q = quadratic.eigenvectors

    start = quadratic.theta_star if theta0 is None else np.asarray(theta0, dtype=float)
    offset = Q.T @ (start - quadratic.theta_star)
    mean = quadratic.theta_star + Q @ (factor**n * offset)
    cov = _in_eigenbasis(quadratic, v * (1.0 - factor ** (2 * n)))
    return GaussianLaw(mean, cov)
