"""
Wasserstein-2 distances.

Metrics layer is responsible for this module.

Every distance returned here is exact for its inputs: monotone coupling in one
dimension, the Bures formula for Gaussians and optimal assignment for small point
clouds. No entropic or sliced approximation is used.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from scipy.stats import norm

from langmix.errors import DomainError
from langmix.metrics.measures import EmpiricalMeasure, GaussianLaw

MAX_ASSIGNMENT_SIZE = 2048
EIGEN_CLAMP = 1e-12


def _as_measure(mu: EmpiricalMeasure | np.ndarray) -> EmpiricalMeasure:
    return mu if isinstance(mu, EmpiricalMeasure) else EmpiricalMeasure(mu)


def w2_empirical_1d(mu: EmpiricalMeasure | np.ndarray, nu: EmpiricalMeasure | np.ndarray) -> float:
    """
    Exact W2 between two 1-D empirical measures via the quantile coupling.

    Equal sizes pair sorted samples; unequal sizes integrate the squared difference of
    the two piecewise-constant quantile functions over the merged breakpoints.
    """
    mu, nu = _as_measure(mu), _as_measure(nu)
    if mu.d != 1 or nu.d != 1:
        raise DomainError("w2_empirical_1d needs one-dimensional samples")

    a = np.sort(mu.samples[:, 0])
    b = np.sort(nu.samples[:, 0])
    if a.size == b.size:
        return float(np.sqrt(np.mean((a - b) ** 2)))

    breaks = np.union1d(np.arange(1, a.size + 1) / a.size, np.arange(1, b.size + 1) / b.size)
    lefts = np.concatenate([[0.0], breaks[:-1]])
    mids = 0.5 * (lefts + breaks)
    ia = np.minimum((mids * a.size).astype(int), a.size - 1)
    ib = np.minimum((mids * b.size).astype(int), b.size - 1)
    return float(np.sqrt(np.sum((breaks - lefts) * (a[ia] - b[ib]) ** 2)))


def w2_to_gaussian_1d(samples: EmpiricalMeasure | np.ndarray, mean: float, std: float) -> float:
    """
    Exact W2 between a 1-D empirical measure and N(mean, std^2).

    On each quantile cell (t_i, t_{i+1}] the empirical quantile is the sorted sample x_i
    and the Gaussian quantile integrals have closed forms in terms of phi(z):
    int Q = mean*dt + std*(phi(z_i) - phi(z_{i+1})),
    int Q^2 = mean^2 dt + 2 mean std (phi(z_i) - phi(z_{i+1}))
              + std^2 (dt + z_i phi(z_i) - z_{i+1} phi(z_{i+1})).
    """
    measure = _as_measure(samples)
    if measure.d != 1:
        raise DomainError("w2_to_gaussian_1d needs one-dimensional samples")
    if std < 0:
        raise DomainError(f"std must be nonnegative, got {std}")

    x = np.sort(measure.samples[:, 0])
    n = x.size
    if std == 0.0:
        return float(np.sqrt(np.mean((x - mean) ** 2)))

    z = norm.ppf(np.arange(n + 1) / n)
    pdf = norm.pdf(z)
    with np.errstate(invalid="ignore"):
        zpdf = np.where(np.isfinite(z), z * pdf, 0.0)
    dt = 1.0 / n
    int_q = mean * dt + std * (pdf[:-1] - pdf[1:])
    int_q2 = (
        mean * mean * dt
        + 2.0 * mean * std * (pdf[:-1] - pdf[1:])
        + std * std * (dt + zpdf[:-1] - zpdf[1:])
    )
    w2sq = float(np.sum(x * x * dt - 2.0 * x * int_q + int_q2))
    return float(np.sqrt(max(0.0, w2sq)))


def w2_to_gaussian_diagonal(samples: EmpiricalMeasure | np.ndarray, law: GaussianLaw) -> float:
    """Per-coordinate quantile distance sqrt(sum_i W2(marginal_i, N(mean_i, var_i))^2)."""
    measure = _as_measure(samples)
    if measure.d != law.d:
        raise DomainError(f"sample dimension {measure.d} does not match law dimension {law.d}")
    std = law.std()
    total = sum(
        w2_to_gaussian_1d(measure.samples[:, i], law.mean[i], std[i]) ** 2 for i in range(law.d)
    )
    return float(np.sqrt(total))


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Symmetric square root via eigendecomposition, eigenvalues clamped at zero."""
    eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (matrix + matrix.T))
    eigenvalues = np.where(eigenvalues < EIGEN_CLAMP, 0.0, eigenvalues)
    return (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.T


def w2_gaussian(p: GaussianLaw, q: GaussianLaw) -> float:
    """Bures-Wasserstein distance between two Gaussian laws."""
    if p.d != q.d:
        raise DomainError(f"dimension mismatch: {p.d} vs {q.d}")
    mean_term = float(np.sum((p.mean - q.mean) ** 2))

    if p.is_diagonal and q.is_diagonal:
        cov_term = float(np.sum((p.std() - q.std()) ** 2))
    else:
        root_q = psd_sqrt(q.cov)
        cross = psd_sqrt(root_q @ p.cov @ root_q)
        cov_term = float(np.trace(p.cov) + np.trace(q.cov) - 2.0 * np.trace(cross))
    return float(np.sqrt(max(0.0, mean_term + cov_term)))


def w2_assignment(mu: EmpiricalMeasure | np.ndarray, nu: EmpiricalMeasure | np.ndarray) -> float:
    """
    Exact discrete W2 between equal-size uniform point clouds by optimal assignment.

    Refuses inputs above 2048 points (the solver is cubic); subsample first.
    """
    mu, nu = _as_measure(mu), _as_measure(nu)
    if mu.n != nu.n:
        raise DomainError(
            f"w2_assignment needs equal sample counts ({mu.n} vs {nu.n}); "
            "subsample the larger set to a common size"
        )
    if mu.n > MAX_ASSIGNMENT_SIZE:
        raise DomainError(
            f"w2_assignment supports at most {MAX_ASSIGNMENT_SIZE} points, got {mu.n}; "
            "subsample both sets or use w2_empirical_1d in one dimension"
        )
    if mu.d != nu.d:
        raise DomainError(f"dimension mismatch: {mu.d} vs {nu.d}")

    cost = cdist(mu.samples, nu.samples, metric="sqeuclidean")
    rows, cols = linear_sum_assignment(cost)
    return float(np.sqrt(cost[rows, cols].mean()))
