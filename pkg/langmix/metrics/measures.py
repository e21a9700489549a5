"""
Probability laws compared by the Wasserstein estimators.
"""

from typing import Sequence

import numpy as np

from langmix.errors import DomainError

PSD_TOLERANCE = 1e-10


class EmpiricalMeasure:
    """Uniformly weighted point cloud of n points in R^d."""

    def __init__(self, samples: Sequence[float] | np.ndarray):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DomainError(f"samples must be a 1-D or 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DomainError("empirical measure needs at least one point")
        if not np.all(np.isfinite(arr)):
            raise DomainError("empirical measure has non-finite coordinates")
        self.samples = arr

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        return self.samples.shape[1]


class GaussianLaw:
    """N(mean, cov) with a symmetric positive semi-definite covariance."""

    def __init__(self, mean: Sequence[float] | np.ndarray, cov: Sequence | np.ndarray | float):
        mean_arr = np.atleast_1d(np.asarray(mean, dtype=float))
        cov_arr = np.atleast_2d(np.asarray(cov, dtype=float))
        d = mean_arr.size
        if cov_arr.shape == (1, 1) and d > 1:
            cov_arr = cov_arr[0, 0] * np.eye(d)
        if cov_arr.shape != (d, d):
            raise DomainError(f"covariance shape {cov_arr.shape} does not match mean dimension {d}")
        if not np.allclose(cov_arr, cov_arr.T, atol=PSD_TOLERANCE):
            raise DomainError("covariance must be symmetric")
        scale = max(1.0, float(np.max(np.abs(cov_arr))))
        if np.linalg.eigvalsh(cov_arr).min() < -PSD_TOLERANCE * scale:
            raise DomainError("covariance is not positive semi-definite")
        self.mean = mean_arr
        self.cov = 0.5 * (cov_arr + cov_arr.T)

    @property
    def d(self) -> int:
        return self.mean.size

    @property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.cov == np.diag(np.diag(self.cov))))

    def std(self) -> np.ndarray:
        """Per-coordinate standard deviations."""
        return np.sqrt(np.clip(np.diag(self.cov), 0.0, None))
