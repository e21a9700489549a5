"""
One-step Langevin updates. Arrays may carry leading replica axes.
"""

import math

import numpy as np

from langmix.errors import UnsupportedOperationError
from langmix.model.oracles import GradientOracle


def ula_step(theta: np.ndarray, oracle: GradientOracle, lam: float, xi: np.ndarray) -> np.ndarray:
    """theta - lambda h(theta) + sqrt(2 lambda) xi."""
    if not oracle.has_closed_form_h:
        raise UnsupportedOperationError("ULA needs a closed-form mean field h")
    theta = np.asarray(theta, dtype=float)
    return theta - lam * oracle.h(theta) + math.sqrt(2.0 * lam) * np.asarray(xi, dtype=float)


def sgld_step(
    theta: np.ndarray, oracle: GradientOracle, lam: float, x_next: np.ndarray, xi: np.ndarray
) -> np.ndarray:
    """theta - lambda H(theta, x_next) + sqrt(2 lambda) xi."""
    theta = np.asarray(theta, dtype=float)
    return (
        theta - lam * oracle.H(theta, x_next) + math.sqrt(2.0 * lam) * np.asarray(xi, dtype=float)
    )
