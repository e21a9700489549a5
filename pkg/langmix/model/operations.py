"""
Oracle evaluation operations.

Model layer is responsible for this module.
"""

from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from langmix.errors import DomainError, UnsupportedOperationError
from langmix.model.oracles import GradientOracle
from langmix.streams.spec import LinearProcessSpec
from langmix.streams.state import stationary_draws


class MeanFieldEstimate(BaseModel):
    """Mean field value h(theta), exact or Monte Carlo."""

    value: List[float] = Field(..., description="h(theta)")
    std_error: List[float] = Field(..., description="Per-coordinate standard error (0 if exact)")
    samples: int = Field(default=0, description="Monte Carlo sample count (0 if exact)")
    closed_form: bool = Field(..., description="True when evaluated from the closed form")


def eval_H(oracle: GradientOracle, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate H(theta, x); raises ContractViolationError on dimension mismatch."""
    return oracle.H(theta, x)


def eval_h(
    oracle: GradientOracle,
    theta: np.ndarray,
    stream: Optional[LinearProcessSpec] = None,
    samples: int = 100_000,
    seed: int = 0,
) -> MeanFieldEstimate:
    """
    Evaluate the mean field h(theta) = E[H(theta, X)].

    The closed form is used when the oracle has one and no stream is supplied; with a
    stream the expectation is estimated from ``samples`` stationary draws.

    Args:
        oracle: Gradient oracle
        theta: Point of evaluation, shape (d,)
        stream: Stream whose stationary law defines the expectation
        samples: Monte Carlo sample count
        seed: RNG seed for the Monte Carlo draws

    Returns:
        MeanFieldEstimate
    """
    theta = np.asarray(theta, dtype=float).reshape(oracle.d)

    if stream is None:
        if not oracle.has_closed_form_h:
            raise UnsupportedOperationError(
                "Oracle has no closed-form mean field; supply a stream and a sample count"
            )
        value = oracle.h(theta)
        return MeanFieldEstimate(
            value=value.tolist(), std_error=[0.0] * oracle.d, closed_form=True
        )

    if samples < 2:
        raise DomainError(f"Monte Carlo estimate needs at least 2 samples, got {samples}")
    if stream.m != oracle.m:
        raise DomainError(f"Stream dimension {stream.m} does not match oracle m={oracle.m}")

    x = stationary_draws(stream, samples, seed)
    values = oracle.H(np.broadcast_to(theta, (samples, oracle.d)), x)
    mean = values.mean(axis=0)
    se = values.std(axis=0, ddof=1) / np.sqrt(samples)
    logger.debug(
        f"Monte Carlo mean field at theta={theta.tolist()}: {mean.tolist()} +/- {se.tolist()}"
    )
    return MeanFieldEstimate(
        value=mean.tolist(), std_error=se.tolist(), samples=samples, closed_form=False
    )
