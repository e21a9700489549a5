"""
Sampler configuration and the step-size guards applied before any run.
"""

import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from langmix.constants.base import ConvexityConstants, compute_base
from langmix.constants.iid import iid_law_moments, lambda0, relaxed_step_bound
from langmix.errors import ContractViolationError, StepSizeError
from langmix.model.oracles import GradientOracle, IIDOracle
from langmix.streams.rng import MAX_SEED
from langmix.streams.spec import LinearProcessSpec


class SamplerConfig(BaseModel):
    """Run parameters shared by every sampler."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    lam: float = Field(..., alias="lambda", gt=0, description="Step size")
    steps: Optional[int] = Field(None, ge=0, description="Horizon N; default from the step size")
    theta0: Optional[List[float]] = Field(None, description="Initial mean; theta* by default")
    theta0_std: float = Field(default=0.0, ge=0, description="Isotropic std of the initial law")
    seed: int = Field(..., ge=0, le=MAX_SEED)
    replicas: int = Field(default=1000, ge=1)
    record_every: int = Field(default=1, ge=1, description="Record stride")

    @field_validator("theta0")
    @classmethod
    def validate_theta0(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        """Initial points must be finite."""
        if v is not None and not all(math.isfinite(x) for x in v):
            raise ValueError("theta0 must be finite")
        return v

    def horizon(self, base: ConvexityConstants) -> int:
        """steps, or ceil((1/(a~ lambda)) ln(1/lambda)) * 3 (at least 1)."""
        if self.steps is not None:
            return self.steps
        raw = math.ceil(math.log(1.0 / self.lam) / (base.a_tilde * self.lam)) * 3
        return max(1, raw)

    def initial_mean(self, oracle: GradientOracle) -> np.ndarray:
        if self.theta0 is None:
            return oracle.theta_star.copy()
        theta0 = np.asarray(self.theta0, dtype=float)
        if theta0.shape != (oracle.d,):
            raise ContractViolationError(
                f"theta0 has {theta0.size} coordinates but the oracle has d={oracle.d}"
            )
        return theta0

    def theta0_offset_norm(self, oracle: GradientOracle) -> float:
        return float(np.linalg.norm(self.initial_mean(oracle) - oracle.theta_star))

    def theta0_second_moment(self, oracle: GradientOracle) -> float:
        """E||theta_0 - theta*||^2."""
        return self.theta0_offset_norm(oracle) ** 2 + oracle.d * self.theta0_std**2

    def record_points(self, horizon: int) -> np.ndarray:
        """0, s, 2s, ... and the final step."""
        points = np.arange(0, horizon + 1, self.record_every)
        if points[-1] != horizon:
            points = np.append(points, horizon)
        return points


def oracle_base(oracle: GradientOracle) -> ConvexityConstants:
    return compute_base(oracle.a, oracle.L1, oracle.L2, oracle.d, oracle.H_star)


def guard_step(
    oracle: GradientOracle, config: SamplerConfig, stream: Optional[LinearProcessSpec] = None
) -> ConvexityConstants:
    """
    Refuse step sizes with lambda >= lambda_bar; i.i.d.-setting oracles driven by a
    stream additionally need lambda <= lambda_0 (or the relaxed bound when rho = 0).

    Raises:
        StepSizeError
    """
    base = oracle_base(oracle)
    base.check_step(config.lam)
    if isinstance(oracle, IIDOracle) and stream is not None:
        law = iid_law_moments(stream, oracle.rho)
        bound = lambda0(oracle.a, oracle.L1, law.growth_2rho)
        if oracle.rho == 0:
            bound = max(bound, relaxed_step_bound(oracle.L1, base.lambda_bar))
        if config.lam > bound:
            raise StepSizeError(
                f"step size {config.lam} exceeds lambda_0 = {bound:.6g} for the i.i.d. setting",
                detail={"lambda": config.lam, "lambda0": bound},
            )
    return base
