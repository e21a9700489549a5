"""
Monte Carlo checks of the moment inequalities for weighted sums of a mixing stream.

Mixing layer is responsible for this module.

For centred X and weights b_1..b_m:

    E^{1/r} |sum_i b_i X_i|^r               <= sqrt(r-1) ||b|| (M_r + Gamma_r)
    E^{1/r} max_k |sum_{i<=k} b_i X_i|^r    <= C'(r) ||b|| (M_r + Gamma_r),
    C'(r) = sqrt(r-1) / (2^{1/2} - 2^{1/r}),  r > 2.
"""

import math
from typing import Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from langmix.errors import DomainError
from langmix.mixing.profile import MixingProfile, profile_build
from langmix.streams.spec import LinearProcessSpec
from langmix.streams.state import stream_init, stream_take

# Floats held per replica chunk.
_CHUNK_FLOATS = 1 << 22


class InequalityReport(BaseModel):
    """Both sides of a weighted-sum moment inequality."""

    kind: str = Field(..., description="maximal or moment")
    r: float
    lhs: float = Field(..., description="Monte Carlo E^{1/r} of the left-hand side")
    lhs_std_error: float = Field(..., description="Delta-method standard error of lhs")
    rhs: float
    constant: float = Field(..., description="C'(r) or C(r)")
    weight_norm: float
    M_r: float
    Gamma_r: float
    replicas: int
    passed: bool = Field(..., description="lhs - 3 SE <= rhs")


def maximal_constant(r: float) -> float:
    """C'(r) = sqrt(r-1) / (2^{1/2} - 2^{1/r}); diverges at r = 2."""
    if r <= 2:
        raise DomainError(f"maximal inequality needs r > 2, got {r}")
    return math.sqrt(r - 1.0) / (math.sqrt(2.0) - 2.0 ** (1.0 / r))


def moment_constant(r: float) -> float:
    """C(r) = sqrt(r-1)."""
    if r < 2:
        raise DomainError(f"moment inequality needs r >= 2, got {r}")
    return math.sqrt(r - 1.0)


def _weighted_statistic(
    weights: np.ndarray,
    spec: LinearProcessSpec,
    r: float,
    replicas: int,
    seed: int,
    maximal: bool,
) -> np.ndarray:
    """Per-replica |S|^r, where S is the full weighted sum or its running maximum."""
    steps = weights.size
    per_chunk = max(1, _CHUNK_FLOATS // max(1, steps * spec.m))
    out = np.empty(replicas)
    for chunk, start in enumerate(range(0, replicas, per_chunk)):
        size = min(per_chunk, replicas - start)
        state = stream_init(spec, seed, paths=size, keys=(chunk,))
        values = stream_take(state, spec, steps)
        partial = np.cumsum(weights[:, None, None] * values, axis=0)
        norms = np.linalg.norm(partial, axis=2)
        stat = norms.max(axis=0) if maximal else norms[-1]
        out[start : start + size] = stat**r
    return out


def _moment_root_with_error(powered: np.ndarray, r: float) -> tuple[float, float]:
    mean = float(np.mean(powered))
    if mean <= 0.0:
        return 0.0, 0.0
    se_mean = float(np.std(powered, ddof=1) / math.sqrt(powered.size))
    root = mean ** (1.0 / r)
    return root, root / (r * mean) * se_mean


def _run_check(
    kind: str,
    weights: Sequence[float] | np.ndarray,
    spec: LinearProcessSpec,
    r: float,
    replicas: int,
    seed: int,
    constant: float,
    profile: MixingProfile | None,
) -> InequalityReport:
    b = np.asarray(weights, dtype=float).ravel()
    if b.size == 0:
        raise DomainError("weights must be nonempty")
    if replicas < 2:
        raise DomainError(f"replicas must be at least 2, got {replicas}")

    profile = profile or profile_build(spec, r)
    gamma_r = profile.Gamma_r_upper if profile.Gamma_r_upper is not None else profile.Gamma_r
    weight_norm = float(np.linalg.norm(b))
    rhs = constant * weight_norm * (profile.M_r + gamma_r)

    if weight_norm == 0.0:
        lhs, se = 0.0, 0.0
    else:
        powered = _weighted_statistic(b, spec, r, replicas, seed, maximal=kind == "maximal")
        lhs, se = _moment_root_with_error(powered, r)

    passed = lhs - 3.0 * se <= rhs
    logger.debug(f"{kind} inequality r={r}: lhs={lhs:.6g} (se {se:.2g}) rhs={rhs:.6g}")
    return InequalityReport(
        kind=kind,
        r=r,
        lhs=lhs,
        lhs_std_error=se,
        rhs=rhs,
        constant=constant,
        weight_norm=weight_norm,
        M_r=profile.M_r,
        Gamma_r=gamma_r,
        replicas=replicas,
        passed=passed,
    )


def maximal_inequality_check(
    weights: Sequence[float] | np.ndarray,
    spec: LinearProcessSpec,
    r: float,
    replicas: int = 20_000,
    seed: int = 0,
    profile: MixingProfile | None = None,
) -> InequalityReport:
    """
    E^{1/r} max_k |sum_{i<=k} b_i X_i|^r against C'(r) ||b|| (M_r + Gamma_r).

    The stream must be centred; linear processes with Gaussian innovations are.

    Raises:
        DomainError: r <= 2
    """
    return _run_check(
        "maximal", weights, spec, r, replicas, seed, maximal_constant(r), profile
    )


def moment_inequality_check(
    weights: Sequence[float] | np.ndarray,
    spec: LinearProcessSpec,
    r: float,
    replicas: int = 20_000,
    seed: int = 0,
    profile: MixingProfile | None = None,
) -> InequalityReport:
    """E^{1/r} |sum_i b_i X_i|^r against sqrt(r-1) ||b|| (M_r + Gamma_r), for r >= 2."""
    return _run_check("moment", weights, spec, r, replicas, seed, moment_constant(r), profile)
