"""
Block-auxiliary diagnostic.

Time is cut into blocks of length T = floor(1/lambda). On each block the auxiliary
process z restarts from the SGLD iterate at the block start and then follows ULA with
the shared noise, which splits the coupled distance into an SGLD-to-z gap and a
z-to-ULA gap.
"""

from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from langmix.errors import HypothesisViolationError, UnsupportedOperationError
from langmix.model.oracles import GradientOracle
from langmix.samplers.config import SamplerConfig, guard_step
from langmix.samplers.engine import BlockResult, Moments, chunk_bounds, run_blocks
from langmix.samplers.steps import sgld_step, ula_step
from langmix.streams.rng import INIT_CHANNEL, NOISE_CHANNEL, make_generator
from langmix.streams.spec import LinearProcessSpec
from langmix.streams.state import stream_init, stream_take

_TRACES = ("sgld_aux", "aux_ula", "sgld_ula")
_TRIANGLE_SLACK = 1e-9


class BlockDiagnostics(BaseModel):
    """Per-record mean-square gaps of the three processes."""

    lam: float
    block_length: int = Field(..., description="T = floor(1/lambda)")
    horizon: int
    replicas: int
    seed: int
    n: List[int]
    sgld_aux: List[float] = Field(..., description="E||theta_k - z_k||^2")
    sgld_aux_se: List[float]
    aux_ula: List[float] = Field(..., description="E||z_k - theta_bar_k||^2")
    aux_ula_se: List[float]
    sgld_ula: List[float] = Field(..., description="E||theta_k - theta_bar_k||^2")
    sgld_ula_se: List[float]
    boundary_gap_max: float = Field(..., description="Largest sgld_aux value at a block start")
    triangle_ok: bool = Field(
        ..., description="L2 triangle inequality between the three gaps at every record"
    )


def run_auxiliary_blocks(
    oracle: GradientOracle,
    spec: LinearProcessSpec,
    config: SamplerConfig,
    threads: Optional[int] = None,
) -> BlockDiagnostics:
    """
    Simulate SGLD, ULA and the restarted auxiliary process side by side.

    Raises:
        HypothesisViolationError: lambda > 1 (empty blocks)
        StepSizeError: lambda >= lambda_bar
    """
    if config.lam > 1.0:
        raise HypothesisViolationError(
            f"block diagnostic needs lambda <= 1 so that T = floor(1/lambda) >= 1, "
            f"got {config.lam}"
        )
    if not oracle.has_closed_form_h:
        raise UnsupportedOperationError("block diagnostic needs a closed-form mean field h")
    base = guard_step(oracle, config, spec)
    horizon = config.horizon(base)
    T = int(np.floor(1.0 / config.lam))
    records = config.record_points(horizon)
    index = {int(n): i for i, n in enumerate(records)}
    if T == 1:
        logger.warning("Block length T = 1: the auxiliary process restarts every step")

    def task(block: int, size: int) -> BlockResult:
        lam, seed = config.lam, config.seed
        init_rng = make_generator(seed, block, INIT_CHANNEL)
        noise = make_generator(seed, block, NOISE_CHANNEL)
        theta = np.broadcast_to(config.initial_mean(oracle), (size, oracle.d)).copy()
        if config.theta0_std > 0:
            theta = theta + config.theta0_std * init_rng.standard_normal((size, oracle.d))
        theta_bar = theta.copy()
        z = theta.copy()
        state = stream_init(spec, seed, paths=size, keys=(block,))
        result = BlockResult(
            count=size, traces={name: Moments.zeros(len(records)) for name in _TRACES}
        )

        def record(n: int) -> None:
            i = index[n]
            result.traces["sgld_aux"].add(i, np.sum((theta - z) ** 2, axis=1))
            result.traces["aux_ula"].add(i, np.sum((z - theta_bar) ** 2, axis=1))
            result.traces["sgld_ula"].add(i, np.sum((theta - theta_bar) ** 2, axis=1))

        record(0)
        for start, stop in chunk_bounds(horizon):
            xs = stream_take(state, spec, stop - start)
            xis = noise.standard_normal((stop - start, size, oracle.d))
            for j in range(stop - start):
                theta = sgld_step(theta, oracle, lam, xs[j], xis[j])
                theta_bar = ula_step(theta_bar, oracle, lam, xis[j])
                z = ula_step(z, oracle, lam, xis[j])
                n = start + j + 1
                if n % T == 0:
                    z = theta.copy()
                if n in index:
                    record(n)
        return result

    result = run_blocks(task, config.replicas, threads)
    stats = {name: result.traces[name].mean_se() for name in _TRACES}

    sgld_aux, aux_ula, sgld_ula = (stats[name][0] for name in _TRACES)
    boundary = records % T == 0
    rhs = np.sqrt(sgld_aux) + np.sqrt(aux_ula)
    triangle = np.sqrt(sgld_ula) <= rhs + _TRIANGLE_SLACK * (1.0 + rhs)

    return BlockDiagnostics(
        lam=config.lam,
        block_length=T,
        horizon=horizon,
        replicas=config.replicas,
        seed=config.seed,
        n=records.tolist(),
        sgld_aux=sgld_aux.tolist(),
        sgld_aux_se=stats["sgld_aux"][1].tolist(),
        aux_ula=aux_ula.tolist(),
        aux_ula_se=stats["aux_ula"][1].tolist(),
        sgld_ula=sgld_ula.tolist(),
        sgld_ula_se=stats["sgld_ula"][1].tolist(),
        boundary_gap_max=float(np.max(sgld_aux[boundary], initial=0.0)),
        triangle_ok=bool(np.all(triangle)),
    )
