"""
Batched SGLD and ULA runs: synchronous coupling, moment traces and contraction.

Samplers layer is responsible for this module.

Coupled chains share theta_0 and the Langevin noise xi_n; the SGLD chain also consumes
the stream. Every replica owns independent stream, noise and initial-law generators.
"""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from langmix.constants.base import ConvexityConstants, ScaledValue, log_sum, safe_log
from langmix.constants.chain import ThetaZeroMoments
from langmix.constants.moments import compute_Cdprime, compute_Cprime
from langmix.errors import DomainError, UnsupportedOperationError
from langmix.mixing.profile import profile_build
from langmix.model.oracles import GradientOracle
from langmix.samplers.config import SamplerConfig, guard_step
from langmix.samplers.engine import (
    BlockResult,
    Moments,
    chunk_bounds,
    run_blocks,
    window_mask,
)
from langmix.samplers.steps import sgld_step, ula_step
from langmix.streams.rng import INIT_CHANNEL, NOISE_CHANNEL, make_generator
from langmix.streams.spec import LinearProcessSpec
from langmix.streams.state import stream_init, stream_take

PLATEAU_TOLERANCE = 0.01
DIST = "dist_sq"


def moment_name(p: int) -> str:
    return f"moment_p{p}"


class TraceSummary(BaseModel):
    """Replica mean and standard error at each record point."""

    mean: List[float]
    se: List[float]


class StationaryEstimate(BaseModel):
    """Mean over replicas of each replica's average across the last third of the horizon."""

    mean: float
    se: float
    plateau_ok: bool = Field(..., description="First and second half of the window agree to 1%")


class RunInfo(BaseModel):
    lam: float
    horizon: int
    replicas: int
    seed: int
    record_every: int
    lambda_bar: float
    a_tilde: float


class CoupledStats(BaseModel):
    """Distance between synchronously coupled SGLD and ULA chains."""

    info: RunInfo
    n: List[int]
    mean_sq_dist: List[float]
    se: List[float]
    sup_so_far: List[float] = Field(..., description="Running max of mean_sq_dist")
    moments: Dict[str, TraceSummary] = Field(default_factory=dict, description="SGLD chain")
    stationary: StationaryEstimate


class MomentRun(BaseModel):
    """Moment traces E||theta_n - theta*||^{2p} of a single chain with their uniform bounds."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    info: RunInfo
    chain: str = Field(..., description="sgld or ula")
    n: List[int]
    moments: Dict[str, TraceSummary]
    stationary: Dict[str, StationaryEstimate]
    sup_moment: Dict[str, float]
    bounds: Dict[str, ScaledValue] = Field(
        ..., description="E V_p(theta_0) + C(p)/a_tilde with C = C'' (sgld) or C' (ula)"
    )
    bound_ok: Dict[str, bool]
    final_states: Optional[np.ndarray] = Field(None, exclude=True)


class ContractionStats(BaseModel):
    """Two ULA chains with shared noise and different initial laws."""

    info: RunInfo
    n: List[int]
    mean_sq_dist: List[float]
    se: List[float]
    envelope: List[float] = Field(
        ..., description="e^{-2 a~ lambda n} times the empirical E||eta1-eta2||^2"
    )
    envelope_exact: List[float] = Field(
        ..., description="e^{-2 a~ lambda n} times the exact E||eta1-eta2||^2"
    )
    passed: bool


class InitialLaw(BaseModel):
    """N(mean, std^2 I)."""

    mean: List[float]
    std: float = Field(default=0.0, ge=0)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        mean = np.asarray(self.mean, dtype=float)
        if self.std == 0.0:
            return np.broadcast_to(mean, (size, mean.size)).copy()
        return mean + self.std * rng.standard_normal((size, mean.size))


class _Simulation:
    """
    One replica-block simulation. ``chains`` selects what is advanced:
    "sgld", "ula", "coupled" (SGLD and ULA from the same theta_0) or "contraction"
    (two ULA chains from ``second_law``).
    """

    def __init__(
        self,
        oracle: GradientOracle,
        spec: Optional[LinearProcessSpec],
        config: SamplerConfig,
        horizon: int,
        chains: str,
        orders: Sequence[int] = (),
        second_law: Optional[InitialLaw] = None,
        keep_final: bool = False,
    ):
        self.oracle = oracle
        self.spec = spec
        self.config = config
        self.horizon = horizon
        self.chains = chains
        self.orders = list(orders)
        self.second_law = second_law
        self.keep_final = keep_final
        self.records = config.record_points(horizon)
        self.in_window = window_mask(self.records, horizon)
        self.index = {int(n): i for i, n in enumerate(self.records)}
        self.names = ([DIST] if chains in ("coupled", "contraction") else []) + [
            moment_name(p) for p in self.orders
        ]

    @property
    def needs_stream(self) -> bool:
        return self.chains in ("sgld", "coupled")

    def _quantities(self, main: np.ndarray, other: Optional[np.ndarray]) -> Dict[str, np.ndarray]:
        out: Dict[str, np.ndarray] = {}
        if other is not None:
            out[DIST] = np.sum((main - other) ** 2, axis=1)
        if self.orders:
            sq = np.sum((main - self.oracle.theta_star) ** 2, axis=1)
            for p in self.orders:
                out[moment_name(p)] = sq**p
        return out

    def __call__(self, block: int, size: int) -> BlockResult:
        cfg, oracle = self.config, self.oracle
        lam, seed, d = cfg.lam, cfg.seed, oracle.d
        init_rng = make_generator(seed, block, INIT_CHANNEL)
        noise = make_generator(seed, block, NOISE_CHANNEL)

        first_law = InitialLaw(mean=cfg.initial_mean(oracle).tolist(), std=cfg.theta0_std)
        main = first_law.draw(init_rng, size)
        other: Optional[np.ndarray] = None
        if self.chains == "coupled":
            other = main.copy()
        elif self.chains == "contraction":
            assert self.second_law is not None
            other = self.second_law.draw(init_rng, size)

        state = None
        if self.needs_stream:
            state = stream_init(self.spec, seed, paths=size, keys=(block,))

        result = BlockResult(
            count=size,
            traces={name: Moments.zeros(len(self.records)) for name in self.names},
            window={name: Moments.zeros(1) for name in self.names},
        )
        window_sum = {name: np.zeros(size) for name in self.names}
        window_count = 0

        def record(n: int) -> None:
            nonlocal window_count
            i = self.index[n]
            values = self._quantities(main, other)
            for name, vals in values.items():
                result.traces[name].add(i, vals)
                if self.in_window[i]:
                    window_sum[name] += vals
            if self.in_window[i]:
                window_count += 1

        record(0)
        for start, stop in chunk_bounds(self.horizon):
            steps = stop - start
            xs = stream_take(state, self.spec, steps) if state is not None else None
            xis = noise.standard_normal((steps, size, d))
            for j in range(steps):
                if self.chains in ("sgld", "coupled"):
                    main = sgld_step(main, oracle, lam, xs[j], xis[j])
                else:
                    main = ula_step(main, oracle, lam, xis[j])
                if self.chains in ("coupled", "contraction"):
                    other = ula_step(other, oracle, lam, xis[j])
                n = start + j + 1
                if n in self.index:
                    record(n)

        for name in self.names:
            result.window[name].add(0, window_sum[name] / max(window_count, 1))
        if self.keep_final:
            result.final_states = main
        return result


def _summary(result: BlockResult, name: str) -> TraceSummary:
    mean, se = result.traces[name].mean_se()
    return TraceSummary(mean=mean.tolist(), se=se.tolist())


def _stationary(result: BlockResult, name: str, in_window: np.ndarray) -> StationaryEstimate:
    mean, se = result.window[name].mean_se()
    trace, _ = result.traces[name].mean_se()
    window = trace[in_window]
    half = max(1, window.size // 2)
    first = float(np.mean(window[:half]))
    second = float(np.mean(window[half:])) if window.size > 1 else first
    scale = max(abs(first), abs(second))
    plateau_ok = scale == 0.0 or abs(second - first) / scale < PLATEAU_TOLERANCE
    return StationaryEstimate(mean=float(mean[0]), se=float(se[0]), plateau_ok=plateau_ok)


def _info(config: SamplerConfig, base: ConvexityConstants, horizon: int) -> RunInfo:
    return RunInfo(
        lam=config.lam,
        horizon=horizon,
        replicas=config.replicas,
        seed=config.seed,
        record_every=config.record_every,
        lambda_bar=base.lambda_bar,
        a_tilde=base.a_tilde,
    )


def _validate_orders(orders: Sequence[int]) -> List[int]:
    out = [int(p) for p in orders]
    if any(p < 1 or p != q for p, q in zip(out, orders)):
        raise DomainError(f"moment orders must be positive integers, got {list(orders)}")
    return out


def run_coupled(
    oracle: GradientOracle,
    spec: LinearProcessSpec,
    config: SamplerConfig,
    moment_orders: Sequence[int] = (),
    threads: Optional[int] = None,
) -> CoupledStats:
    """
    Run SGLD and ULA jointly with shared theta_0 and noise; record E||theta_n - theta_bar_n||^2.

    Raises:
        StepSizeError: lambda >= lambda_bar
        UnsupportedOperationError: the oracle has no closed-form h
    """
    if not oracle.has_closed_form_h:
        raise UnsupportedOperationError("coupled runs need a closed-form mean field h")
    base = guard_step(oracle, config, spec)
    horizon = config.horizon(base)
    orders = _validate_orders(moment_orders)
    sim = _Simulation(oracle, spec, config, horizon, "coupled", orders)
    logger.info(f"Coupled run: lambda={config.lam} N={horizon} replicas={config.replicas}")
    result = run_blocks(sim, config.replicas, threads)

    dist = _summary(result, DIST)
    return CoupledStats(
        info=_info(config, base, horizon),
        n=sim.records.tolist(),
        mean_sq_dist=dist.mean,
        se=dist.se,
        sup_so_far=np.maximum.accumulate(np.asarray(dist.mean)).tolist(),
        moments={moment_name(p): _summary(result, moment_name(p)) for p in orders},
        stationary=_stationary(result, DIST, sim.in_window),
    )


def _le_scaled(x: float, bound: ScaledValue) -> bool:
    return x <= 0.0 or math.log(x) <= bound.log_value + 1e-12


def _moment_bounds(
    oracle: GradientOracle,
    config: SamplerConfig,
    base: ConvexityConstants,
    orders: Sequence[int],
    spec: Optional[LinearProcessSpec],
) -> Dict[str, ScaledValue]:
    theta0 = ThetaZeroMoments(
        d=oracle.d, offset_norm=config.theta0_offset_norm(oracle), std=config.theta0_std
    )
    theta_star_norm = float(np.linalg.norm(oracle.theta_star))
    bounds: Dict[str, ScaledValue] = {}
    for p in orders:
        log_ev = 2 * p * safe_log(theta0.norm(2 * p))
        if spec is None:
            C = compute_Cprime(p, base.d, base.a_tilde).C
        else:
            M_2p = profile_build(spec, 2 * p).script_M_r
            C = compute_Cdprime(
                p, base.d, base.a_tilde, base.L1, base.L2, theta_star_norm, M_2p, base.H_star
            ).C
        bounds[moment_name(p)] = ScaledValue.from_log(
            log_sum([log_ev, C.log_value - math.log(base.a_tilde)])
        )
    return bounds


def _moment_run(
    chain: str,
    oracle: GradientOracle,
    spec: Optional[LinearProcessSpec],
    config: SamplerConfig,
    moment_orders: Sequence[int],
    keep_final: bool,
    threads: Optional[int],
) -> MomentRun:
    base = guard_step(oracle, config, spec)
    horizon = config.horizon(base)
    orders = _validate_orders(moment_orders)
    sim = _Simulation(oracle, spec, config, horizon, chain, orders, keep_final=keep_final)
    logger.info(f"{chain.upper()} run: lambda={config.lam} N={horizon} replicas={config.replicas}")
    result = run_blocks(sim, config.replicas, threads)

    moments = {moment_name(p): _summary(result, moment_name(p)) for p in orders}
    sup_moment = {name: float(max(trace.mean)) for name, trace in moments.items()}
    bounds = _moment_bounds(oracle, config, base, orders, spec)
    return MomentRun(
        info=_info(config, base, horizon),
        chain=chain,
        n=sim.records.tolist(),
        moments=moments,
        stationary={
            moment_name(p): _stationary(result, moment_name(p), sim.in_window)
            for p in orders
        },
        sup_moment=sup_moment,
        bounds=bounds,
        bound_ok={name: _le_scaled(sup_moment[name], bounds[name]) for name in moments},
        final_states=result.final_states,
    )


def run_sgld(
    oracle: GradientOracle,
    spec: LinearProcessSpec,
    config: SamplerConfig,
    moment_orders: Sequence[int] = (1,),
    keep_final: bool = False,
    threads: Optional[int] = None,
) -> MomentRun:
    """SGLD moment traces, compared against E V_p(theta_0) + C''(p)/a_tilde."""
    return _moment_run("sgld", oracle, spec, config, moment_orders, keep_final, threads)


def run_ula(
    oracle: GradientOracle,
    config: SamplerConfig,
    moment_orders: Sequence[int] = (1,),
    keep_final: bool = False,
    threads: Optional[int] = None,
) -> MomentRun:
    """ULA moment traces, compared against E V_p(theta_0) + C'(p)/a_tilde."""
    if not oracle.has_closed_form_h:
        raise UnsupportedOperationError("ULA needs a closed-form mean field h")
    return _moment_run("ula", oracle, None, config, moment_orders, keep_final, threads)


def run_contraction(
    oracle: GradientOracle,
    config: SamplerConfig,
    second_law: InitialLaw,
    threads: Optional[int] = None,
) -> ContractionStats:
    """
    Two ULA chains with shared noise, started from the config's initial law and from
    ``second_law``; E||theta_n(1) - theta_n(2)||^2 must stay below
    e^{-2 a~ lambda n} E||eta_1 - eta_2||^2 (+ 3 SE).
    """
    if not oracle.has_closed_form_h:
        raise UnsupportedOperationError("contraction runs need a closed-form mean field h")
    if len(second_law.mean) != oracle.d:
        raise DomainError(
            f"second initial law has dimension {len(second_law.mean)}, need {oracle.d}"
        )
    base = guard_step(oracle, config)
    horizon = config.horizon(base)
    sim = _Simulation(oracle, None, config, horizon, "contraction", second_law=second_law)
    result = run_blocks(sim, config.replicas, threads)

    dist = _summary(result, DIST)
    decay = np.exp(-2.0 * base.a_tilde * config.lam * sim.records)
    exact0 = float(
        np.sum((config.initial_mean(oracle) - np.asarray(second_law.mean)) ** 2)
        + oracle.d * (config.theta0_std**2 + second_law.std**2)
    )
    envelope = decay * dist.mean[0]
    mean, se = np.asarray(dist.mean), np.asarray(dist.se)
    passed = bool(np.all(mean <= envelope + 3.0 * se + 1e-12 * np.maximum(envelope, 1.0)))
    return ContractionStats(
        info=_info(config, base, horizon),
        n=sim.records.tolist(),
        mean_sq_dist=dist.mean,
        se=dist.se,
        envelope=envelope.tolist(),
        envelope_exact=(decay * exact0).tolist(),
        passed=passed,
    )
