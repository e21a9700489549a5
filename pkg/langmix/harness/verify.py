"""
Acceptance suite behind ``langmix verify``.

Harness layer is responsible for this module.

Every check is a function of run sizes and a seed returning named ``CheckResult``s.
The verdict holds no timestamps, so two runs with the same seed and level produce the
same JSON bytes.
"""

import math
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from langmix.config.settings import get_settings
from langmix.constants.base import compute_base
from langmix.constants.chain import ChainInputs, MixingInputs, ThetaZeroMoments, compute_chain
from langmix.constants.moments import compute_Cprime
from langmix.constants.report import constant_report
from langmix.errors import ConfigError
from langmix.harness import experiments
from langmix.harness.builders import (
    ExperimentConfig,
    ExperimentKind,
    OracleBlock,
    PlanBlock,
    SamplerBlock,
)
from langmix.harness.io import write_json
from langmix.harness.manifest import run_manifest
from langmix.harness.schemas import CheckResult
from langmix.metrics.inequalities import gaussian_norm_moment, multinomial_inequality_check
from langmix.mixing.gamma import gamma_linear_analytic, gamma_mc_estimate
from langmix.mixing.maximal import maximal_inequality_check
from langmix.model.oracles import OracleFamily, QuadraticOracle
from langmix.samplers.chains import InitialLaw, run_contraction, run_coupled
from langmix.samplers.checks import BoundCheck, coupled_envelope_check
from langmix.samplers.config import SamplerConfig, oracle_base
from langmix.streams.rng import AUX_CHANNEL, make_generator
from langmix.streams.spec import LinearProcessSpec
from langmix.streams.spectral import (
    coupled_variance_closed_form,
    spectral_coupled_variance_detail,
)

VERDICT_NAME = "verdict.json"
SE_SLACK = 3.0
REL_TOL = 1e-9
# Allowance on the 0.5 rate for curvature of sqrt(lambda / (2 - lambda)) on the grid.
RATE_CI_ALLOWANCE = 0.01
RATE_SLOPE_RANGE = (0.45, 0.55)
BIAS_TOLERANCE = 0.02


class VerifyLevel(str, Enum):
    QUICK = "quick"
    FULL = "full"


class LevelSizes(BaseModel):
    """Replica and path counts for one verification level."""

    coupled: int
    sweep: int
    envelope: int
    bias: int
    contraction: int
    moments: int
    maximal: int
    gamma_paths: int
    plan: int
    multinomial_draws: int = 1000


LEVEL_SIZES: Dict[VerifyLevel, LevelSizes] = {
    VerifyLevel.QUICK: LevelSizes(
        coupled=20_000,
        sweep=2_000,
        envelope=2_000,
        bias=100_000,
        contraction=4_000,
        moments=4_000,
        maximal=4_000,
        gamma_paths=4_000,
        plan=2_000,
    ),
    VerifyLevel.FULL: LevelSizes(
        coupled=50_000,
        sweep=10_000,
        envelope=10_000,
        bias=200_000,
        contraction=10_000,
        moments=20_000,
        maximal=10_000,
        gamma_paths=20_000,
        plan=10_000,
    ),
}


class VerifyVerdict(BaseModel):
    level: VerifyLevel
    seed: int
    passed: bool
    checks: List[CheckResult]
    failures: List[str] = Field(default_factory=list)


def _scalar_oracle(d: int = 1) -> QuadraticOracle:
    return QuadraticOracle(S=np.eye(d), B=np.eye(d, 1))


def _within_se(
    name: str, observed: float, expected: float, se: float, **detail: float
) -> CheckResult:
    margin = SE_SLACK * se - abs(observed - expected)
    return CheckResult(
        name=name,
        passed=margin >= -REL_TOL * max(abs(expected), 1.0),
        margin=margin,
        detail={"observed": observed, "expected": expected, "se": se, **detail},
    )


def _from_bound(check: BoundCheck, name: Optional[str] = None) -> CheckResult:
    result = experiments.check_from_bound(check)
    if name is not None:
        result.name = name
    return result


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= REL_TOL * max(abs(a), abs(b), 1.0)


# --- checks -------------------------------------------------------------------------


def check_coupled_variance(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Coupled variance of the scalar system against lambda(1 - (1-lambda)^{2n})/(2 - lambda)."""
    oracle, spec, steps = _scalar_oracle(), LinearProcessSpec.iid(1), 200
    results = []
    for lam in (0.5, 0.1, 0.02):
        config = SamplerConfig(
            lam=lam, steps=steps, seed=seed, replicas=sizes.coupled, record_every=steps
        )
        stats = run_coupled(oracle, spec, config)
        results.append(
            _within_se(
                f"coupled_variance_lambda{lam}",
                stats.mean_sq_dist[-1],
                coupled_variance_closed_form(lam, steps),
                stats.se[-1],
                lam=lam,
            )
        )
    limit = coupled_variance_closed_form(0.5, 10_000)
    results.append(
        CheckResult(
            name="coupled_variance_limit",
            passed=_close(limit, 1.0 / 3.0),
            margin=-abs(limit - 1.0 / 3.0),
            detail={"value": limit},
        )
    )
    return results


def check_spectral_oracle(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """a_k = (1 + k)^-2: Monte Carlo against the spectral integral and its [m^2, M^2] bracket."""
    spec = LinearProcessSpec.from_decay(1.0, 2.0)
    lam, steps = 0.1, 100
    config = SamplerConfig(
        lam=lam, steps=steps, seed=seed, replicas=sizes.coupled, record_every=steps
    )
    stats = run_coupled(_scalar_oracle(), spec, config)
    detail = spectral_coupled_variance_detail(spec, lam, steps)
    inside = detail.lower * (1 - REL_TOL) <= detail.value <= detail.upper * (1 + REL_TOL)
    return [
        _within_se(
            "spectral_oracle_mc", stats.mean_sq_dist[-1], detail.value, stats.se[-1], K=spec.K
        ),
        CheckResult(
            name="spectral_oracle_bracket",
            passed=inside,
            margin=min(detail.value - detail.lower, detail.upper - detail.value),
            detail={"value": detail.value, "lower": detail.lower, "upper": detail.upper},
        ),
    ]


def check_rate_recovery(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Stationary coupled distance scales like sqrt(lambda) on 2^-4 .. 2^-9."""
    config = ExperimentConfig(
        kind=ExperimentKind.RATE_SWEEP,
        seed=seed,
        replicas=sizes.sweep,
        sampler=SamplerBlock(record_every=16),
    )
    report = experiments.rate_sweep(config)
    if report.fitted_slope is None or report.ci is None:
        return [CheckResult(name="rate_recovery", passed=False, detail={"degenerate": True})]
    slope, (lo, hi) = report.fitted_slope, report.ci
    in_range = RATE_SLOPE_RANGE[0] <= slope <= RATE_SLOPE_RANGE[1]
    covers = lo - RATE_CI_ALLOWANCE <= 0.5 <= hi + RATE_CI_ALLOWANCE
    return [
        CheckResult(
            name="rate_recovery",
            passed=in_range and covers,
            margin=min(slope - RATE_SLOPE_RANGE[0], RATE_SLOPE_RANGE[1] - slope),
            detail={"slope": slope, "ci_low": lo, "ci_high": hi},
        )
    ]


def check_envelope(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """sup_n ||theta_n - theta_bar_n||_2 <= C0(4) lambda^{1/4} with analytic mixing inputs."""
    oracle, spec, p = _scalar_oracle(), LinearProcessSpec.iid(1), 4
    chain = compute_chain(
        ChainInputs(
            base=oracle_base(oracle),
            p=p,
            mixing=MixingInputs.from_stream(spec, [2 * p, p, 2]),
            theta0=ThetaZeroMoments(d=oracle.d),
        )
    )
    results = []
    for lam in (0.1, 0.02):
        config = SamplerConfig(lam=lam, seed=seed, replicas=sizes.envelope, record_every=8)
        stats = run_coupled(oracle, spec, config)
        results.append(
            _from_bound(coupled_envelope_check(stats, chain.C0, p), f"envelope_p4_lambda{lam}")
        )
    return results


def check_ula_bias(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """W2(pi_lambda, pi) = sqrt(d)(sqrt(2/(2 - lambda)) - 1) <= c sqrt(lambda)."""
    results = []
    for d in (1, 5):
        oracle = _scalar_oracle(d)
        for lam in (0.01, 0.1, 0.3):
            replicas = sizes.bias if (d == 1 and lam == 0.1) else 0
            report = experiments.ula_bias(oracle, lam, replicas, seed, BIAS_TOLERANCE)
            expected = math.sqrt(d) * (math.sqrt(2.0 / (2.0 - lam)) - 1.0)
            results.append(
                CheckResult(
                    name=f"ula_bias_d{d}_lambda{lam}",
                    passed=report.passed and _close(report.w2_closed, expected),
                    margin=report.c_sqrt_lambda - report.w2_closed,
                    detail={"w2_closed": report.w2_closed, "c_sqrt_lambda": report.c_sqrt_lambda},
                )
            )
            if report.w2_empirical is not None:
                results.append(
                    CheckResult(
                        name=f"ula_bias_empirical_d{d}_lambda{lam}",
                        passed=bool(report.empirical_ok),
                        margin=BIAS_TOLERANCE - abs(report.w2_empirical - report.w2_closed),
                        detail={"w2_empirical": report.w2_empirical, "replicas": replicas},
                    )
                )
    return results


def check_contraction(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Shared-noise ULA chains from N(0, 1) and N(5, 1) stay inside e^{-2 a~ lambda n}."""
    config = SamplerConfig(
        lam=0.1, seed=seed, replicas=sizes.contraction, theta0=[0.0], theta0_std=1.0
    )
    stats = run_contraction(_scalar_oracle(), config, InitialLaw(mean=[5.0], std=1.0))
    margin = min(
        env + SE_SLACK * se - mean
        for env, se, mean in zip(stats.envelope, stats.se, stats.mean_sq_dist)
    )
    return [CheckResult(name="contraction", passed=stats.passed, margin=margin)]


def check_moments(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """ULA and SGLD drift suites for p in {1, 2}, and the i.i.d. second-moment bound."""
    sampler = SamplerBlock(theta0=[1.0], moment_orders=[1, 2])
    quadratic = ExperimentConfig(
        kind=ExperimentKind.MOMENTS, seed=seed, replicas=sizes.moments, sampler=sampler
    )
    iid = quadratic.model_copy(
        update={"oracle": OracleBlock(family=OracleFamily.IID_RHO, scale=1.0, B=1.0)}
    )
    results = []
    for label, config in (("quadratic", quadratic), ("iid", iid)):
        report = experiments.moments(config)
        results += [_from_bound(check, f"{label}_{check.name}") for check in report.checks]
    return results


def check_auxiliary_inequalities(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Gaussian norm moments (exhaustive) and random multinomial expansions."""
    moments = [gaussian_norm_moment(d, r) for d in range(1, 11) for r in range(1, 7)]
    worst = min(math.log(m.bound) - math.log(m.exact) for m in moments)
    rng = make_generator(seed, AUX_CHANNEL, 8)
    failures = 0
    for _ in range(sizes.multinomial_draws):
        d = int(rng.integers(1, 6))
        p = int(rng.integers(1, 5))
        scale = 10.0 ** rng.uniform(-2, 2)
        x, y = scale * rng.standard_normal(d), rng.standard_normal(d)
        if not multinomial_inequality_check(x, y, p).passed:
            failures += 1
    return [
        CheckResult(
            name="gaussian_norm_moment",
            passed=all(m.holds for m in moments),
            margin=worst,
            detail={"cases": len(moments)},
        ),
        CheckResult(
            name="multinomial_inequality",
            passed=failures == 0,
            detail={"draws": sizes.multinomial_draws, "failures": failures},
        ),
    ]


def check_maximal_inequality(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Weighted maximal inequality on i.i.d. and (1, 0.5) linear streams."""
    rng = make_generator(seed, AUX_CHANNEL, 9)
    iid, linear = LinearProcessSpec.iid(1), LinearProcessSpec(coeffs=(1.0, 0.5))
    cases = [(iid, r, length) for r in (3, 4) for length in (16, 64)] + [(linear, 4, 16)]
    results = []
    for i, (spec, r, length) in enumerate(cases):
        weights = rng.standard_normal(length)
        report = maximal_inequality_check(weights, spec, r, sizes.maximal, seed + i)
        results.append(
            CheckResult(
                name=f"maximal_r{r}_m{length}_K{spec.K}",
                passed=report.passed,
                margin=report.rhs - report.lhs,
                detail={"lhs": report.lhs, "rhs": report.rhs, "se": report.lhs_std_error},
            )
        )
    return results


def check_mixing_oracle(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Monte Carlo gamma_r(tau) against the analytic value; zero beyond lag 0 when i.i.d."""
    spec = LinearProcessSpec(coeffs=(1.0, 0.5, 0.25))
    results = []
    for r in (2, 4):
        for tau in range(9):
            expected = gamma_linear_analytic(spec, tau, r)
            estimate = gamma_mc_estimate(spec, tau, r, sizes.gamma_paths, seed + tau)
            results.append(
                _within_se(
                    f"gamma_r{r}_tau{tau}", estimate.estimate, expected, estimate.std_error
                )
            )
    iid = LinearProcessSpec.iid(1)
    tail = [gamma_linear_analytic(iid, tau, r) for r in (2, 4) for tau in range(1, 9)]
    results.append(
        CheckResult(name="gamma_iid_zero", passed=all(g == 0.0 for g in tail), detail={})
    )
    return results


def check_planners(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Planner identities over a grid of epsilon and executed i.i.d. plans."""
    results = []
    for eps in (0.05, 0.1, 0.2, math.exp(-1.0)):
        config = ExperimentConfig(kind=ExperimentKind.PLAN, seed=seed, plan=PlanBlock(epsilon=eps))
        dependent = experiments.plan(config).dependent
        assert dependent is not None
        results.append(
            CheckResult(
                name=f"plan_dependent_eps{eps:.4g}",
                passed=dependent.contraction_ok and dependent.half_budget_ok and dependent.tail_ok,
                detail={"lambda": dependent.lam, "log10_n_min": dependent.log10_n_min},
            )
        )
    for eps in (0.1, 0.2, 0.3, 0.5):
        config = ExperimentConfig(
            kind=ExperimentKind.PLAN, seed=seed, plan=PlanBlock(epsilon=eps, iid=True)
        )
        iid = experiments.plan(config).iid
        assert iid is not None
        # C_bar sqrt(lambda) <= eps/2 needs C_bar <= 1, so the error split is only reported.
        lam_ok = _close(iid.lam, min(iid.c1 * eps**2, iid.step_bound))
        horizon = iid.c2 * eps**-2 * math.log(1.0 / eps)
        n_ok = iid.n_min is not None and horizon * (1 - REL_TOL) <= iid.n_min < horizon + 1
        results.append(
            CheckResult(
                name=f"plan_iid_eps{eps:.4g}",
                passed=lam_ok and n_ok and _close(iid.c1, 1.0 / (4.0 * iid.Cbar)),
                detail={
                    "lambda": iid.lam,
                    "n_min": iid.n_min,
                    "half_budget_ok": iid.half_budget_ok,
                    "tail_ok": iid.tail_ok,
                },
            )
        )
    for eps in (0.3, 0.2):
        config = ExperimentConfig(
            kind=ExperimentKind.PLAN,
            seed=seed,
            replicas=sizes.plan,
            plan=PlanBlock(epsilon=eps, iid=True, execute=True),
        )
        execution = experiments.plan(config).execution
        assert execution is not None
        results.append(
            CheckResult(
                name=f"plan_executed_eps{eps:.4g}",
                passed=execution.passed,
                margin=(
                    None if execution.w2_empirical is None else eps - execution.w2_empirical
                ),
                detail={"steps": execution.steps, "w2_empirical": execution.w2_empirical},
            )
        )
    return results


def check_constants(sizes: LevelSizes, seed: int) -> List[CheckResult]:
    """Hand-evaluated values of the base constants, C'(1) and the sqrt(d) dimension law."""
    base = compute_base(1.0, 1.0, 1.0, 1)
    unit = compute_base(2.0, 2.0, 0.0, 1)
    Cprime = compute_Cprime(1, 1, unit.a_tilde).C.require()
    results = [
        CheckResult(
            name="base_constants",
            passed=_close(base.lambda_bar, 1.0) and _close(base.a_tilde, 0.5),
            detail={"lambda_bar": base.lambda_bar, "a_tilde": base.a_tilde},
        ),
        CheckResult(
            name="cprime_unit",
            passed=_close(unit.a_tilde, 1.0) and _close(Cprime, 10.0),
            margin=-abs(Cprime - 10.0),
            detail={"Cprime": Cprime},
        ),
    ]

    spec = LinearProcessSpec.iid(1)
    mixing = MixingInputs.from_stream(spec, [8, 4, 2])
    report = constant_report(base, 4, mixing, ThetaZeroMoments(d=1))
    results.append(
        CheckResult(
            name="C0_exceeds_Cstar",
            passed=report.C0_gt_Cstar,
            detail={"log10_C0": report.C0.log10_value, "Cstar": report.Cstar},
        )
    )

    ratios = []
    for d in (1, 4, 16):
        chain = compute_chain(
            ChainInputs(
                base=compute_base(1.0, 1.0, 0.0, d),
                p=4,
                mixing=mixing,
                theta0=ThetaZeroMoments(d=d),
            )
        )
        ratios.append(chain.C0_proof.log_value - 0.5 * math.log(d))
    spread = max(ratios) - min(ratios)
    results.append(
        CheckResult(
            name="dimension_law",
            passed=spread <= REL_TOL,
            margin=REL_TOL - spread,
            detail={"log_ratios": ratios},
        )
    )
    return results


CheckFn = Callable[[LevelSizes, int], List[CheckResult]]

CHECKS: Dict[str, CheckFn] = {
    "coupled-variance": check_coupled_variance,
    "spectral-oracle": check_spectral_oracle,
    "rate-recovery": check_rate_recovery,
    "envelope": check_envelope,
    "ula-bias": check_ula_bias,
    "contraction": check_contraction,
    "moments": check_moments,
    "auxiliary-inequalities": check_auxiliary_inequalities,
    "maximal-inequality": check_maximal_inequality,
    "mixing-oracle": check_mixing_oracle,
    "planners": check_planners,
    "constants": check_constants,
}


def run_verify(
    level: VerifyLevel = VerifyLevel.QUICK,
    seed: Optional[int] = None,
    only: Optional[Sequence[str]] = None,
) -> VerifyVerdict:
    """
    Run the selected checks (all by default) and collect the verdict.

    Raises:
        ConfigError: unknown check name in ``only``
    """
    seed = get_settings().verify_seed if seed is None else seed
    names = list(only) if only else list(CHECKS)
    unknown = sorted(set(names) - set(CHECKS))
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; available: {sorted(CHECKS)}")

    sizes = LEVEL_SIZES[VerifyLevel(level)]
    checks: List[CheckResult] = []
    for name in names:
        logger.info(f"verify: {name}")
        results = CHECKS[name](sizes, seed)
        for result in results:
            if not result.passed:
                logger.warning(f"verify: {result.name} failed (margin {result.margin})")
        checks.extend(results)

    failures = [check.name for check in checks if not check.passed]
    return VerifyVerdict(
        level=VerifyLevel(level),
        seed=seed,
        passed=not failures,
        checks=checks,
        failures=failures,
    )


def cmd_verify(
    level: VerifyLevel,
    out_dir: Path,
    seed: Optional[int] = None,
    only: Optional[Sequence[str]] = None,
) -> VerifyVerdict:
    """Write ``verdict.json`` (deterministic) and a manifest (timestamped) to ``out_dir``."""
    echo = {"level": VerifyLevel(level).value, "seed": seed, "only": list(only or [])}
    with run_manifest(out_dir, "verify", echo) as writer:
        verdict = run_verify(level, seed, only)
        writer.add_checks(verdict.checks)
        writer.add_output(write_json(out_dir / VERDICT_NAME, verdict))
    return verdict
