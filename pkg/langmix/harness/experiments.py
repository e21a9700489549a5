"""
Experiment orchestration behind the CLI subcommands.

Harness layer is responsible for this module.

Each experiment has a pure function returning its report and a ``cmd_*`` wrapper that
writes the manifest, the report JSON and any plot-ready CSV to an output directory.
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from langmix.config.settings import get_settings
from langmix.constants.base import ConvexityConstants
from langmix.constants.bias import c_bias
from langmix.constants.chain import MixingInputs, ThetaZeroMoments
from langmix.constants.iid import iid_C, iid_law_moments
from langmix.constants.moments import compute_Cdprime, compute_Cprime
from langmix.constants.planners import (
    DependentPlan,
    DependentPlanInputs,
    IIDPlan,
    IIDPlanInputs,
    choose_p,
    plan_dependent,
    plan_iid,
)
from langmix.constants.report import ConstantReport, constant_report
from langmix.errors import StepSizeError, UnsupportedOperationError
from langmix.harness.builders import ExperimentConfig
from langmix.harness.io import write_columns, write_json, write_samples
from langmix.harness.manifest import ManifestWriter, run_manifest
from langmix.harness.schemas import CheckResult
from langmix.metrics.measures import EmpiricalMeasure, GaussianLaw
from langmix.metrics.wasserstein import (
    w2_assignment,
    w2_empirical_1d,
    w2_gaussian,
    w2_to_gaussian_1d,
    w2_to_gaussian_diagonal,
)
from langmix.mixing.profile import MixingProfile, profile_build
from langmix.model.oracles import GradientOracle, IIDOracle, QuadraticOracle
from langmix.samplers.chains import (
    CoupledStats,
    MomentRun,
    moment_name,
    run_coupled,
    run_sgld,
    run_ula,
)
from langmix.samplers.checks import (
    BoundCheck,
    drift_check,
    geometric_convergence_check,
    iid_second_moment_check,
    sup_bound_check,
    ula_second_moment_check,
)
from langmix.samplers.config import SamplerConfig, oracle_base
from langmix.samplers.stationary import stationary_ula_gaussian, target_law
from langmix.streams.rng import AUX_CHANNEL, make_generator
from langmix.streams.spec import LinearProcessSpec
from langmix.streams.spectral import spectral_coupled_variance

SE_SLACK = 3.0
# Stride giving records at n = 0 and n = N only.
FINAL_ONLY = 10**12
SPECTRAL_POINTS = 5


def is_scalar_system(oracle: GradientOracle) -> bool:
    """H(theta, x) = theta + x (up to the sign of x), the system with a spectral oracle."""
    return (
        isinstance(oracle, QuadraticOracle)
        and oracle.d == 1
        and oracle.m == 1
        and float(oracle.S[0, 0]) == 1.0
        and abs(float(oracle.B[0, 0])) == 1.0
    )


def check_from_bound(check: BoundCheck) -> CheckResult:
    return CheckResult(
        name=check.name,
        passed=check.passed,
        margin=check.margin,
        detail={"points": len(check.n)},
    )


def empirical_w2_to_target(oracle: GradientOracle, samples: np.ndarray) -> Optional[float]:
    """Quantile W2 between samples and pi; None when pi is not diagonal and d > 1."""
    target = target_law(oracle)
    if oracle.d == 1:
        return w2_to_gaussian_1d(samples[:, 0], float(target.mean[0]), float(target.std()[0]))
    if target.is_diagonal:
        return w2_to_gaussian_diagonal(samples, target)
    return None


def _run_manifest_config(config: ExperimentConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json", by_alias=True)


def _record_model(writer: ManifestWriter, oracle: GradientOracle, spec: LinearProcessSpec) -> None:
    writer.add_constants(
        oracle=oracle.constants(),
        stream=spec,
        base=oracle_base(oracle),
    )


# --- sample -------------------------------------------------------------------------


def sample(config: ExperimentConfig) -> MomentRun:
    """Moment traces of the configured chain (SGLD by default)."""
    oracle, spec = config.build_oracle(), config.build_stream()
    block = config.sampler
    if block.chain == "ula":
        return run_ula(oracle, config.sampler_config(), block.moment_orders, block.keep_final)
    return run_sgld(oracle, spec, config.sampler_config(), block.moment_orders, block.keep_final)


def cmd_sample(config: ExperimentConfig, out_dir: Path) -> MomentRun:
    with run_manifest(out_dir, "sample", _run_manifest_config(config)) as writer:
        _record_model(writer, config.build_oracle(), config.build_stream())
        run = sample(config)
        columns: Dict[str, Sequence[Any]] = {"n": run.n}
        for name, trace in run.moments.items():
            columns[name] = trace.mean
            columns[f"{name}_se"] = trace.se
        writer.add_output(write_columns(out_dir / "moments.csv", columns))
        if run.final_states is not None:
            writer.add_output(write_samples(out_dir / "samples.csv", run.final_states))
        writer.add_checks(
            [
                CheckResult(name=f"{name}_bound", passed=ok, detail={"sup": run.sup_moment[name]})
                for name, ok in run.bound_ok.items()
            ]
        )
        writer.add_output(write_json(out_dir / "report.json", run))
    return run


# --- couple -------------------------------------------------------------------------


class CoupleReport(BaseModel):
    stats: CoupledStats
    checks: List[CheckResult] = Field(default_factory=list)


def spectral_oracle_checks(
    spec: LinearProcessSpec, stats: CoupledStats, points: int = SPECTRAL_POINTS
) -> List[CheckResult]:
    """Coupled variance against the spectral integral at a few record points (3 SE)."""
    n = np.asarray(stats.n)
    picks = sorted(set(np.linspace(1, n.size - 1, min(points, n.size - 1)).astype(int).tolist()))
    checks = []
    for i in picks:
        expected = spectral_coupled_variance(spec, stats.info.lam, int(n[i]))
        observed, se = stats.mean_sq_dist[i], stats.se[i]
        margin = SE_SLACK * se - abs(observed - expected)
        checks.append(
            CheckResult(
                name=f"spectral_oracle_n{int(n[i])}",
                passed=margin >= -1e-12 * max(expected, 1.0),
                margin=margin,
                detail={"observed": observed, "expected": expected, "se": se},
            )
        )
    return checks


def couple(config: ExperimentConfig) -> CoupleReport:
    oracle, spec = config.build_oracle(), config.build_stream()
    stats = run_coupled(oracle, spec, config.sampler_config(), config.sampler.moment_orders)
    checks = []
    if is_scalar_system(oracle) and stats.info.lam < 1.0 and len(stats.n) > 1:
        checks = spectral_oracle_checks(spec, stats)
    if not stats.stationary.plateau_ok:
        logger.warning("Coupled distance has not plateaued over the last third of the horizon")
    return CoupleReport(stats=stats, checks=checks)


def cmd_couple(config: ExperimentConfig, out_dir: Path) -> CoupleReport:
    with run_manifest(out_dir, "couple", _run_manifest_config(config)) as writer:
        _record_model(writer, config.build_oracle(), config.build_stream())
        report = couple(config)
        stats = report.stats
        columns: Dict[str, Sequence[Any]] = {
            "n": stats.n,
            "mean_sq_dist": stats.mean_sq_dist,
            "se": stats.se,
            "sup_so_far": stats.sup_so_far,
        }
        columns.update({name: trace.mean for name, trace in stats.moments.items()})
        writer.add_output(write_columns(out_dir / "coupled.csv", columns))
        writer.add_checks(report.checks)
        writer.add_output(write_json(out_dir / "report.json", report))
    return report


# --- rate-sweep ---------------------------------------------------------------------


class RateSweepReport(BaseModel):
    """Stationary coupled L2 distance against lambda with a log-log fit."""

    lambdas: List[float]
    distances: List[float] = Field(..., description="sqrt of the stationary mean-square distance")
    distance_se: List[float]
    plateau_ok: List[bool]
    skipped: List[float] = Field(default_factory=list, description="lambda >= lambda_bar")
    fitted_slope: Optional[float] = None
    ci: Optional[List[float]] = Field(None, description="Bootstrap confidence interval")
    confidence: float
    degenerate: bool = Field(False, description="Distances identically zero; no slope")
    oracle_distances: Optional[List[float]] = Field(
        None, description="sqrt of the spectral variance at the window midpoint"
    )


def fit_slope(log_x: np.ndarray, log_y: np.ndarray) -> float:
    return float(np.polyfit(log_x, log_y, 1)[0])


def bootstrap_slope_ci(
    lambdas: np.ndarray,
    distances: np.ndarray,
    se: np.ndarray,
    seed: int,
    resamples: int,
    confidence: float,
) -> List[float]:
    """Parametric bootstrap: redraw each distance from N(d_i, se_i^2) and refit."""
    rng = make_generator(seed, AUX_CHANNEL)
    draws = distances + se * rng.standard_normal((resamples, distances.size))
    draws = np.maximum(draws, np.finfo(float).tiny)
    slopes = np.polyfit(np.log(lambdas), np.log(draws).T, 1)[0]
    tail = 50.0 * (1.0 - confidence)
    lo, hi = np.percentile(slopes, [tail, 100.0 - tail])
    return [float(lo), float(hi)]


def rate_sweep(config: ExperimentConfig) -> RateSweepReport:
    oracle, spec = config.build_oracle(), config.build_stream()
    lams: List[float] = []
    dist: List[float] = []
    dist_se: List[float] = []
    plateau: List[bool] = []
    oracle_dist: List[float] = []
    skipped: List[float] = []
    for lam in config.sweep.lambdas:
        try:
            stats = run_coupled(oracle, spec, config.sampler_config(lam=lam))
        except StepSizeError as exc:
            logger.warning(f"Skipping lambda={lam}: {exc.message}")
            skipped.append(lam)
            continue
        mean, se = stats.stationary.mean, stats.stationary.se
        root = math.sqrt(max(mean, 0.0))
        lams.append(lam)
        dist.append(root)
        dist_se.append(se / (2.0 * root) if root > 0 else 0.0)
        plateau.append(stats.stationary.plateau_ok)
        if is_scalar_system(oracle) and lam < 1.0:
            midpoint = int(round(5 * stats.info.horizon / 6))
            oracle_dist.append(math.sqrt(spectral_coupled_variance(spec, lam, midpoint)))

    report: Dict[str, Any] = dict(
        lambdas=lams,
        distances=dist,
        distance_se=dist_se,
        plateau_ok=plateau,
        skipped=skipped,
        confidence=config.sweep.confidence,
        oracle_distances=oracle_dist or None,
    )
    d = np.asarray(dist)
    if len(lams) < 2 or np.any(d <= 0.0):
        logger.warning("Rate sweep is degenerate: fewer than two points or zero distances")
        return RateSweepReport(degenerate=True, **report)
    x = np.asarray(lams)
    slope = fit_slope(np.log(x), np.log(d))
    ci = bootstrap_slope_ci(
        x,
        d,
        np.asarray(dist_se),
        config.seed,
        get_settings().bootstrap_resamples,
        config.sweep.confidence,
    )
    logger.info(f"Rate sweep slope {slope:.4f}, CI [{ci[0]:.4f}, {ci[1]:.4f}]")
    return RateSweepReport(fitted_slope=slope, ci=ci, **report)


def cmd_rate_sweep(config: ExperimentConfig, out_dir: Path) -> RateSweepReport:
    with run_manifest(out_dir, "rate-sweep", _run_manifest_config(config)) as writer:
        _record_model(writer, config.build_oracle(), config.build_stream())
        report = rate_sweep(config)
        writer.add_output(
            write_columns(
                out_dir / "sweep.csv",
                {"lambda": report.lambdas, "distance": report.distances, "se": report.distance_se},
            )
        )
        writer.add_output(write_json(out_dir / "report.json", report))
    return report


# --- moments ------------------------------------------------------------------------


class MomentsReport(BaseModel):
    ula: Optional[MomentRun] = None
    sgld: MomentRun
    checks: List[BoundCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def _scaled_or_inf(value: Optional[float]) -> float:
    return math.inf if value is None else value


def moments(config: ExperimentConfig) -> MomentsReport:
    """Drift inequalities and uniform moment bounds of ULA and SGLD."""
    oracle, spec = config.build_oracle(), config.build_stream()
    sampler = config.sampler_config()
    base = oracle_base(oracle)
    lam, rho = sampler.lam, base.rho_lambda(sampler.lam)
    orders = config.sampler.moment_orders
    theta_star_norm = float(np.linalg.norm(oracle.theta_star))
    checks: List[BoundCheck] = []

    ula_run: Optional[MomentRun] = None
    if oracle.has_closed_form_h:
        ula_run = run_ula(oracle, sampler, orders)
        for p in orders:
            name = moment_name(p)
            C = compute_Cprime(p, base.d, base.a_tilde).C
            trace = ula_run.moments[name]
            checks.append(
                drift_check(f"ula_drift_p{p}", ula_run.n, trace, rho, lam, _scaled_or_inf(C.value))
            )
            checks.append(sup_bound_check(f"ula_sup_p{p}", ula_run.n, trace, ula_run.bounds[name]))
        if 1 in orders:
            checks.extend(
                ula_second_moment_check(
                    base, lam, ula_run.n, ula_run.moments[moment_name(1)],
                    sampler.theta0_second_moment(oracle),
                )
            )
        if isinstance(oracle, QuadraticOracle):
            checks.append(geometric_convergence_check(oracle, base, lam, ula_run.n, sampler.theta0))

    sgld_run = run_sgld(oracle, spec, sampler, orders)
    for p in orders:
        name = moment_name(p)
        M_2p = profile_build(spec, 2 * p).script_M_r
        C = compute_Cdprime(
            p, base.d, base.a_tilde, base.L1, base.L2, theta_star_norm, M_2p, base.H_star
        ).C
        trace = sgld_run.moments[name]
        checks.append(
            drift_check(f"sgld_drift_p{p}", sgld_run.n, trace, rho, lam, _scaled_or_inf(C.value))
        )
        checks.append(sup_bound_check(f"sgld_sup_p{p}", sgld_run.n, trace, sgld_run.bounds[name]))

    if isinstance(oracle, IIDOracle) and spec.is_iid and 1 in orders:
        law = iid_law_moments(spec, oracle.rho)
        C_iid = iid_C(oracle.L2, theta_star_norm, law.growth_2rho_2, oracle.H_star, oracle.d)
        checks.append(
            iid_second_moment_check(
                oracle.a, lam, sgld_run.n, sgld_run.moments[moment_name(1)],
                sampler.theta0_second_moment(oracle), C_iid,
            )
        )

    failed = [check.name for check in checks if not check.passed]
    if failed:
        logger.warning(f"Moment checks failed: {failed}")
    return MomentsReport(ula=ula_run, sgld=sgld_run, checks=checks)


def cmd_moments(config: ExperimentConfig, out_dir: Path) -> MomentsReport:
    with run_manifest(out_dir, "moments", _run_manifest_config(config)) as writer:
        _record_model(writer, config.build_oracle(), config.build_stream())
        report = moments(config)
        writer.add_checks([check_from_bound(check) for check in report.checks])
        writer.add_output(write_json(out_dir / "report.json", report))
    return report


# --- ula-bias -----------------------------------------------------------------------


class ULABiasReport(BaseModel):
    lam: float
    d: int
    w2_closed: float = Field(..., description="W2(pi_lambda, pi) from the Gaussian closed forms")
    c: float = Field(..., description="Bias constant at lambda")
    c_sqrt_lambda: float
    passed: bool = Field(..., description="w2_closed <= c sqrt(lambda)")
    ratio_to_lambda: Optional[float] = Field(None, description="w2_closed / lambda")
    w2_empirical: Optional[float] = None
    replicas: int = 0
    empirical_ok: Optional[bool] = Field(None, description="|empirical - closed| <= tolerance")
    tolerance: float = 0.02


def ula_bias(
    oracle: GradientOracle,
    lam: float,
    replicas: int = 0,
    seed: int = 0,
    tolerance: float = 0.02,
) -> ULABiasReport:
    """
    Closed-form W2(pi_lambda, pi) against c sqrt(lambda), optionally with an empirical
    estimate from ``replicas`` independent ULA chains run to the default horizon.

    Raises:
        UnsupportedOperationError: oracle is not quadratic
    """
    if not isinstance(oracle, QuadraticOracle):
        raise UnsupportedOperationError("ula-bias needs a quadratic oracle (closed-form target)")
    base = oracle_base(oracle)
    if lam == 0.0:
        return ULABiasReport(
            lam=0.0, d=oracle.d, w2_closed=0.0, c=c_bias(base, 0.0), c_sqrt_lambda=0.0,
            passed=True, tolerance=tolerance,
        )
    base.check_step(lam)
    closed = w2_gaussian(stationary_ula_gaussian(oracle, lam), target_law(oracle))
    c = c_bias(base, lam)
    report = ULABiasReport(
        lam=lam,
        d=oracle.d,
        w2_closed=closed,
        c=c,
        c_sqrt_lambda=c * math.sqrt(lam),
        passed=closed <= c * math.sqrt(lam),
        ratio_to_lambda=closed / lam,
        tolerance=tolerance,
    )
    if replicas > 0:
        config = SamplerConfig(lam=lam, seed=seed, replicas=replicas, record_every=FINAL_ONLY)
        run = run_ula(oracle, config, (1,), keep_final=True)
        assert run.final_states is not None
        empirical = empirical_w2_to_target(oracle, run.final_states)
        report.w2_empirical = empirical
        report.replicas = replicas
        if empirical is not None:
            report.empirical_ok = abs(empirical - closed) <= tolerance
    return report


def cmd_ula_bias(config: ExperimentConfig, out_dir: Path) -> ULABiasReport:
    with run_manifest(out_dir, "ula-bias", _run_manifest_config(config)) as writer:
        oracle = config.build_oracle()
        _record_model(writer, oracle, config.build_stream())
        report = ula_bias(oracle, config.sampler.lam, config.replicas, config.seed)
        writer.add_checks(
            [CheckResult(name="ula_bias", passed=report.passed,
                         margin=report.c_sqrt_lambda - report.w2_closed)]
        )
        writer.add_output(write_json(out_dir / "report.json", report))
    return report


# --- plan ---------------------------------------------------------------------------


class PlanExecution(BaseModel):
    steps: int
    replicas: int
    w2_empirical: Optional[float]
    epsilon: float
    passed: bool = Field(..., description="Empirical W2 to pi <= epsilon")


class PlanReport(BaseModel):
    kind: str = Field(..., description="dependent or iid")
    lam: float
    n_min: Optional[int]
    dependent: Optional[DependentPlan] = None
    iid: Optional[IIDPlan] = None
    execution: Optional[PlanExecution] = None


def execute_plan(
    oracle: GradientOracle,
    spec: LinearProcessSpec,
    config: ExperimentConfig,
    lam: float,
    steps: Optional[int],
    epsilon: float,
) -> PlanExecution:
    """Run SGLD for the planned (lambda, n) and measure W2 to the closed-form target."""
    if not isinstance(oracle, QuadraticOracle):
        raise UnsupportedOperationError("executing a plan needs a quadratic oracle")
    if steps is None or steps > config.plan.max_steps:
        raise UnsupportedOperationError(
            f"planned horizon {steps if steps is not None else '> 2^62'} exceeds "
            f"max_steps={config.plan.max_steps}",
            detail={"n_min": steps, "max_steps": config.plan.max_steps},
        )
    sampler = config.sampler_config(lam=lam, steps=steps).model_copy(
        update={"record_every": FINAL_ONLY}
    )
    run = run_sgld(oracle, spec, sampler, (1,), keep_final=True)
    assert run.final_states is not None
    w2 = empirical_w2_to_target(oracle, run.final_states)
    return PlanExecution(
        steps=steps,
        replicas=config.replicas,
        w2_empirical=w2,
        epsilon=epsilon,
        passed=w2 is not None and w2 <= epsilon,
    )


def plan(config: ExperimentConfig) -> PlanReport:
    oracle, spec = config.build_oracle(), config.build_stream()
    base = oracle_base(oracle)
    theta0 = config.theta0_moments(oracle)
    theta_star_norm = float(np.linalg.norm(oracle.theta_star))
    epsilon = config.plan.epsilon

    if config.plan.iid:
        law = iid_law_moments(spec, getattr(oracle, "rho", 0.0))
        iid_plan = plan_iid(
            epsilon,
            IIDPlanInputs(
                a=oracle.a,
                L1=oracle.L1,
                L2=oracle.L2,
                d=oracle.d,
                H_star=oracle.H_star,
                theta_star_norm=theta_star_norm,
                theta0_second_moment=theta0.second_moment(),
                law=law,
            ),
        )
        report = PlanReport(kind="iid", lam=iid_plan.lam, n_min=iid_plan.n_min, iid=iid_plan)
    else:
        kappa = config.plan.kappa if config.plan.kappa is not None else 1.0
        p = choose_p(kappa)
        mixing = MixingInputs.from_stream(spec, [2 * p, p, 2])
        dependent = plan_dependent(
            epsilon,
            kappa,
            DependentPlanInputs(
                base=base, theta_star_norm=theta_star_norm, mixing=mixing, theta0=theta0
            ),
        )
        report = PlanReport(
            kind="dependent", lam=dependent.lam, n_min=dependent.n_min, dependent=dependent
        )

    if config.plan.execute:
        report.execution = execute_plan(oracle, spec, config, report.lam, report.n_min, epsilon)
    return report


def cmd_plan(config: ExperimentConfig, out_dir: Path) -> PlanReport:
    with run_manifest(out_dir, "plan", _run_manifest_config(config)) as writer:
        _record_model(writer, config.build_oracle(), config.build_stream())
        report = plan(config)
        checks = []
        if report.dependent is not None:
            checks += [
                CheckResult(name="contraction", passed=report.dependent.contraction_ok),
                CheckResult(name="half_budget", passed=report.dependent.half_budget_ok),
                CheckResult(name="tail", passed=report.dependent.tail_ok),
            ]
        if report.iid is not None:
            checks += [
                CheckResult(name="half_budget", passed=report.iid.half_budget_ok),
                CheckResult(name="tail", passed=report.iid.tail_ok),
            ]
        if report.execution is not None:
            checks.append(
                CheckResult(
                    name="executed_w2",
                    passed=report.execution.passed,
                    margin=(
                        None
                        if report.execution.w2_empirical is None
                        else report.execution.epsilon - report.execution.w2_empirical
                    ),
                )
            )
        writer.add_checks(checks)
        writer.add_output(write_json(out_dir / "report.json", report))
    return report


# --- mixing -------------------------------------------------------------------------


class MixingReport(BaseModel):
    profile: MixingProfile
    mixing_inputs: MixingInputs = Field(..., description="Inputs for `langmix constants --mixing`")


def mixing(
    spec: LinearProcessSpec,
    r: float,
    s: Optional[Sequence[float]] = None,
    tau_max: Optional[int] = None,
    method: str = "analytic",
    paths: int = 10_000,
    seed: int = 0,
    p: int = 4,
) -> MixingReport:
    """Profile at order ``r`` plus the analytic inputs of the constant chain at ``p``."""
    profile = profile_build(spec, r, s, tau_max, method, paths, seed)
    inputs = MixingInputs.from_stream(spec, sorted({2 * p, p, 2}))
    return MixingReport(profile=profile, mixing_inputs=inputs)


def cmd_mixing(spec: LinearProcessSpec, out: Path, **kwargs: Any) -> MixingReport:
    report = mixing(spec, **kwargs)
    with run_manifest(out.parent, "mixing", {"stream": spec.model_dump(), **kwargs}) as writer:
        writer.add_output(write_json(out, report))
    return report


# --- constants ----------------------------------------------------------------------


def constants(
    base: ConvexityConstants,
    p: int,
    mixing_inputs: Optional[MixingInputs] = None,
    theta0: Optional[ThetaZeroMoments] = None,
    theta_star_norm: float = 0.0,
    lam: Optional[float] = None,
    kappa: Optional[float] = None,
    iid_rho: Optional[float] = None,
    iid_epsilon: float = 0.5,
) -> ConstantReport:
    """
    Constant report; without ``mixing_inputs`` the analytic profile of a standard
    i.i.d. Gaussian stream is used.
    """
    stream = LinearProcessSpec.iid(1)
    if mixing_inputs is None:
        mixing_inputs = MixingInputs.from_stream(stream, sorted({2 * p, p, 2}))
    theta0 = theta0 or ThetaZeroMoments(d=base.d)
    iid = None
    if iid_rho is not None:
        iid = IIDPlanInputs(
            a=base.a,
            L1=base.L1,
            L2=base.L2,
            d=base.d,
            H_star=base.H_star,
            theta_star_norm=theta_star_norm,
            theta0_second_moment=theta0.second_moment(),
            law=iid_law_moments(stream, iid_rho),
        )
    return constant_report(
        base, p, mixing_inputs, theta0, theta_star_norm, lam, kappa, iid, iid_epsilon
    )


def cmd_constants(out: Path, **kwargs: Any) -> ConstantReport:
    report = constants(**kwargs)
    echo = {k: v.model_dump() if isinstance(v, BaseModel) else v for k, v in kwargs.items()}
    with run_manifest(out.parent, "constants", echo) as writer:
        writer.add_output(write_json(out, report))
    return report


# --- w2 -----------------------------------------------------------------------------


class W2Report(BaseModel):
    method: str
    n_a: int
    n_b: int
    d: int
    w2: float


def w2(a: np.ndarray, b: np.ndarray, method: Optional[str] = None) -> W2Report:
    """W2 between two sample files: quantile coupling in 1-D, exact assignment otherwise."""
    mu, nu = EmpiricalMeasure(a), EmpiricalMeasure(b)
    chosen = method or ("1d" if mu.d == 1 else "assign")
    if chosen == "1d":
        if mu.d != 1 or nu.d != 1:
            raise UnsupportedOperationError("method 1d needs one-dimensional samples")
        value = w2_empirical_1d(mu, nu)
    elif chosen == "assign":
        value = w2_assignment(mu, nu)
    else:
        raise UnsupportedOperationError(f"unknown w2 method {chosen!r}; use 1d or assign")
    return W2Report(method=chosen, n_a=mu.n, n_b=nu.n, d=mu.d, w2=value)


def gaussian_w2(mean_a: Sequence[float], cov_a: Any, mean_b: Sequence[float], cov_b: Any) -> float:
    return w2_gaussian(GaussianLaw(mean_a, cov_a), GaussianLaw(mean_b, cov_b))
