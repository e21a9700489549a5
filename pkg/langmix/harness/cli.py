"""
Command-line entry point: ``langmix <command> [options]``.

Harness layer is responsible for this module.

Exit codes: 0 success, 2 configuration or input error, 3 hypothesis violation,
4 verification failure, 1 unexpected error.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from loguru import logger

from langmix import __version__
from langmix.config.logging import configure_logging
from langmix.config.settings import get_settings
from langmix.constants.base import compute_base
from langmix.constants.chain import ThetaZeroMoments
from langmix.errors import VerificationFailure
from langmix.harness import experiments
from langmix.harness.builders import ExperimentConfig, load_config, load_mixing
from langmix.harness.error_handler import handle_exception
from langmix.harness.io import read_samples, write_json
from langmix.harness.verify import VerifyLevel, cmd_verify
from langmix.streams.spec import LinearProcessSpec

EXPERIMENTS = ("sample", "couple", "rate-sweep", "moments", "ula-bias", "plan")


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every config-driven command; each overrides one config key."""
    parser.add_argument("--config", type=Path, help="Experiment JSON file")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--seed", type=int, help="Master seed (mandatory here or in the config)")
    parser.add_argument("--replicas", type=int, help="Independent replicas")
    parser.add_argument("--lambda", dest="lam", type=float, help="Step size")
    parser.add_argument("--steps", type=int, help="Horizon N")
    parser.add_argument("--theta0", type=float, nargs="+", help="Initial mean")
    parser.add_argument("--theta0-std", type=float, help="Isotropic std of the initial law")
    parser.add_argument("--record-every", type=int, help="Record stride")
    parser.add_argument("--coeffs", type=float, nargs="+", help="Linear-process coefficients")
    parser.add_argument(
        "--decay", type=float, nargs=2, metavar=("C", "BETA"), help="a_k = C (1 + k)^-BETA"
    )
    parser.add_argument("--m", type=int, help="Data dimension")


def _add_moment_orders(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--moments", type=int, nargs="+", metavar="P", help="Moment orders p")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langmix",
        description="Langevin sampling (ULA/SGLD) with conditionally L-mixing data streams",
    )
    parser.add_argument("--version", action="version", version=f"langmix {__version__}")
    parser.add_argument("--log-level", help="Override LANGMIX_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample", help="Moment traces of one chain")
    _add_experiment_flags(sample)
    _add_moment_orders(sample)
    sample.add_argument("--chain", choices=["sgld", "ula"])
    sample.add_argument(
        "--keep-final", action="store_true", default=None, help="Write final states as CSV"
    )

    couple = sub.add_parser("couple", help="Synchronously coupled SGLD and ULA")
    _add_experiment_flags(couple)
    _add_moment_orders(couple)

    sweep = sub.add_parser("rate-sweep", help="Stationary coupled distance against lambda")
    _add_experiment_flags(sweep)
    sweep.add_argument("--lambdas", type=float, nargs="+", help="Step-size grid")
    sweep.add_argument("--confidence", type=float, help="Bootstrap confidence level")

    moments = sub.add_parser("moments", help="Drift and uniform moment bound suites")
    _add_experiment_flags(moments)
    _add_moment_orders(moments)

    bias = sub.add_parser("ula-bias", help="W2(pi_lambda, pi) against c sqrt(lambda)")
    _add_experiment_flags(bias)

    plan = sub.add_parser("plan", help="Step size and horizon for a target accuracy")
    _add_experiment_flags(plan)
    plan.add_argument("--epsilon", type=float, help="Target W2 accuracy")
    plan.add_argument("--kappa", type=float, help="Rate loss for dependent data")
    plan.add_argument("--iid", action="store_true", default=None, help="Independent-data plan")
    plan.add_argument(
        "--execute", action="store_true", default=None, help="Run SGLD with the plan"
    )
    plan.add_argument("--max-steps", type=int, help="Refuse to execute longer plans")

    mixing = sub.add_parser("mixing", help="Mixing profile of a linear-process stream")
    source = mixing.add_mutually_exclusive_group()
    source.add_argument("--coeffs", type=float, nargs="+", default=[1.0])
    source.add_argument("--decay", type=float, nargs=2, metavar=("C", "BETA"))
    mixing.add_argument("--m", type=int, default=1)
    mixing.add_argument("--r", type=float, default=2.0, help="Moment order")
    mixing.add_argument("--s", type=float, nargs="+", help="Exponents of script C_{r,s}")
    mixing.add_argument("--tau-max", type=int)
    mixing.add_argument("--method", choices=["analytic", "monte-carlo"], default="analytic")
    mixing.add_argument("--paths", type=int, default=10_000)
    mixing.add_argument("--seed", type=int, default=0)
    mixing.add_argument("--p", type=int, default=4, help="Chain order for mixing_inputs")
    mixing.add_argument("--out", type=Path, help="JSON file; stdout when omitted")

    constants = sub.add_parser("constants", help="Every explicit constant for given inputs")
    constants.add_argument("--a", type=float, required=True)
    constants.add_argument("--l1", type=float, required=True)
    constants.add_argument("--l2", type=float, required=True)
    constants.add_argument("--d", type=int, required=True)
    constants.add_argument("--p", type=int, default=4)
    constants.add_argument("--h-star", type=float, default=0.0)
    constants.add_argument("--theta-star-norm", type=float, default=0.0)
    constants.add_argument("--theta0-offset", type=float, default=0.0)
    constants.add_argument("--theta0-std", type=float, default=0.0)
    constants.add_argument("--mixing", type=Path, help="Mixing inputs JSON")
    constants.add_argument("--lambda", dest="lam", type=float)
    constants.add_argument("--kappa", type=float)
    constants.add_argument("--iid-rho", type=float, help="Add the independent-data constants")
    constants.add_argument("--iid-epsilon", type=float, default=0.5)
    constants.add_argument("--out", type=Path, help="JSON file; stdout when omitted")

    w2 = sub.add_parser("w2", help="W2 between two sample files")
    w2.add_argument("--a", type=Path, required=True)
    w2.add_argument("--b", type=Path, required=True)
    w2.add_argument("--method", choices=["1d", "assign"])

    verify = sub.add_parser("verify", help="Run the acceptance suite")
    verify.add_argument("--level", choices=[v.value for v in VerifyLevel], default="quick")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--only", action="append", metavar="NAME", help="Run only NAME")
    verify.add_argument("--out", type=Path)
    return parser


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Dotted config keys set by flags; None values are dropped by ``load_config``."""
    get = vars(args).get
    decay = get("decay")
    return {
        "kind": args.command,
        "seed": get("seed"),
        "replicas": get("replicas"),
        "sampler.lambda": get("lam"),
        "sampler.steps": get("steps"),
        "sampler.theta0": get("theta0"),
        "sampler.theta0_std": get("theta0_std"),
        "sampler.record_every": get("record_every"),
        "sampler.chain": get("chain"),
        "sampler.moment_orders": get("moments"),
        "sampler.keep_final": get("keep_final"),
        "stream.coeffs": get("coeffs"),
        "stream.decay": None if decay is None else {"c": decay[0], "beta": decay[1]},
        "stream.m": get("m"),
        "sweep.lambdas": get("lambdas"),
        "sweep.confidence": get("confidence"),
        "plan.epsilon": get("epsilon"),
        "plan.kappa": get("kappa"),
        "plan.iid": get("iid"),
        "plan.execute": get("execute"),
        "plan.max_steps": get("max_steps"),
    }


def output_dir(args: argparse.Namespace, config: Optional[ExperimentConfig] = None) -> Path:
    if args.out is not None:
        return Path(args.out)
    if config is not None and config.output_dir:
        return Path(config.output_dir)
    return Path(get_settings().output_dir) / args.command


def _emit(report: Any, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    else:
        write_json(out, report)


def run_experiment(args: argparse.Namespace) -> int:
    config = load_config(args.config, config_overrides(args))
    out = output_dir(args, config)
    commands: Dict[str, Callable[[ExperimentConfig, Path], Any]] = {
        "sample": experiments.cmd_sample,
        "couple": experiments.cmd_couple,
        "rate-sweep": experiments.cmd_rate_sweep,
        "moments": experiments.cmd_moments,
        "ula-bias": experiments.cmd_ula_bias,
        "plan": experiments.cmd_plan,
    }
    report = commands[args.command](config, out)
    logger.info(f"Results written to {out}")
    execution = getattr(report, "execution", None)
    if execution is not None and not execution.passed:
        logger.error(f"Executed plan missed epsilon: W2 = {execution.w2_empirical}")
        return VerificationFailure.exit_code
    return 0


def run_mixing(args: argparse.Namespace) -> int:
    if args.decay is not None:
        spec = LinearProcessSpec.from_decay(args.decay[0], args.decay[1], m=args.m)
    else:
        spec = LinearProcessSpec(coeffs=tuple(args.coeffs), m=args.m)
    kwargs = dict(
        r=args.r,
        s=args.s,
        tau_max=args.tau_max,
        method=args.method,
        paths=args.paths,
        seed=args.seed,
        p=args.p,
    )
    if args.out is None:
        _emit(experiments.mixing(spec, **kwargs), None)
    else:
        experiments.cmd_mixing(spec, args.out, **kwargs)
    return 0


def run_constants(args: argparse.Namespace) -> int:
    base = compute_base(args.a, args.l1, args.l2, args.d, args.h_star)
    kwargs = dict(
        base=base,
        p=args.p,
        mixing_inputs=None if args.mixing is None else load_mixing(args.mixing),
        theta0=ThetaZeroMoments(d=args.d, offset_norm=args.theta0_offset, std=args.theta0_std),
        theta_star_norm=args.theta_star_norm,
        lam=args.lam,
        kappa=args.kappa,
        iid_rho=args.iid_rho,
        iid_epsilon=args.iid_epsilon,
    )
    if args.out is None:
        _emit(experiments.constants(**kwargs), None)
    else:
        experiments.cmd_constants(args.out, **kwargs)
    return 0


def run_w2(args: argparse.Namespace) -> int:
    report = experiments.w2(read_samples(args.a), read_samples(args.b), args.method)
    _emit(report, None)
    return 0


def run_verify(args: argparse.Namespace) -> int:
    verdict = cmd_verify(VerifyLevel(args.level), output_dir(args), args.seed, args.only)
    if not verdict.passed:
        logger.error(f"Verification failed: {verdict.failures}")
        return VerificationFailure.exit_code
    logger.info(f"All {len(verdict.checks)} checks passed")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        if args.command in EXPERIMENTS:
            return run_experiment(args)
        handlers = {
            "mixing": run_mixing,
            "constants": run_constants,
            "w2": run_w2,
            "verify": run_verify,
        }
        return handlers[args.command](args)
    except Exception as exc:
        return handle_exception(exc)


if __name__ == "__main__":
    sys.exit(main())
