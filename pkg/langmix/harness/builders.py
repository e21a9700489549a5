"""
Experiment configuration files and the objects built from them.

Harness layer is responsible for this module.

Precedence: model defaults < JSON config file < command-line flags. Environment
variables only reach the runtime settings, never these models.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from langmix.constants.chain import MixingInputs, ThetaZeroMoments
from langmix.constants.iid import iid_law_moments
from langmix.errors import ConfigError
from langmix.harness.io import read_json
from langmix.model.oracles import GradientOracle, IIDRhoOracle, OracleFamily, QuadraticOracle
from langmix.samplers.config import SamplerConfig
from langmix.streams.rng import MAX_SEED
from langmix.streams.spec import DecayCertificate, LinearProcessSpec

SCHEMA_VERSION = 1
Matrix = List[List[float]]

# Rate-sweep grid 2^-4 .. 2^-9.
DEFAULT_SWEEP = [2.0**-k for k in range(4, 10)]


class ExperimentKind(str, Enum):
    SAMPLE = "sample"
    COUPLE = "couple"
    RATE_SWEEP = "rate-sweep"
    MOMENTS = "moments"
    ULA_BIAS = "ula-bias"
    PLAN = "plan"
    VERIFY = "verify"


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class OracleBlock(_Block):
    """Built-in oracle families; custom oracles are registered through the library."""

    family: OracleFamily = OracleFamily.QUADRATIC
    S: Matrix | float = Field(default=1.0, description="Quadratic: d x d matrix S")
    B: Matrix | float = Field(
        default=1.0, description="d x m data loading matrix; a scalar b means b I"
    )
    theta_star: Optional[List[float]] = None
    a: Optional[float] = Field(None, gt=0, description="Declared a (defaults to lambda_min(S))")
    scale: Optional[float] = Field(None, gt=0, description="iid-rho: scale s")
    rho: float = Field(default=0.0, ge=0, description="iid-rho: growth exponent")
    d: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def validate_family(self) -> "OracleBlock":
        """Family-specific required fields."""
        if self.family == OracleFamily.CUSTOM:
            raise ValueError("custom oracles cannot be built from a config file")
        if self.family == OracleFamily.IID_RHO and self.scale is None:
            raise ValueError("iid-rho oracles need 'scale'")
        return self

    @property
    def dimension(self) -> int:
        if self.family == OracleFamily.QUADRATIC:
            return int(np.atleast_2d(np.asarray(self.S, dtype=float)).shape[0])
        if self.theta_star is not None:
            return len(self.theta_star)
        return self.d or 1

    def loading(self, m: int) -> np.ndarray:
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 0:
            return float(B) * np.eye(self.dimension, m)
        return B

    def build(self, stream: Optional[LinearProcessSpec] = None) -> GradientOracle:
        m = stream.m if stream is not None else 1
        if self.family == OracleFamily.QUADRATIC:
            return QuadraticOracle(
                S=self.S, theta_star=self.theta_star, B=self.loading(m), a=self.a
            )
        mean_growth = 1.0
        if self.rho > 0:
            if stream is None:
                raise ConfigError("iid-rho oracles with rho > 0 need a stream to compute a")
            mean_growth = iid_law_moments(stream, self.rho).growth_rho
        return IIDRhoOracle(
            scale=float(self.scale or 1.0),
            rho=self.rho,
            mean_growth=mean_growth,
            theta_star=self.theta_star,
            B=self.loading(m),
            d=self.dimension,
            m=m,
        )


class StreamBlock(_Block):
    """Either explicit coefficients or a decay law c (1 + k)^-beta; i.i.d. by default."""

    coeffs: Optional[List[float]] = None
    decay: Optional[DecayCertificate] = None
    m: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def validate_source(self) -> "StreamBlock":
        """At most one coefficient source."""
        if self.coeffs is not None and self.decay is not None:
            raise ValueError("give either 'coeffs' or 'decay', not both")
        return self

    def build(self) -> LinearProcessSpec:
        if self.decay is not None:
            return LinearProcessSpec.from_decay(self.decay.c, self.decay.beta, m=self.m)
        return LinearProcessSpec(coeffs=tuple(self.coeffs or (1.0,)), m=self.m)


class SamplerBlock(_Block):
    lam: float = Field(default=0.1, alias="lambda", gt=0)
    steps: Optional[int] = Field(None, ge=0)
    theta0: Optional[List[float]] = None
    theta0_std: float = Field(default=0.0, ge=0)
    record_every: int = Field(default=1, ge=1)
    chain: Literal["sgld", "ula"] = "sgld"
    moment_orders: List[int] = Field(default_factory=lambda: [1])
    keep_final: bool = Field(False, description="Write the final replica states")


class SweepBlock(_Block):
    lambdas: List[float] = Field(default_factory=lambda: list(DEFAULT_SWEEP))
    confidence: float = Field(default=0.95, gt=0, lt=1)


class PlanBlock(_Block):
    epsilon: float = Field(default=float(np.exp(-1.0)), gt=0)
    kappa: Optional[float] = Field(1.0, gt=0)
    iid: bool = False
    execute: bool = False
    max_steps: int = Field(default=2_000_000, ge=1, description="Refuse to execute longer plans")


class ExperimentConfig(_Block):
    """Top-level experiment file."""

    schema_version: Literal[1] = SCHEMA_VERSION
    kind: ExperimentKind = ExperimentKind.COUPLE
    seed: int = Field(..., ge=0, le=MAX_SEED)
    replicas: int = Field(default=1000, ge=1)
    oracle: OracleBlock = Field(default_factory=OracleBlock)
    stream: StreamBlock = Field(default_factory=StreamBlock)
    sampler: SamplerBlock = Field(default_factory=SamplerBlock)
    sweep: SweepBlock = Field(default_factory=SweepBlock)
    plan: PlanBlock = Field(default_factory=PlanBlock)
    output_dir: Optional[str] = None

    def build_stream(self) -> LinearProcessSpec:
        return self.stream.build()

    def build_oracle(self) -> GradientOracle:
        stream = self.build_stream()
        oracle = self.oracle.build(stream)
        if oracle.m != stream.m:
            raise ConfigError(
                f"oracle data dimension m={oracle.m} but the stream has m={stream.m}"
            )
        return oracle

    def sampler_config(
        self, lam: Optional[float] = None, steps: Optional[int] = None
    ) -> SamplerConfig:
        block = self.sampler
        return SamplerConfig(
            lam=block.lam if lam is None else lam,
            steps=block.steps if steps is None else steps,
            theta0=block.theta0,
            theta0_std=block.theta0_std,
            seed=self.seed,
            replicas=self.replicas,
            record_every=block.record_every,
        )

    def theta0_moments(self, oracle: GradientOracle) -> ThetaZeroMoments:
        config = self.sampler_config()
        return ThetaZeroMoments(
            d=oracle.d, offset_norm=config.theta0_offset_norm(oracle), std=config.theta0_std
        )


def _set_path(data: Dict[str, Any], dotted: str, value: Any) -> None:
    node = data
    *parents, leaf = dotted.split(".")
    for key in parents:
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ConfigError(f"cannot override {dotted}: {key} is not a section")
        node = child
    node[leaf] = value


def load_config(
    path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None
) -> ExperimentConfig:
    """
    Read ``path`` (if any), apply dotted-key ``overrides`` whose value is not None and
    validate.

    Raises:
        ConfigError: unreadable file, wrong schema version, unknown keys or bad values
    """
    data: Dict[str, Any] = {}
    if path is not None:
        raw = read_json(Path(path))
        if not isinstance(raw, dict):
            raise ConfigError(f"{path} must contain a JSON object")
        data = raw
    for key, value in (overrides or {}).items():
        if value is not None:
            _set_path(data, key, value)
    if "seed" not in data:
        raise ConfigError("a seed is mandatory (config key 'seed' or --seed)")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(
            "invalid experiment configuration",
            detail=exc.errors(include_url=False, include_context=False),
        ) from exc


def load_mixing(path: Path) -> MixingInputs:
    """Mixing inputs from a JSON file written by ``langmix mixing`` or hand-written."""
    raw = read_json(Path(path))
    if isinstance(raw, dict) and "mixing_inputs" in raw:
        raw = raw["mixing_inputs"]
    try:
        return MixingInputs.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(
            f"{path} does not hold mixing inputs (script_M, C32, C21)",
            detail=exc.errors(include_url=False, include_context=False),
        ) from exc
