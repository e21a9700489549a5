"""
Run manifests.

The manifest is written with status ``incomplete`` before any result, rewritten on
every update and switched to ``complete`` once the results are on disk. A run that
raises keeps ``incomplete`` and records the error.
"""

import platform
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

import numpy as np
import scipy
from loguru import logger
from pydantic import BaseModel, Field

from langmix import __version__
from langmix.harness.error_handler import error_response
from langmix.harness.io import to_jsonable, write_json
from langmix.harness.schemas import CheckResult, ErrorResponse, RunStatus, utc_now
from langmix.streams.rng import rng_algorithm

MANIFEST_NAME = "manifest.json"


class Stopwatch:
    """Wall-clock seconds since construction; ``stop`` may be called more than once."""

    def __init__(self) -> None:
        self.start = time.perf_counter()
        self.elapsed = 0.0

    def stop(self) -> float:
        self.elapsed = time.perf_counter() - self.start
        return self.elapsed


@contextmanager
def timed(command: str) -> Iterator[Stopwatch]:
    """Log the start and finish of ``command`` with its duration."""
    watch = Stopwatch()
    logger.info(f"Command: {command}")
    try:
        yield watch
    finally:
        logger.info(f"Finished: {command} ({watch.stop():.3f}s)")


class RunManifest(BaseModel):
    """Everything needed to reproduce a run."""

    command: str
    status: RunStatus = RunStatus.INCOMPLETE
    config: Dict[str, Any] = Field(default_factory=dict, description="Resolved configuration")
    rng_algorithm: str = Field(default_factory=rng_algorithm)
    version: str = __version__
    environment: Dict[str, str] = Field(
        default_factory=lambda: {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        }
    )
    started_at: str = Field(default_factory=utc_now)
    finished_at: Optional[str] = None
    wall_clock_seconds: Optional[float] = None
    constants: Dict[str, Any] = Field(default_factory=dict, description="Derived constants used")
    checks: List[CheckResult] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    error: Optional[ErrorResponse] = None


class ManifestWriter:
    """Owns ``<out_dir>/manifest.json`` for the duration of one command."""

    def __init__(self, out_dir: Path, command: str, config: Dict[str, Any]):
        self.out_dir = Path(out_dir)
        self.path = self.out_dir / MANIFEST_NAME
        self.manifest = RunManifest(command=command, config=config)
        self.flush()

    def flush(self) -> None:
        write_json(self.path, self.manifest)

    def add_constants(self, **constants: Any) -> None:
        self.manifest.constants.update({k: to_jsonable(v) for k, v in constants.items()})
        self.flush()

    def add_checks(self, checks: List[CheckResult]) -> None:
        self.manifest.checks.extend(checks)
        self.flush()

    def add_output(self, path: Path) -> Path:
        self.manifest.outputs.append(str(Path(path).relative_to(self.out_dir)))
        self.flush()
        return path

    def finish(self, elapsed: float, error: Optional[BaseException] = None) -> None:
        self.manifest.finished_at = utc_now()
        self.manifest.wall_clock_seconds = elapsed
        if error is None:
            self.manifest.status = RunStatus.COMPLETE
        else:
            self.manifest.error = error_response(error)
        self.flush()


@contextmanager
def run_manifest(out_dir: Path, command: str, config: Dict[str, Any]) -> Iterator[ManifestWriter]:
    """Time ``command`` and keep its manifest current; errors propagate after recording."""
    with timed(command) as watch:
        writer = ManifestWriter(out_dir, command, config)
        try:
            yield writer
        except BaseException as exc:
            writer.finish(watch.stop(), exc)
            raise
        writer.finish(watch.stop())
