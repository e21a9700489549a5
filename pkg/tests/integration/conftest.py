"""
Pytest fixtures for integration tests.
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple

import pytest

from langmix.harness.cli import main


class CliResult(NamedTuple):
    code: int
    out: str
    err: str

    def json(self) -> Any:
        return json.loads(self.out)


@pytest.fixture
def run_cli(capsys) -> Callable[..., CliResult]:
    """Run ``langmix`` in-process and capture its exit code and streams."""

    def _run(*argv: Any) -> CliResult:
        capsys.readouterr()
        code = main([str(arg) for arg in argv])
        captured = capsys.readouterr()
        return CliResult(code, captured.out, captured.err)

    return _run


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Dict[str, Any]], Path]:
    """Write an experiment JSON file and return its path."""

    def _write(payload: Dict[str, Any], name: str = "experiment.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


def read_manifest(out_dir: Path) -> Dict[str, Any]:
    return json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))


def csv_header(path: Path) -> List[str]:
    return path.read_text(encoding="utf-8").splitlines()[0].split(",")
