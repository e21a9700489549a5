"""
Shared pytest fixtures.
"""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from langmix.config.settings import reset_settings
from langmix.model.oracles import QuadraticOracle
from langmix.streams.spec import LinearProcessSpec

# Hypothesis examples share the per-test environment fixture.
settings.register_profile(
    "langmix", deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)
settings.load_profile("langmix")


@pytest.fixture(autouse=True)
def single_thread_settings(monkeypatch: pytest.MonkeyPatch):
    """Pin the worker count and drop cached settings around every test."""
    monkeypatch.setenv("LANGMIX_THREADS", "1")
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def scalar_oracle() -> QuadraticOracle:
    """H(theta, x) = theta + x."""
    return QuadraticOracle(S=1.0, B=1.0)


@pytest.fixture
def diagonal_oracle() -> QuadraticOracle:
    """H(theta, x) = diag(1, 2) theta + x with m = 2."""
    return QuadraticOracle(S=np.diag([1.0, 2.0]), B=np.eye(2))


@pytest.fixture
def iid_spec() -> LinearProcessSpec:
    return LinearProcessSpec.iid()


@pytest.fixture
def ar_spec() -> LinearProcessSpec:
    """Short geometric filter a = (1, 1/2, 1/4)."""
    return LinearProcessSpec(coeffs=(1.0, 0.5, 0.25))


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    return tmp_path / "run"
