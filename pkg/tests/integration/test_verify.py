"""
Integration tests for the acceptance suite.

The full per-check runs are marked slow; select them with ``pytest -m slow``.
"""

import pytest

import langmix.constants.base
from langmix.config.settings import reset_settings
from langmix.harness.verify import CHECKS, VerifyLevel, run_verify
from tests.integration.conftest import read_manifest

pytestmark = pytest.mark.integration


class TestVerifyCommand:
    """Test ``langmix verify`` on the fast checks."""

    def test_verdict_is_byte_identical(self, run_cli, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert run_cli("verify", "--only", "constants", "--seed", 5, "--out", first).code == 0
        assert run_cli("verify", "--only", "constants", "--seed", 5, "--out", second).code == 0
        verdict = (first / "verdict.json").read_bytes()
        assert verdict == (second / "verdict.json").read_bytes()
        assert read_manifest(first)["status"] == "complete"

    def test_tampered_constant_fails(self, run_cli, out_dir, monkeypatch):
        def doubled(a, L1):
            return 2.0 * a * L1 / (a + L1)

        monkeypatch.setattr(langmix.constants.base, "tilde_a", doubled)
        result = run_cli("verify", "--only", "constants", "--out", out_dir)
        assert result.code == 4
        manifest = read_manifest(out_dir)
        assert manifest["status"] == "complete"
        assert not all(check["passed"] for check in manifest["checks"])

    def test_seed_defaults_to_settings(self, monkeypatch):
        monkeypatch.setenv("LANGMIX_VERIFY_SEED", "77")
        reset_settings()
        verdict = run_verify(only=["constants", "auxiliary-inequalities"])
        assert verdict.seed == 77
        assert verdict.passed
        assert verdict.failures == []


@pytest.mark.slow
class TestAcceptance:
    """Every acceptance check at the quick level."""

    @pytest.mark.parametrize("name", sorted(CHECKS))
    def test_check_passes(self, name):
        verdict = run_verify(VerifyLevel.QUICK, only=[name])
        assert verdict.passed, verdict.failures
