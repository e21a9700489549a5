"""
Unit tests for Langevin steps, closed-form ULA laws, batched runs and bound checks.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from langmix.constants.base import ScaledValue, compute_base
from langmix.errors import (
    ContractViolationError,
    DomainError,
    HypothesisViolationError,
    StepSizeError,
)
from langmix.model.oracles import IIDRhoOracle, QuadraticOracle
from langmix.samplers.blocks import run_auxiliary_blocks
from langmix.samplers.chains import (
    InitialLaw,
    TraceSummary,
    moment_name,
    run_contraction,
    run_coupled,
    run_sgld,
    run_ula,
)
from langmix.samplers.checks import (
    coupled_envelope_check,
    drift_check,
    geometric_convergence_check,
    sup_bound_check,
    ula_second_moment_bound,
)
from langmix.samplers.config import SamplerConfig, guard_step
from langmix.samplers.engine import Moments, replica_blocks
from langmix.samplers.stationary import stationary_ula_gaussian, target_law, ula_law_at
from langmix.samplers.steps import sgld_step, ula_step
from langmix.streams.rng import make_generator


def _config(**overrides) -> SamplerConfig:
    values = {"lam": 0.1, "steps": 40, "seed": 7, "replicas": 200}
    values.update(overrides)
    return SamplerConfig(**values)


class TestSteps:
    """Test the one-step updates."""

    def test_ula_step(self, scalar_oracle):
        np.testing.assert_allclose(ula_step([1.0], scalar_oracle, 0.5, [0.0]), [0.5])
        np.testing.assert_allclose(ula_step([1.0], scalar_oracle, 0.5, [1.0]), [1.5])

    def test_sgld_step(self, scalar_oracle):
        # H(1, 2) = (1 - 0) + 2
        np.testing.assert_allclose(sgld_step([1.0], scalar_oracle, 0.5, [2.0], [0.0]), [-0.5])

    def test_replica_axes(self, diagonal_oracle):
        theta = np.ones((5, 2))
        out = ula_step(theta, diagonal_oracle, 0.25, np.zeros((5, 2)))
        np.testing.assert_allclose(out, np.tile([0.75, 0.5], (5, 1)))


class TestStationaryLaws:
    """Test the Gaussian laws of the quadratic ULA chain."""

    @pytest.mark.parametrize("lam", [0.1, 0.5, 0.9])
    def test_scalar_stationary_variance(self, scalar_oracle, lam):
        law = stationary_ula_gaussian(scalar_oracle, lam)
        assert law.cov[0, 0] == pytest.approx(2.0 / (2.0 - lam))

    @pytest.mark.parametrize("lam, variance", [(1.0, 2.0), (1.5, 4.0)])
    def test_stationary_variance_above_step_guard(self, scalar_oracle, lam, variance):
        """The fixed point only needs lambda s < 2, not lambda < lambda_bar = 1."""
        law = stationary_ula_gaussian(scalar_oracle, lam)
        assert law.cov[0, 0] == pytest.approx(variance)

    def test_diagonal_stationary_variance(self, diagonal_oracle):
        law = stationary_ula_gaussian(diagonal_oracle, 0.1)
        np.testing.assert_allclose(np.diag(law.cov), [1.0 / 0.95, 0.2 / 0.36], rtol=1e-12)
        np.testing.assert_allclose(law.cov[0, 1], 0.0, atol=1e-12)
        np.testing.assert_allclose(law.mean, [0.0, 0.0])

    def test_divergent_step(self, diagonal_oracle):
        with pytest.raises(HypothesisViolationError):
            stationary_ula_gaussian(diagonal_oracle, 1.0)

    def test_target_law(self, diagonal_oracle):
        law = target_law(diagonal_oracle)
        np.testing.assert_allclose(law.cov, np.diag([1.0, 0.5]))
        np.testing.assert_allclose(law.mean, [0.0, 0.0])

    def test_law_at_step(self, scalar_oracle):
        start = ula_law_at(scalar_oracle, 0.5, 0, theta0=[3.0])
        assert start.mean[0] == pytest.approx(3.0)
        assert start.cov[0, 0] == pytest.approx(0.0, abs=1e-15)

        two = ula_law_at(scalar_oracle, 0.5, 2, theta0=[3.0])
        assert two.mean[0] == pytest.approx(0.75)
        # v (1 - (1 - lam)^4) with v = 4/3
        assert two.cov[0, 0] == pytest.approx(4.0 / 3.0 * (1.0 - 0.5**4))

    def test_law_approaches_stationary(self, diagonal_oracle):
        late = ula_law_at(diagonal_oracle, 0.2, 500, theta0=[1.0, -1.0])
        stationary = stationary_ula_gaussian(diagonal_oracle, 0.2)
        np.testing.assert_allclose(late.cov, stationary.cov, atol=1e-12)
        np.testing.assert_allclose(late.mean, stationary.mean, atol=1e-12)


class TestSamplerConfig:
    """Test run parameters and step guards."""

    def test_lambda_alias(self):
        config = SamplerConfig.model_validate({"lambda": 0.1, "seed": 1})
        assert config.lam == 0.1
        assert config.replicas == 1000

    def test_unknown_keys(self):
        with pytest.raises(ValidationError):
            SamplerConfig.model_validate({"lambda": 0.1, "seed": 1, "stepz": 3})

    def test_non_finite_theta0(self):
        with pytest.raises(ValidationError):
            SamplerConfig(lam=0.1, seed=1, theta0=[float("nan")])

    def test_default_horizon(self):
        base = compute_base(1.0, 1.0, 1.0, 1)
        # ceil(ln(10) / (0.5 * 0.1)) * 3
        assert _config(steps=None).horizon(base) == 141
        assert _config(steps=12).horizon(base) == 12

    def test_record_points(self):
        np.testing.assert_array_equal(_config(record_every=4).record_points(10), [0, 4, 8, 10])
        np.testing.assert_array_equal(_config(record_every=5).record_points(10), [0, 5, 10])

    def test_initial_moments(self, diagonal_oracle):
        config = _config(theta0=[3.0, 4.0], theta0_std=1.0)
        assert config.theta0_offset_norm(diagonal_oracle) == pytest.approx(5.0)
        assert config.theta0_second_moment(diagonal_oracle) == pytest.approx(27.0)

    def test_initial_mean_dimension(self, diagonal_oracle):
        with pytest.raises(ContractViolationError):
            _config(theta0=[1.0]).initial_mean(diagonal_oracle)

    def test_guard_lambda_bar(self, scalar_oracle):
        assert guard_step(scalar_oracle, _config(lam=0.5)).lambda_bar == pytest.approx(1.0)
        with pytest.raises(StepSizeError):
            guard_step(scalar_oracle, _config(lam=1.0))

    def test_guard_iid_step_bound(self, iid_spec):
        oracle = IIDRhoOracle(scale=1.0, rho=0.0, mean_growth=1.0)
        # lambda_bar = 1 but lambda_0 = 1/2
        guard_step(oracle, _config(lam=0.5), iid_spec)
        with pytest.raises(StepSizeError):
            guard_step(oracle, _config(lam=0.7), iid_spec)


class TestEngine:
    """Test replica blocking and block moments."""

    def test_blocks(self):
        assert replica_blocks(2500) == [(0, 1024), (1, 1024), (2, 452)]
        assert replica_blocks(1) == [(0, 1)]

    def test_block_moments_match_numpy(self):
        values = make_generator(3).standard_normal((2, 3000)) * [[1.0], [5.0]] + [[0.0], [2.0]]
        total = Moments.zeros(2)
        for chunk in np.array_split(np.arange(3000), [1024, 2048]):
            block = Moments.zeros(2)
            block.add(0, values[0, chunk])
            block.add(1, values[1, chunk])
            total.merge(block)
        mean, se = total.mean_se()
        np.testing.assert_allclose(total.count, [3000, 3000])
        np.testing.assert_allclose(mean, values.mean(axis=1), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(se, values.std(axis=1, ddof=1) / np.sqrt(3000), rtol=1e-10)

    def test_block_moments_large_offset(self):
        # Raw second moments near 1e18 leave no digits for a unit variance.
        values = 1e9 + make_generator(4).standard_normal(4096)
        total = Moments.zeros(1)
        for chunk in np.array_split(values, 4):
            block = Moments.zeros(1)
            block.add(0, chunk)
            total.merge(block)
        _, se = total.mean_se()
        assert se[0] == pytest.approx(values.std(ddof=1) / 64.0, rel=1e-6)

    def test_single_replica_has_zero_error(self):
        moments = Moments.zeros(1)
        moments.add(0, np.array([4.0]))
        mean, se = moments.mean_se()
        assert mean[0] == 4.0
        assert se[0] == 0.0


class TestCoupledRuns:
    """Test the synchronously coupled SGLD and ULA chains."""

    def test_thread_count_does_not_change_results(self, scalar_oracle, ar_spec):
        config = _config(steps=30, replicas=2100, record_every=5)
        single = run_coupled(scalar_oracle, ar_spec, config, moment_orders=[1], threads=1)
        pooled = run_coupled(scalar_oracle, ar_spec, config, moment_orders=[1], threads=3)
        assert single.mean_sq_dist == pooled.mean_sq_dist
        assert single.moments == pooled.moments

    def test_starts_together(self, scalar_oracle, ar_spec):
        stats = run_coupled(scalar_oracle, ar_spec, _config())
        assert stats.n[0] == 0
        assert stats.mean_sq_dist[0] == 0.0
        assert stats.stationary.mean > 0.0
        assert stats.sup_so_far == sorted(stats.sup_so_far)

    def test_data_free_gradient_couples_exactly(self, ar_spec):
        oracle = QuadraticOracle(S=1.0, B=0.0)
        stats = run_coupled(oracle, ar_spec, _config(theta0=[2.0]))
        assert max(stats.mean_sq_dist) == 0.0

    def test_step_guard(self, scalar_oracle, ar_spec):
        with pytest.raises(StepSizeError):
            run_coupled(scalar_oracle, ar_spec, _config(lam=1.2))

    def test_moment_orders(self, scalar_oracle, ar_spec):
        with pytest.raises(DomainError):
            run_coupled(scalar_oracle, ar_spec, _config(), moment_orders=[0])


class TestMomentRuns:
    """Test single-chain moment traces."""

    def test_ula_reaches_stationary_variance(self, scalar_oracle):
        config = _config(lam=0.25, steps=None, replicas=4000)
        run = run_ula(scalar_oracle, config, moment_orders=[1])
        estimate = run.stationary[moment_name(1)]
        assert abs(estimate.mean - 2.0 / 1.75) < 5.0 * estimate.se

    def test_sgld_below_uniform_bound(self, scalar_oracle, iid_spec):
        run = run_sgld(scalar_oracle, iid_spec, _config(steps=100), moment_orders=[1, 2])
        assert run.chain == "sgld"
        assert run.bound_ok == {moment_name(1): True, moment_name(2): True}

    def test_keep_final(self, diagonal_oracle):
        run = run_ula(diagonal_oracle, _config(replicas=50), keep_final=True)
        assert run.final_states.shape == (50, 2)
        assert "final_states" not in run.model_dump()

    def test_contraction(self, scalar_oracle):
        config = _config(steps=50, theta0=[0.0])
        stats = run_contraction(scalar_oracle, config, InitialLaw(mean=[5.0]))
        assert stats.passed
        # shared noise and a linear drift leave a deterministic gap 5 (1 - lam)^n
        assert stats.mean_sq_dist[-1] == pytest.approx(25.0 * 0.9**100)
        assert stats.envelope_exact[0] == pytest.approx(25.0)

    def test_contraction_dimension(self, diagonal_oracle):
        with pytest.raises(DomainError):
            run_contraction(diagonal_oracle, _config(), InitialLaw(mean=[1.0]))


class TestAuxiliaryBlocks:
    """Test the restarted auxiliary process."""

    def test_large_step(self, scalar_oracle, ar_spec):
        with pytest.raises(HypothesisViolationError):
            run_auxiliary_blocks(scalar_oracle, ar_spec, _config(lam=1.5))

    def test_block_structure(self, scalar_oracle, ar_spec):
        diagnostics = run_auxiliary_blocks(scalar_oracle, ar_spec, _config(lam=0.25))
        assert diagnostics.block_length == 4
        assert diagnostics.boundary_gap_max == 0.0
        assert diagnostics.triangle_ok
        assert max(diagnostics.sgld_aux) > 0.0


class TestBoundChecks:
    """Test the comparisons of traces with their bounds."""

    def test_drift(self):
        n = [0, 1, 2]
        holds = TraceSummary(mean=[4.0, 2.0, 1.0], se=[0.0, 0.0, 0.0])
        breaks = TraceSummary(mean=[4.0, 3.0, 1.0], se=[0.0, 0.0, 0.0])
        assert drift_check("v", n, holds, rho=0.5, lam=1.0, C=0.0).passed
        assert not drift_check("v", n, breaks, rho=0.5, lam=1.0, C=0.0).passed

    def test_drift_factor(self):
        trace = TraceSummary(mean=[1.0, 1.0], se=[0.0, 0.0])
        with pytest.raises(DomainError):
            drift_check("v", [0, 1], trace, rho=1.0, lam=0.1, C=1.0)

    def test_sup_bound(self):
        trace = TraceSummary(mean=[1.0, 2.0], se=[0.0, 0.0])
        assert sup_bound_check("v", [0, 1], trace, ScaledValue.from_value(5.0)).passed
        failed = sup_bound_check("v", [0, 1], trace, ScaledValue.from_value(1.5))
        assert not failed.passed
        assert failed.margin == pytest.approx(-0.5, abs=1e-6)

    def test_ula_second_moment_bound(self):
        base = compute_base(1.0, 1.0, 1.0, 1)
        bound = ula_second_moment_bound(base, 0.1, np.array([0, 10**6]), offset_sq=3.0)
        assert bound[0] == pytest.approx(3.0)
        assert bound[1] == pytest.approx(2.0)

    def test_geometric_convergence(self, scalar_oracle):
        base = compute_base(1.0, 1.0, 1.0, 1)
        check = geometric_convergence_check(scalar_oracle, base, 0.25, [0, 5, 20], theta0=[2.0])
        assert check.passed
        assert check.observed[0] > check.observed[-1]

    def test_coupled_envelope(self, scalar_oracle, ar_spec):
        stats = run_coupled(scalar_oracle, ar_spec, _config())
        assert coupled_envelope_check(stats, ScaledValue.from_value(1e6), p=4).passed
        assert not coupled_envelope_check(stats, ScaledValue.from_value(1e-6), p=4).passed
