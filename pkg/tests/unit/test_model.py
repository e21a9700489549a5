"""
Unit tests for gradient oracles, mean-field evaluation and structural checks.
"""

import numpy as np
import pytest

from langmix.errors import ContractViolationError, DomainError, UnsupportedOperationError
from langmix.model.checks import b2_alt_check, check_structural_constants
from langmix.model.operations import eval_H, eval_h
from langmix.model.oracles import CallableOracle, IIDRhoOracle, OracleFamily, QuadraticOracle
from langmix.streams.spec import LinearProcessSpec


class TestQuadraticOracle:
    """Test H(theta, x) = S(theta - theta*) + Bx."""

    def test_constants(self, diagonal_oracle):
        constants = diagonal_oracle.constants()
        assert constants.family == OracleFamily.QUADRATIC
        assert constants.a == pytest.approx(1.0)
        assert constants.L1_per_coord == pytest.approx([1.0, 2.0])
        assert constants.L1 == pytest.approx(3.0)
        assert constants.L2 == pytest.approx(2.0)
        assert constants.H_star == 0.0

    def test_batched_evaluation(self, diagonal_oracle):
        theta = np.array([[1.0, 1.0], [2.0, -1.0]])
        x = np.array([[0.5, 0.0], [0.0, 0.5]])
        expected = np.array([[1.5, 2.0], [2.0, -1.5]])
        np.testing.assert_allclose(eval_H(diagonal_oracle, theta, x), expected)

    def test_scalar_inputs(self, scalar_oracle):
        np.testing.assert_allclose(scalar_oracle.H(2.0, 1.0), [3.0])
        np.testing.assert_allclose(scalar_oracle.h(2.0), [2.0])

    def test_minimiser(self):
        oracle = QuadraticOracle(S=2.0, theta_star=[3.0], B=1.0)
        np.testing.assert_allclose(oracle.H([3.0], [0.0]), [0.0])
        np.testing.assert_allclose(oracle.h([4.0]), [2.0])

    def test_dimension_mismatch(self, diagonal_oracle):
        with pytest.raises(ContractViolationError):
            diagonal_oracle.H(np.zeros(3), np.zeros(2))
        with pytest.raises(ContractViolationError):
            diagonal_oracle.H(np.zeros(2), np.zeros(1))

    @pytest.mark.parametrize(
        "S",
        [
            [[1.0, 0.5], [0.0, 1.0]],
            [[1.0, 0.0], [0.0, -1.0]],
            [[1.0, 2.0, 3.0]],
        ],
    )
    def test_invalid_matrix(self, S):
        with pytest.raises(DomainError):
            QuadraticOracle(S=S)

    def test_loading_rows_must_match(self):
        with pytest.raises(DomainError):
            QuadraticOracle(S=np.eye(2), B=np.ones((3, 1)))

    def test_declared_a_must_be_positive(self):
        with pytest.raises(DomainError):
            QuadraticOracle(S=1.0, a=0.0)


class TestOtherOracles:
    """Test the iid-rho family and callable oracles."""

    def test_h_star_is_recomputed(self):
        oracle = CallableOracle(
            H=lambda t, x: t + 1.0,
            d=2,
            m=1,
            theta_star=[0.0, 0.0],
            a=1.0,
            L1_per_coord=[1.0, 1.0],
            L2_per_coord=[0.0, 0.0],
        )
        assert oracle.H_star == pytest.approx(2.0)
        assert not oracle.has_closed_form_h

    def test_iid_rho_growth(self):
        oracle = IIDRhoOracle(scale=2.0, rho=1.0, mean_growth=1.5, theta_star=[1.0])
        # A(x) = s (1 + |x|)^rho
        np.testing.assert_allclose(oracle.H([2.0], [3.0]), [8.0])
        np.testing.assert_allclose(oracle.h([2.0]), [3.0])
        assert oracle.a == pytest.approx(3.0)
        assert not oracle.lipschitz_in_data

    def test_negative_rho_rejected(self):
        with pytest.raises(DomainError):
            IIDRhoOracle(scale=1.0, rho=-0.5, mean_growth=1.0)


class TestMeanField:
    """Test eval_h."""

    def test_closed_form(self, scalar_oracle):
        estimate = eval_h(scalar_oracle, np.array([1.5]))
        assert estimate.closed_form
        assert estimate.value == [1.5]
        assert estimate.std_error == [0.0]

    def test_monte_carlo(self, scalar_oracle, ar_spec):
        """Streams are centred, so the Monte Carlo mean field matches h."""
        estimate = eval_h(scalar_oracle, np.array([1.5]), stream=ar_spec, samples=20_000, seed=4)
        assert not estimate.closed_form
        assert estimate.samples == 20_000
        assert abs(estimate.value[0] - 1.5) <= 5.0 * estimate.std_error[0]

    def test_no_closed_form(self):
        oracle = CallableOracle(
            H=lambda t, x: t + x,
            d=1,
            m=1,
            theta_star=[0.0],
            a=1.0,
            L1_per_coord=[1.0],
            L2_per_coord=[1.0],
        )
        with pytest.raises(UnsupportedOperationError):
            eval_h(oracle, np.zeros(1))

    def test_stream_dimension(self, scalar_oracle):
        with pytest.raises(DomainError):
            eval_h(scalar_oracle, np.zeros(1), stream=LinearProcessSpec.iid(m=2))


class TestStructuralChecks:
    """Test randomized validation of declared constants."""

    def test_true_constants_pass(self, diagonal_oracle):
        report = check_structural_constants(diagonal_oracle, trials=500, seed=1)
        assert report.passed
        assert report.n_violations == 0

    def test_overstated_monotonicity(self):
        report = check_structural_constants(QuadraticOracle(S=1.0, a=2.0), trials=200, seed=1)
        assert not report.passed
        assert report.counts["monotonicity"] > 0

    def test_understated_lipschitz(self):
        """Probe directions catch an L1 below the row norm."""
        oracle = QuadraticOracle(S=np.diag([1.0, 2.0]), B=np.eye(2), L1_per_coord=[1.0, 1.0])
        report = check_structural_constants(oracle, trials=50, seed=3)
        assert report.counts.get("lipschitz", 0) > 0
        assert all(v.coordinate == 1 for v in report.violations)

    def test_iid_rho_local_bound(self):
        oracle = IIDRhoOracle(scale=1.0, rho=1.0, mean_growth=1.0, d=2)
        report = check_structural_constants(oracle, trials=300, seed=2)
        assert report.passed

    def test_trials_positive(self, scalar_oracle):
        with pytest.raises(DomainError):
            check_structural_constants(scalar_oracle, trials=0, seed=1)

    def test_b2_alt_holds_for_quadratics(self, diagonal_oracle):
        assert b2_alt_check(diagonal_oracle, trials=500, seed=5).passed

    def test_b2_alt_needs_mean_field(self):
        oracle = CallableOracle(
            H=lambda t, x: t,
            d=1,
            m=1,
            theta_star=[0.0],
            a=1.0,
            L1_per_coord=[1.0],
            L2_per_coord=[0.0],
        )
        with pytest.raises(UnsupportedOperationError):
            b2_alt_check(oracle, trials=10, seed=0)
