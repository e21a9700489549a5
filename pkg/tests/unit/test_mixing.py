"""
Unit tests for mixing profiles and the weighted-sum moment inequalities.
"""

import math

import numpy as np
import pytest

from langmix.errors import DomainError, UnsupportedOperationError
from langmix.mixing.gamma import (
    chi_root,
    gamma_linear_analytic,
    gamma_mc_estimate,
    stationary_moment_root,
)
from langmix.mixing.maximal import (
    maximal_constant,
    maximal_inequality_check,
    moment_constant,
    moment_inequality_check,
)
from langmix.mixing.profile import Provenance, certificate_remainder, profile_build
from langmix.streams.spec import LinearProcessSpec


class TestGamma:
    """Test the mixing coefficients gamma_r(tau)."""

    def test_chi_root_double_factorial(self):
        """(E Z^4)^{1/4} = 3^{1/4} for a standard normal."""
        assert chi_root(1, 4) == pytest.approx(3.0**0.25)
        assert chi_root(1, 2) == pytest.approx(1.0)

    def test_iid_stream_mixes_at_lag_one(self, iid_spec):
        assert gamma_linear_analytic(iid_spec, 0, 2) == pytest.approx(1.0)
        assert gamma_linear_analytic(iid_spec, 1, 2) == 0.0
        assert gamma_linear_analytic(iid_spec, 7, 4) == 0.0

    def test_tail_standard_deviation(self, ar_spec):
        assert gamma_linear_analytic(ar_spec, 1, 2) == pytest.approx(math.sqrt(0.3125))
        assert gamma_linear_analytic(ar_spec, 2, 4) == pytest.approx(0.25 * 3.0**0.25)

    def test_odd_order_is_unsupported(self, ar_spec):
        with pytest.raises(UnsupportedOperationError):
            gamma_linear_analytic(ar_spec, 0, 3)

    def test_negative_lag(self, ar_spec):
        with pytest.raises(DomainError):
            gamma_linear_analytic(ar_spec, -1, 2)

    def test_stationary_moment_root(self, ar_spec):
        assert stationary_moment_root(ar_spec, 2) == pytest.approx(ar_spec.sigma)
        with pytest.raises(DomainError):
            stationary_moment_root(ar_spec, 0.5)

    def test_monte_carlo_agrees_with_analytic(self, ar_spec):
        estimate, std_error = gamma_mc_estimate(ar_spec, 1, 2, paths=20_000, seed=9)
        exact = gamma_linear_analytic(ar_spec, 1, 2)
        assert std_error > 0
        assert abs(estimate - exact) <= 5.0 * std_error

    def test_monte_carlo_beyond_truncation(self, ar_spec):
        assert gamma_mc_estimate(ar_spec, 5, 2, paths=1000) == (0.0, 0.0)

    def test_monte_carlo_path_floor(self, ar_spec):
        with pytest.raises(DomainError):
            gamma_mc_estimate(ar_spec, 0, 2, paths=10)


class TestProfile:
    """Test profile_build."""

    def test_iid_profile(self, iid_spec):
        profile = profile_build(iid_spec, 4, s=[1.0, 2.0])
        assert profile.provenance == Provenance.ANALYTIC
        assert profile.gamma == pytest.approx([3.0**0.25])
        assert profile.script_M_r == pytest.approx(3.0)
        assert profile.Gamma_r_remainder == 0.0
        assert profile.script_C_rs["4,2"] == pytest.approx(math.sqrt(3.0))

    def test_odd_order_bounded_by_next_even(self, ar_spec):
        """Odd orders use the next even order and say so."""
        profile = profile_build(ar_spec, 3)
        even = profile_build(ar_spec, 4)
        assert profile.provenance == Provenance.ANALYTIC_UPPER
        assert profile.gamma == pytest.approx(even.gamma)
        # M_r itself is exact at every order
        assert profile.M_r == pytest.approx(stationary_moment_root(ar_spec, 3))

    def test_script_M_is_a_power(self, ar_spec):
        profile = profile_build(ar_spec, 2)
        assert profile.script_M_r == pytest.approx(ar_spec.sigma**2)

    def test_short_tau_without_certificate(self, ar_spec):
        profile = profile_build(ar_spec, 2, tau_max=0)
        assert profile.remainder_unbounded
        assert profile.Gamma_r_upper is None

    def test_certificate_bounds_the_remainder(self):
        spec = LinearProcessSpec.from_decay(1.0, 2.5, tol=1e-6)
        partial = profile_build(spec, 2, tau_max=3)
        full = profile_build(spec, 2)
        assert partial.Gamma_r_remainder == pytest.approx(
            certificate_remainder(spec, 3, 2)
        )
        assert partial.Gamma_r < full.Gamma_r <= partial.Gamma_r_upper

    def test_monte_carlo_profile(self, ar_spec):
        profile = profile_build(ar_spec, 2, method="monte-carlo", paths=5000, seed=1)
        assert profile.provenance == Provenance.MONTE_CARLO
        assert len(profile.gamma_std_error) == ar_spec.K + 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"r": 0.5},
            {"r": 2, "tau_max": -1},
            {"r": 2, "s": [0.0]},
            {"r": 2, "method": "spectral"},
            {"r": 2, "method": "monte-carlo", "paths": 10},
        ],
    )
    def test_invalid_arguments(self, ar_spec, kwargs):
        with pytest.raises(DomainError):
            profile_build(ar_spec, **kwargs)


class TestWeightedSumInequalities:
    """Test the maximal and moment inequalities on simulated streams."""

    def test_constants(self):
        assert moment_constant(2) == 1.0
        assert maximal_constant(4) == pytest.approx(
            math.sqrt(3.0) / (math.sqrt(2.0) - 2.0**0.25)
        )
        with pytest.raises(DomainError):
            maximal_constant(2)
        with pytest.raises(DomainError):
            moment_constant(1.5)

    def test_moment_inequality_iid(self, iid_spec):
        report = moment_inequality_check(np.ones(16), iid_spec, 2, replicas=4000, seed=3)
        # E^{1/2}|sum X_i|^2 = 4 exactly; the bound is 4 (M_2 + Gamma_2) = 8
        assert report.lhs == pytest.approx(4.0, rel=0.1)
        assert report.rhs == pytest.approx(8.0)
        assert report.passed

    def test_maximal_inequality_dependent(self, ar_spec):
        weights = 1.0 / np.sqrt(np.arange(1, 33))
        report = maximal_inequality_check(weights, ar_spec, 4, replicas=4000, seed=8)
        assert report.kind == "maximal"
        assert report.passed
        assert report.lhs < report.rhs

    def test_zero_weights(self, iid_spec):
        report = moment_inequality_check(np.zeros(4), iid_spec, 2, replicas=10)
        assert report.lhs == 0.0
        assert report.passed

    def test_replica_floor(self, iid_spec):
        with pytest.raises(DomainError):
            moment_inequality_check(np.ones(4), iid_spec, 2, replicas=1)
