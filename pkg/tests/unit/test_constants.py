"""
Unit tests for the explicit constants and the accuracy planners.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from langmix.constants.base import ScaledValue, compute_base, log_sum
from langmix.constants.bias import bias_constants, c_bias, c_hat
from langmix.constants.chain import ChainInputs, MixingInputs, ThetaZeroMoments, compute_chain
from langmix.constants.iid import iid_C, iid_law_moments, lambda0, relaxed_step_bound
from langmix.constants.moments import compute_Cdprime, compute_Cprime
from langmix.constants.planners import (
    DependentPlanInputs,
    IIDPlanInputs,
    choose_p,
    plan_dependent,
    plan_iid,
)
from langmix.constants.report import constant_report
from langmix.errors import DomainError, HypothesisViolationError, StepSizeError
from langmix.streams.spec import LinearProcessSpec


@pytest.fixture
def unit_base():
    """a = L1 = L2 = 1, d = 1: lambda_bar = 1, a_tilde = 1/2."""
    return compute_base(1.0, 1.0, 1.0, 1)


@pytest.fixture
def iid_mixing():
    return MixingInputs.from_stream(LinearProcessSpec.iid(), [8, 4, 2])


class TestBase:
    """Test lambda_bar, a_tilde and the overflow-safe scalar."""

    def test_hand_values(self, unit_base):
        assert unit_base.lambda_bar == pytest.approx(1.0)
        assert unit_base.a_tilde == pytest.approx(0.5)
        assert unit_base.rho_lambda(0.5) == pytest.approx(0.75)

    def test_step_guard(self, unit_base):
        unit_base.check_step(0.99)
        for lam in (0.0, 1.0, 1.5):
            with pytest.raises(StepSizeError):
                unit_base.check_step(lam)

    def test_zero_data_lipschitz_allowed(self):
        assert compute_base(1.0, 2.0, 0.0, 3).L2 == 0.0

    @pytest.mark.parametrize(
        "args", [(0.0, 1.0, 1.0, 1), (1.0, -1.0, 1.0, 1), (1.0, 1.0, -1.0, 1), (1.0, 1.0, 1.0, 0)]
    )
    def test_invalid_inputs(self, args):
        with pytest.raises(DomainError):
            compute_base(*args)

    def test_scaled_value_overflow(self):
        big = ScaledValue.from_log(1000.0)
        assert big.overflow
        assert big.value is None
        assert big.log10_value == pytest.approx(1000.0 / math.log(10.0))
        assert big.root(1000.0) == pytest.approx(math.e)
        with pytest.raises(DomainError):
            big.require()

    def test_scaled_value_zero(self):
        assert ScaledValue.from_value(0.0).value == 0.0
        with pytest.raises(DomainError):
            ScaledValue.from_value(-1.0)

    def test_log_sum(self):
        assert log_sum([0.0, 0.0]) == pytest.approx(math.log(2.0))
        assert log_sum([-math.inf, 1.0]) == pytest.approx(1.0)
        assert log_sum([]) == -math.inf


class TestMomentConstants:
    """Test C'(p), C''(p) and their dominating roots."""

    def test_cprime_at_unit_inputs(self):
        """C'(1) = 2 + 8 when d = 1 and a_tilde = 1."""
        constants = compute_Cprime(1, 1, 1.0)
        assert constants.C.value == pytest.approx(10.0)
        assert constants.c == pytest.approx(2.0**1.5 + 24.0)
        assert constants.dominance_ok

    @given(
        p=st.integers(min_value=1, max_value=8),
        d=st.integers(min_value=1, max_value=64),
        a_tilde=st.floats(min_value=0.05, max_value=50.0),
    )
    @settings(max_examples=200)
    def test_cprime_root_dominated(self, p, d, a_tilde):
        """Property: C'(p)^{1/2p} <= c'(p)."""
        assert compute_Cprime(p, d, a_tilde).dominance_ok

    @given(d=st.integers(min_value=1, max_value=1000))
    @settings(max_examples=50)
    def test_cprime_scales_like_d_to_the_p(self, d):
        """Property: for fixed a_tilde, C'(p) / d^p does not depend on d."""
        ratio = compute_Cprime(3, d, 0.5).C.log_value - 3 * math.log(d)
        assert ratio == pytest.approx(compute_Cprime(3, 1, 0.5).C.log_value, rel=1e-12)

    def test_invalid_order(self):
        with pytest.raises(DomainError):
            compute_Cprime(0, 1, 1.0)
        with pytest.raises(DomainError):
            compute_Cprime(2, 1, 0.0)

    def test_cdprime_grows_with_data_moment(self):
        small = compute_Cdprime(2, 1, 0.5, 1.0, 1.0, 0.0, 1.0, 0.0)
        large = compute_Cdprime(2, 1, 0.5, 1.0, 1.0, 0.0, 100.0, 0.0)
        assert large.C.log_value > small.C.log_value

    def test_cdprime_reduces_to_cprime_without_data(self):
        """With L2 = 0 and H* = 0 the data term vanishes."""
        with_data = compute_Cdprime(2, 3, 0.5, 1.0, 0.0, 0.0, 5.0, 0.0)
        without = compute_Cdprime(2, 3, 0.5, 1.0, 0.0, 0.0, 0.0, 0.0)
        assert with_data.C.log_value == pytest.approx(without.C.log_value)


class TestChain:
    """Test the C_under -> C_flat, C_star -> C0 chain."""

    def test_c0_exceeds_cstar(self, unit_base, iid_mixing):
        report = constant_report(unit_base, 4, iid_mixing, ThetaZeroMoments(d=1))
        assert report.C0_gt_Cstar
        assert report.C0.log_value > math.log(report.Cstar)
        assert report.c_lambda == pytest.approx(0.5)

    def test_p_must_be_even(self, unit_base, iid_mixing):
        with pytest.raises(DomainError):
            compute_chain(
                ChainInputs(base=unit_base, p=3, mixing=iid_mixing, theta0=ThetaZeroMoments(d=1))
            )

    def test_missing_mixing_order(self, unit_base):
        mixing = MixingInputs(script_M={2: 1.0}, C32=1.0, C21=1.0)
        with pytest.raises(DomainError):
            compute_chain(
                ChainInputs(base=unit_base, p=4, mixing=mixing, theta0=ThetaZeroMoments(d=1))
            )

    def test_dimension_law(self, iid_mixing):
        """C0 built from the proof's C_flat grows exactly like sqrt(d) when L2 = 0."""
        ratios = []
        for d in (1, 4, 16, 64):
            chain = compute_chain(
                ChainInputs(
                    base=compute_base(1.0, 1.0, 0.0, d),
                    p=4,
                    mixing=iid_mixing,
                    theta0=ThetaZeroMoments(d=d),
                )
            )
            ratios.append(chain.C0_proof.log_value - 0.5 * math.log(d))
        assert max(ratios) - min(ratios) <= 1e-9

    def test_statement_flat_constant_is_linear_in_d(self, iid_mixing):
        chains = [
            compute_chain(
                ChainInputs(
                    base=compute_base(1.0, 1.0, 0.0, d),
                    p=4,
                    mixing=iid_mixing,
                    theta0=ThetaZeroMoments(d=d),
                )
            )
            for d in (1, 4)
        ]
        assert chains[1].Cflat_stmt > chains[0].Cflat_stmt * 2.0

    def test_theta0_moments(self):
        point = ThetaZeroMoments(d=2, offset_norm=3.0)
        assert point.norm(4) == 3.0
        assert point.second_moment() == 9.0
        gaussian = ThetaZeroMoments(d=1, std=2.0)
        assert gaussian.norm(2) == pytest.approx(2.0)
        assert gaussian.norm(4) == pytest.approx(2.0 * 3.0**0.25)
        shifted = ThetaZeroMoments(d=3, offset_norm=1.0, std=0.5)
        assert shifted.norm(2) ** 2 == pytest.approx(shifted.second_moment())

    def test_mixing_from_stream(self, iid_mixing):
        assert iid_mixing.M(2) == pytest.approx(1.0)
        assert iid_mixing.M(8) == pytest.approx(105.0)
        assert iid_mixing.C21 == pytest.approx(1.0)
        # Order 3 is bounded by order 4, so Gamma_3 = 3^{1/4}
        assert iid_mixing.C32 == pytest.approx(math.sqrt(3.0))


class TestBias:
    """Test c_hat and c(lambda)."""

    def test_limit_at_zero(self, unit_base):
        assert c_bias(unit_base, 0.0) == pytest.approx(1.0 / 0.5)

    @given(
        lo=st.floats(min_value=1e-6, max_value=0.5),
        hi=st.floats(min_value=0.5, max_value=0.99),
    )
    @settings(max_examples=100)
    def test_increasing_in_lambda(self, lo, hi):
        """Property: c(lambda) is nondecreasing."""
        base = compute_base(1.0, 1.0, 1.0, 3)
        assert c_bias(base, lo) <= c_bias(base, hi)

    def test_c_hat(self, unit_base):
        assert c_hat(unit_base) == pytest.approx(2.0)
        assert c_hat(unit_base, 2.0) == pytest.approx(math.sqrt(8.0))
        with pytest.raises(DomainError):
            c_hat(unit_base, -1.0)

    def test_bias_constants_guard_step(self, unit_base):
        with pytest.raises(StepSizeError):
            bias_constants(1.0, unit_base)
        constants = bias_constants(0.25, unit_base)
        assert constants.c == pytest.approx(c_bias(unit_base, 0.25))


class TestIndependentData:
    """Test the i.i.d.-setting law moments and constants."""

    def test_law_moments_without_growth(self):
        law = iid_law_moments(LinearProcessSpec.iid(), 0.0)
        assert law.growth_rho == pytest.approx(1.0)
        assert law.growth_2rho_2 == pytest.approx(2.0 + 2.0 * math.sqrt(2.0 / math.pi))
        assert law.var_W == pytest.approx(1.0)

    def test_dependent_stream_refused(self, ar_spec):
        with pytest.raises(DomainError):
            iid_law_moments(ar_spec, 0.0)

    def test_lambda0(self):
        assert lambda0(1.0, 1.0, 1.0) == pytest.approx(0.5)
        assert lambda0(4.0, 1.0, 1.0) == pytest.approx(0.25)
        assert relaxed_step_bound(1.0, 1.0) == pytest.approx(0.5)

    def test_iid_C(self):
        assert iid_C(0.0, 0.0, 1.0, 0.0, 3) == pytest.approx(6.0)
        assert iid_C(1.0, 0.0, 2.0, 1.0, 1) == pytest.approx(8.0 + 4.0 + 2.0)


class TestPlanners:
    """Test the epsilon -> (lambda, n) planners."""

    @given(kappa=st.floats(min_value=0.01, max_value=10.0))
    @settings(max_examples=100)
    def test_choose_p(self, kappa):
        """Property: p is the smallest even p >= 4 with kappa > 2/(p-1)."""
        p = choose_p(kappa)
        assert p >= 4 and p % 2 == 0
        assert kappa > 2.0 / (p - 1)
        assert p == 4 or not kappa > 2.0 / (p - 3)

    @pytest.mark.parametrize("kappa, p", [(1.0, 4), (0.5, 6), (0.1, 22)])
    def test_choose_p_values(self, kappa, p):
        assert choose_p(kappa) == p

    @pytest.mark.parametrize("epsilon", [0.05, 0.2, math.exp(-1.0)])
    def test_dependent_plan_consistent(self, unit_base, iid_mixing, epsilon):
        plan = plan_dependent(
            epsilon,
            1.0,
            DependentPlanInputs(base=unit_base, mixing=iid_mixing, theta0=ThetaZeroMoments(d=1)),
        )
        assert plan.p == 4
        assert 0.0 < plan.lam < unit_base.lambda_bar
        assert plan.contraction_ok
        assert plan.half_budget_ok
        assert plan.tail_ok

    def test_dependent_plan_epsilon_range(self, unit_base, iid_mixing):
        inputs = DependentPlanInputs(
            base=unit_base, mixing=iid_mixing, theta0=ThetaZeroMoments(d=1)
        )
        with pytest.raises(HypothesisViolationError):
            plan_dependent(0.5, 1.0, inputs)

    @pytest.mark.parametrize("epsilon", [0.1, 0.3, 0.5])
    def test_iid_plan_identities(self, epsilon):
        """lambda = min(c1 eps^2, step bound), n = ceil(c2 eps^-2 ln(1/eps)), c1 = 1/(4 C_bar)."""
        inputs = IIDPlanInputs(
            a=1.0, L1=1.0, L2=1.0, d=1, law=iid_law_moments(LinearProcessSpec.iid(), 0.0)
        )
        plan = plan_iid(epsilon, inputs)
        horizon = plan.c2 * epsilon**-2 * math.log(1.0 / epsilon)
        assert plan.c1 == pytest.approx(1.0 / (4.0 * plan.Cbar))
        assert plan.lam == pytest.approx(min(plan.c1 * epsilon**2, plan.step_bound))
        assert horizon * (1.0 - 1e-9) <= plan.n_min < horizon + 1.0
        assert plan.Cbar >= max(plan.cbar, plan.c_hat, plan.c)

    def test_iid_plan_epsilon_range(self):
        inputs = IIDPlanInputs(
            a=1.0, L1=1.0, L2=1.0, d=1, law=iid_law_moments(LinearProcessSpec.iid(), 0.0)
        )
        with pytest.raises(HypothesisViolationError):
            plan_iid(0.6, inputs)
