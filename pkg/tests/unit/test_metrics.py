"""
Unit tests for Wasserstein distances, Gaussian laws and the auxiliary inequalities.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import norm

from langmix.errors import DomainError
from langmix.metrics.inequalities import (
    chi_moment,
    gaussian_norm_moment,
    maximal_moment_check,
    multinomial_inequality_check,
)
from langmix.metrics.measures import EmpiricalMeasure, GaussianLaw
from langmix.metrics.wasserstein import (
    w2_assignment,
    w2_empirical_1d,
    w2_gaussian,
    w2_to_gaussian_1d,
    w2_to_gaussian_diagonal,
)
from langmix.streams.rng import make_generator

finite = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False, allow_infinity=False)
samples_1d = arrays(np.float64, st.integers(min_value=1, max_value=40), elements=finite)


def _rotation(angle: float) -> np.ndarray:
    return np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])


class TestMeasures:
    """Test input validation of measures and laws."""

    def test_empirical_shapes(self):
        assert EmpiricalMeasure([1.0, 2.0, 3.0]).d == 1
        assert EmpiricalMeasure(np.zeros((4, 3))).n == 4

    def test_non_finite_samples(self):
        with pytest.raises(DomainError):
            EmpiricalMeasure([0.0, np.inf])

    def test_empty_samples(self):
        with pytest.raises(DomainError):
            EmpiricalMeasure(np.zeros((0, 2)))

    def test_scalar_covariance_broadcast(self):
        law = GaussianLaw([0.0, 0.0, 0.0], 2.0)
        np.testing.assert_allclose(law.cov, 2.0 * np.eye(3))
        assert law.is_diagonal

    @pytest.mark.parametrize("cov", [[[1.0, 2.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, -1.0]]])
    def test_invalid_covariance(self, cov):
        with pytest.raises(DomainError):
            GaussianLaw([0.0, 0.0], cov)


class TestWassersteinOneDimensional:
    """Test the quantile-coupling distances."""

    @given(x=samples_1d, shift=finite)
    @settings(max_examples=100)
    def test_translation(self, x, shift):
        """Property: W2(mu, mu + c) = |c|."""
        assert w2_empirical_1d(x, x + shift) == pytest.approx(abs(shift), abs=1e-9)

    @given(x=samples_1d, y=samples_1d)
    @settings(max_examples=100)
    def test_symmetry(self, x, y):
        """Property: W2 is symmetric, also for unequal sample counts."""
        assert w2_empirical_1d(x, y) == pytest.approx(w2_empirical_1d(y, x), rel=1e-9, abs=1e-9)

    def test_unequal_sizes(self):
        """Duplicating every point leaves the measure unchanged."""
        x = np.array([0.0, 1.0, 5.0])
        assert w2_empirical_1d(x, np.repeat(x, 2)) == pytest.approx(0.0, abs=1e-12)
        assert w2_empirical_1d([0.0], [1.0, 1.0]) == pytest.approx(1.0)

    def test_rejects_multivariate(self):
        with pytest.raises(DomainError):
            w2_empirical_1d(np.zeros((3, 2)), np.zeros((3, 2)))

    def test_point_mass_target(self):
        x = np.array([1.0, -1.0, 3.0])
        assert w2_to_gaussian_1d(x, 0.0, 0.0) == pytest.approx(math.sqrt(11.0 / 3.0))

    def test_quantile_sample_is_close_to_its_gaussian(self):
        n = 10_000
        x = norm.ppf((np.arange(n) + 0.5) / n)
        assert w2_to_gaussian_1d(x, 0.0, 1.0) < 0.05

    @given(shift=finite)
    @settings(max_examples=50)
    def test_gaussian_target_translation(self, shift):
        """Property: shifting samples and target together leaves W2 unchanged."""
        x = make_generator(1).standard_normal(200)
        base = w2_to_gaussian_1d(x, 0.0, 1.5)
        assert w2_to_gaussian_1d(x + shift, shift, 1.5) == pytest.approx(base, rel=1e-6, abs=1e-6)

    def test_mean_offset(self):
        """A sample far from the target is at distance about the offset."""
        x = make_generator(2).standard_normal(5000)
        assert w2_to_gaussian_1d(x + 10.0, 0.0, 1.0) == pytest.approx(10.0, abs=0.1)

    def test_diagonal_target(self):
        rng = make_generator(3)
        x = rng.standard_normal((4000, 2)) * np.array([1.0, 2.0])
        law = GaussianLaw([0.0, 0.0], np.diag([1.0, 4.0]))
        per_coordinate = [
            w2_to_gaussian_1d(x[:, 0], 0.0, 1.0),
            w2_to_gaussian_1d(x[:, 1], 0.0, 2.0),
        ]
        assert w2_to_gaussian_diagonal(x, law) == pytest.approx(np.hypot(*per_coordinate))

    def test_negative_std(self):
        with pytest.raises(DomainError):
            w2_to_gaussian_1d([0.0], 0.0, -1.0)


class TestWassersteinGaussian:
    """Test the Bures formula."""

    def test_one_dimensional(self):
        p = GaussianLaw([1.0], [[4.0]])
        q = GaussianLaw([0.0], [[1.0]])
        assert w2_gaussian(p, q) == pytest.approx(math.sqrt(1.0 + 1.0))

    def test_rotation_invariance(self):
        """The general formula on rotated laws equals the diagonal formula."""
        p = GaussianLaw([0.0, 0.0], np.diag([1.0, 4.0]))
        q = GaussianLaw([1.0, 0.0], np.diag([4.0, 1.0]))
        R = _rotation(0.3)
        p_rot = GaussianLaw(R @ p.mean, R @ p.cov @ R.T)
        q_rot = GaussianLaw(R @ q.mean, R @ q.cov @ R.T)

        assert w2_gaussian(p, q) == pytest.approx(math.sqrt(3.0))
        assert w2_gaussian(p_rot, q_rot) == pytest.approx(math.sqrt(3.0), rel=1e-8)

    def test_identical_laws(self):
        cov = np.array([[2.0, 0.5], [0.5, 1.0]])
        law = GaussianLaw([1.0, 2.0], cov)
        assert w2_gaussian(law, law) == pytest.approx(0.0, abs=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            w2_gaussian(GaussianLaw([0.0], 1.0), GaussianLaw([0.0, 0.0], 1.0))


class TestWassersteinAssignment:
    """Test the exact discrete distance."""

    def test_permutation_is_free(self):
        x = make_generator(4).standard_normal((50, 3))
        assert w2_assignment(x, x[::-1]) == pytest.approx(0.0, abs=1e-12)

    def test_agrees_with_quantile_coupling(self):
        rng = make_generator(5)
        x, y = rng.standard_normal(60), rng.standard_normal(60) + 0.5
        assert w2_assignment(x, y) == pytest.approx(w2_empirical_1d(x, y), rel=1e-9)

    def test_unequal_sizes(self):
        with pytest.raises(DomainError):
            w2_assignment(np.zeros((3, 2)), np.zeros((4, 2)))

    def test_size_limit(self):
        with pytest.raises(DomainError):
            w2_assignment(np.zeros(2049), np.zeros(2049))


class TestInequalities:
    """Test the Gaussian moment bound and the expansion and maximal-moment bounds."""

    def test_chi_moments(self):
        assert chi_moment(1, 2) == pytest.approx(1.0)
        assert chi_moment(3, 2) == pytest.approx(3.0)
        assert chi_moment(1, 4) == pytest.approx(3.0)
        with pytest.raises(DomainError):
            chi_moment(1, -1)

    @given(d=st.integers(min_value=1, max_value=10), r=st.integers(min_value=1, max_value=6))
    @settings(max_examples=60)
    def test_gaussian_norm_moment_bound(self, d, r):
        """Property: E||xi||^{2r} <= 2^{2r} d^r r^{3r/2}."""
        check = gaussian_norm_moment(d, r)
        assert check.holds
        assert check.exact <= check.bound

    @given(
        x=arrays(np.float64, 3, elements=st.floats(-10.0, 10.0)),
        y=arrays(np.float64, 3, elements=st.floats(-10.0, 10.0)),
        p=st.integers(min_value=1, max_value=5),
    )
    @settings(max_examples=200)
    def test_multinomial_expansion(self, x, y, p):
        """Property: the restricted expansion of ||x+y||^{2p} is below the binomial bound."""
        check = multinomial_inequality_check(x, y, p)
        assert check.passed
        assert check.lhs <= check.rhs_restricted * (1.0 + 1e-12) + 1e-300

    @given(
        x=arrays(np.float64, 3, elements=st.floats(-10.0, 10.0)),
        y=arrays(np.float64, 3, elements=st.floats(-10.0, 10.0)),
        p=st.integers(min_value=1, max_value=5),
    )
    @settings(max_examples=200)
    def test_multinomial_norm_sum_matches_binomial(self, x, y, p):
        """Property: with <x,y> -> ||x|| ||y|| the trinomial sum is the binomial one."""
        check = multinomial_inequality_check(x, y, p)
        assert check.rhs_restricted == pytest.approx(check.rhs, rel=1e-9, abs=1e-9)

    @pytest.mark.parametrize(
        "x, y, p, expected",
        [
            ([1.0], [1.0], 2, 12.0),
            ([1.0, 0.0], [2.0, 0.0], 3, 717.0),
            ([0.0, 3.0], [0.0, 1.0], 1, 10.0),
        ],
    )
    def test_multinomial_parallel_equality(self, x, y, p, expected):
        check = multinomial_inequality_check(x, y, p)
        assert check.lhs == pytest.approx(expected)
        assert check.rhs == pytest.approx(expected)
        assert check.passed

    def test_multinomial_without_cross_term(self):
        check = multinomial_inequality_check([1.0, 0.0], [0.0, 0.0], 2)
        assert check.lhs == pytest.approx(1.0)
        assert check.rhs == pytest.approx(1.0)

    def test_maximal_moment_bound(self):
        samples = make_generator(6).standard_normal((500, 8, 2))
        check = maximal_moment_check(samples, r=2.0, p=4.0)
        assert check.j == 8
        assert check.passed

    def test_maximal_moment_orders(self):
        with pytest.raises(DomainError):
            maximal_moment_check(np.ones((3, 2)), r=4.0, p=2.0)
