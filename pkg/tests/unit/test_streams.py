"""
Unit tests for linear-process streams, seeding and spectral quantities.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from langmix.errors import ContractViolationError, DomainError
from langmix.streams.rng import STREAM_CHANNEL, make_generator, rng_algorithm
from langmix.streams.spec import LinearProcessSpec, truncation_order
from langmix.streams.spectral import (
    autocovariance,
    coupled_variance_closed_form,
    parseval_check,
    spectral_bounds,
    spectral_coupled_variance,
    spectral_coupled_variance_detail,
    spectral_density_modulus,
)
from langmix.streams.state import (
    StreamState,
    stationary_draws,
    stream_init,
    stream_next,
    stream_take,
)


def _direct_convolution(spec: LinearProcessSpec, seed: int, paths: int, steps: int) -> np.ndarray:
    """Replay the innovations of ``stream_init``/``stream_take`` and filter them by hand."""
    rng = make_generator(seed, STREAM_CHANNEL)
    ring = rng.standard_normal((spec.K + 1, paths, spec.m))
    fresh = rng.standard_normal((steps, paths, spec.m))
    eps = np.concatenate([ring, fresh], axis=0)
    a = spec.coefficients
    out = np.zeros((steps, paths, spec.m))
    for t in range(steps):
        for k in range(spec.K + 1):
            out[t] += a[k] * eps[t + 1 - k + spec.K]
    return out


class TestLinearProcessSpec:
    """Test stream specifications."""

    def test_iid(self):
        spec = LinearProcessSpec.iid(m=3)
        assert spec.K == 0
        assert spec.m == 3
        assert spec.is_iid
        assert spec.sigma == 1.0

    def test_empty_coefficients_rejected(self):
        with pytest.raises(ValidationError):
            LinearProcessSpec(coeffs=())

    def test_non_finite_coefficients_rejected(self):
        with pytest.raises(ValidationError):
            LinearProcessSpec(coeffs=(1.0, float("nan")))

    def test_decay_certificate_enforced(self):
        """Coefficients above c (1+k)^-beta are refused."""
        with pytest.raises(ValidationError):
            LinearProcessSpec(coeffs=(1.0, 0.9), decay_cert={"c": 1.0, "beta": 2.0})

    def test_beta_must_exceed_three_halves(self):
        with pytest.raises(ValidationError):
            LinearProcessSpec.from_decay(1.0, 1.5)

    def test_from_decay_truncation(self):
        """The dropped tail carries less than the truncation tolerance."""
        spec = LinearProcessSpec.from_decay(1.0, 2.0, tol=1e-8)
        K = truncation_order(1.0, 2.0, 1e-8)
        assert spec.K == K
        # Integral bound on the dropped tail
        assert (1.0 + K) ** (1.0 - 4.0) / 3.0 < 1e-8
        assert spec.coeffs[0] == 1.0
        assert spec.coeffs[1] == pytest.approx(0.25)

    def test_tail_sigma(self, ar_spec):
        assert ar_spec.tail_sigma(0) == pytest.approx(ar_spec.sigma)
        assert ar_spec.tail_sigma(2) == pytest.approx(0.25)
        assert ar_spec.tail_sigma(3) == 0.0

    def test_with_spectral_bounds(self):
        spec = LinearProcessSpec(coeffs=(1.0, 0.5)).with_spectral_bounds()
        assert spec.m_bound == pytest.approx(0.5, abs=1e-6)
        assert spec.M_bound == pytest.approx(1.5, abs=1e-6)


class TestSeeding:
    """Test counter-based generator derivation."""

    def test_same_keys_same_draws(self):
        a = make_generator(7, 1, 2).standard_normal(5)
        b = make_generator(7, 1, 2).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_different_keys_differ(self):
        a = make_generator(7, 1, 2).standard_normal(5)
        b = make_generator(7, 2, 1).standard_normal(5)
        assert not np.array_equal(a, b)

    def test_seed_range(self):
        with pytest.raises(ValueError):
            make_generator(-1)
        with pytest.raises(ValueError):
            make_generator(2**64)

    def test_algorithm_recorded(self):
        assert rng_algorithm().startswith("numpy.random.Philox")


class TestStreamState:
    """Test stream generation."""

    def test_take_requires_init(self, iid_spec):
        with pytest.raises(ContractViolationError):
            stream_take(StreamState(seed=1), iid_spec, 3)

    def test_ring_must_match_spec(self, iid_spec, ar_spec):
        state = stream_init(iid_spec, seed=1)
        with pytest.raises(ContractViolationError):
            stream_take(state, ar_spec, 1)

    def test_paths_must_be_positive(self):
        with pytest.raises(DomainError):
            StreamState(seed=1, paths=0)

    def test_next_matches_take(self, ar_spec):
        """n single steps consume the innovations exactly like one n-step take."""
        bulk = stream_take(stream_init(ar_spec, seed=11, paths=4), ar_spec, 25)

        state = stream_init(ar_spec, seed=11, paths=4)
        steps = []
        for _ in range(25):
            value, state = stream_next(state, ar_spec)
            steps.append(value)

        np.testing.assert_array_equal(np.stack(steps), bulk)
        assert state.n == 25

    def test_split_takes_match(self, ar_spec):
        whole = stream_take(stream_init(ar_spec, seed=3, paths=2), ar_spec, 30)
        state = stream_init(ar_spec, seed=3, paths=2)
        parts = [stream_take(state, ar_spec, k) for k in (7, 0, 23)]
        np.testing.assert_array_equal(np.concatenate(parts), whole)

    @pytest.mark.parametrize("coeffs", [(1.0, 0.5, 0.25), tuple(0.9**k for k in range(100))])
    def test_output_is_the_filtered_innovations(self, coeffs):
        """Direct and FFT paths both equal the hand-computed causal filter."""
        spec = LinearProcessSpec(coeffs=coeffs)
        got = stream_take(stream_init(spec, seed=5, paths=3), spec, 40)
        expected = _direct_convolution(spec, seed=5, paths=3, steps=40)
        np.testing.assert_allclose(got, expected, rtol=1e-10, atol=1e-10)

    def test_stationary_variance(self, ar_spec):
        draws = stationary_draws(ar_spec, 20_000, seed=2)
        assert draws.shape == (20_000, 1)
        assert np.var(draws) == pytest.approx(ar_spec.sigma**2, rel=0.05)


class TestSpectral:
    """Test the spectral density and the coupled-variance quadrature."""

    def test_density_of_iid_stream_is_flat(self, iid_spec):
        mu = np.linspace(-np.pi, np.pi, 7)
        np.testing.assert_allclose(spectral_density_modulus(iid_spec, mu), 1.0)

    def test_bounds_of_first_order_filter(self):
        bounds = spectral_bounds(LinearProcessSpec(coeffs=(1.0, 0.5)))
        assert bounds.m_bound == pytest.approx(0.5, abs=1e-6)
        assert bounds.M_bound == pytest.approx(1.5, abs=1e-6)
        assert not bounds.degenerate

    def test_degenerate_filter_flagged(self):
        assert spectral_bounds(LinearProcessSpec(coeffs=(1.0, 1.0))).degenerate

    def test_grid_minimum(self, iid_spec):
        with pytest.raises(DomainError):
            spectral_bounds(iid_spec, grid=16)

    @pytest.mark.parametrize("lam, n", [(0.5, 1), (0.1, 50), (0.02, 200)])
    def test_iid_quadrature_matches_closed_form(self, iid_spec, lam, n):
        value = spectral_coupled_variance(iid_spec, lam, n)
        assert value == pytest.approx(coupled_variance_closed_form(lam, n), rel=1e-9)

    def test_closed_form_limit(self):
        """lambda (1 - (1-lambda)^{2n}) / (2 - lambda) -> 1/3 at lambda = 1/2."""
        assert coupled_variance_closed_form(0.5, 10_000) == pytest.approx(1.0 / 3.0)

    def test_n_zero(self, ar_spec):
        assert spectral_coupled_variance(ar_spec, 0.1, 0) == 0.0

    def test_step_outside_unit_interval(self, ar_spec):
        with pytest.raises(DomainError):
            spectral_coupled_variance(ar_spec, 1.0, 5)
        with pytest.raises(DomainError):
            spectral_coupled_variance(ar_spec, 0.1, -1)

    def test_spectral_bracket(self):
        result = spectral_coupled_variance_detail(LinearProcessSpec(coeffs=(1.0, 0.5)), 0.1, 100)
        assert result.lower <= result.value <= result.upper
        assert result.error_estimate < 1e-9

    def test_parseval(self, ar_spec):
        quadrature, direct = parseval_check(ar_spec)
        assert quadrature == pytest.approx(direct, rel=1e-12)

    def test_autocovariance(self, ar_spec):
        assert autocovariance(ar_spec, 0) == pytest.approx(1.3125)
        assert autocovariance(ar_spec, 1) == pytest.approx(0.625)
        assert autocovariance(ar_spec, -1) == pytest.approx(0.625)
        assert autocovariance(ar_spec, 5) == 0.0
