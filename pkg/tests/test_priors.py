"""Prior family, discretization and the prior functionals."""

import math

import mpmath
import numpy as np
import pytest

from bayestherm.errors import ConfigurationError
from bayestherm.priors import (
    GridDistribution,
    PriorSpec,
    alt_functional_g,
    bayesian_information_q,
    bessel_i0,
    discretize,
    no_go_functional_f,
    normalization_k_alpha,
    prior_density,
)

CASE = PriorSpec(alpha=1.0, theta_min=1.0, theta_max=10.0)
UNIFORM = PriorSpec.uniform(1.0, 10.0)

# oracle: extended-precision series evaluation of I0 (mpmath, 40 digits)
I0_HALF = 1.0634833707413235
I0_FIVE = 27.239871823604447
K_ONE = 0.7533876543770904  # exp(1/2) * I0(1/2) - 1
P_AT_3 = 0.07545339578481940  # density of CASE at theta = 3


class TestBesselI0:
    def test_at_zero(self):
        assert bessel_i0(0.0) == 1.0

    def test_frozen_values(self):
        assert bessel_i0(0.5) == pytest.approx(I0_HALF, rel=1e-13)
        assert bessel_i0(5.0) == pytest.approx(I0_FIVE, rel=1e-13)

    @pytest.mark.parametrize("x", np.geomspace(1e-3, 600.0, 40).tolist())
    def test_against_extended_precision(self, x):
        with mpmath.workdps(40):
            expected = float(mpmath.besseli(0, x))
        assert bessel_i0(x) == pytest.approx(expected, rel=1e-12)

    def test_branches_agree_at_crossover(self):
        # series and asymptotic forms evaluated at the same points
        from bayestherm.priors import _i0_series, _i0e_asymptotic

        for x in (16.0, 18.0, 20.0):
            series = _i0_series(x)
            asym = math.exp(x) * _i0e_asymptotic(x)
            assert asym == pytest.approx(series, rel=1e-12)

    def test_even(self):
        assert bessel_i0(-0.5) == bessel_i0(0.5)


class TestKAlpha:
    def test_zero(self):
        assert normalization_k_alpha(0.0) == 0.0

    def test_frozen_k1(self):
        assert normalization_k_alpha(1.0) == pytest.approx(K_ONE, rel=1e-13)

    @pytest.mark.parametrize("alpha", [-200.0, -50.0, -2.0, -1e-5, 1e-5, 0.5, 3.0, 40.0])
    def test_against_extended_precision(self, alpha):
        with mpmath.workdps(40):
            expected = float(mpmath.e ** (mpmath.mpf(alpha) / 2) * mpmath.besseli(0, alpha / 2) - 1)
        assert normalization_k_alpha(alpha) == pytest.approx(expected, rel=1e-11)

    def test_uniform_limit(self):
        assert normalization_k_alpha(-math.inf) == -1.0
        # k_alpha -> -1 like 1/sqrt(|alpha|), so the interior density flattens
        # to a constant that approaches 1/width slowly
        spec = PriorSpec(-5000.0, 1.0, 10.0)
        assert prior_density(spec, 4.0) == pytest.approx(prior_density(spec, 7.0), rel=1e-13)
        assert prior_density(spec, 5.5) == pytest.approx(1.0 / 9.0, rel=1e-2)
        assert prior_density(PriorSpec(-5e6, 1.0, 10.0), 5.5) == pytest.approx(1.0 / 9.0, rel=1e-3)

    def test_rejects_nan(self):
        with pytest.raises(ConfigurationError):
            normalization_k_alpha(math.nan)


class TestPriorDensity:
    def test_boundary_vanishes_exactly(self):
        assert prior_density(CASE, 1.0) == 0.0
        assert prior_density(CASE, 10.0) == 0.0

    def test_midpoint_closed_form(self):
        # sin^2(pi/2) = 1 at the symmetric midpoint
        expected = math.expm1(1.0) / (K_ONE * 9.0)
        assert prior_density(CASE, 5.5) == pytest.approx(expected, rel=1e-12)

    def test_frozen_value(self):
        assert prior_density(CASE, 3.0) == pytest.approx(P_AT_3, rel=1e-13)

    def test_outside_support(self):
        assert prior_density(CASE, 0.5) == 0.0
        assert prior_density(CASE, 12.0) == 0.0

    def test_symmetry(self):
        x = np.linspace(0.0, 4.5, 201)
        left = prior_density(CASE, CASE.theta_min + x)
        right = prior_density(CASE, CASE.theta_max - x)
        np.testing.assert_allclose(left, right, rtol=1e-12, atol=0.0)

    def test_sin2_limit(self):
        spec = PriorSpec(alpha=1e-9, theta_min=1.0, theta_max=10.0)
        assert prior_density(spec, 5.5) == pytest.approx(2.0 / 9.0, rel=1e-12)

    def test_uniform_limit_density(self):
        th = np.linspace(1.0, 10.0, 91)
        np.testing.assert_allclose(prior_density(UNIFORM, th), 1.0 / 9.0)

    def test_normalizes_to_one(self):
        # high-resolution quadrature of the raw density
        th = np.linspace(1.0, 10.0, 400001)
        total = np.trapezoid(prior_density(CASE, th), th)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_invalid_spec(self):
        with pytest.raises(ConfigurationError):
            PriorSpec(alpha=1.0, theta_min=5.0, theta_max=5.0)
        with pytest.raises(ConfigurationError):
            PriorSpec(alpha=1.0, theta_min=-1.0, theta_max=5.0)
        with pytest.raises(ConfigurationError):
            PriorSpec(alpha=math.inf, theta_min=1.0, theta_max=5.0)


class TestDiscretize:
    def test_normalization(self):
        dist = discretize(CASE, 2048)
        assert abs(np.dot(dist.quadrature, dist.weights) - 1.0) < 1e-12

    def test_uniform_limit_interior_flat(self):
        dist = discretize(UNIFORM, 2048)
        interior = dist.weights[1:-1]
        assert np.max(np.abs(interior - interior[0])) < 1e-8 * interior[0]

    def test_mode_at_midpoint(self):
        dist = discretize(CASE, 2048)
        mode_theta = dist.grid[np.argmax(dist.weights)]
        nearest = dist.grid[np.argmin(np.abs(dist.grid - 5.5))]
        assert mode_theta == nearest

    def test_log_uniform_spacing(self):
        dist = discretize(CASE, 256)
        dlam = np.diff(np.log(dist.grid))
        assert np.max(np.abs(dlam - dlam[0])) < 1e-12

    def test_minimum_size(self):
        with pytest.raises(ConfigurationError):
            discretize(CASE, 8)

    def test_grid_distribution_invariants(self):
        dist = discretize(CASE, 64)
        with pytest.raises(ValueError):
            GridDistribution(dist.grid, -dist.weights, dist.quadrature)
        with pytest.raises(ValueError):
            GridDistribution(dist.grid, 2.0 * dist.weights, dist.quadrature)
        with pytest.raises(ValueError):
            GridDistribution(dist.grid[::-1], dist.weights, dist.quadrature)

    def test_immutability(self):
        dist = discretize(CASE, 64)
        with pytest.raises(ValueError):
            dist.weights[0] = 1.0


class TestInformationQ:
    def test_uniform_is_one(self):
        dist = discretize(UNIFORM, 2048)
        assert bayesian_information_q(dist) == pytest.approx(1.0, abs=1e-12)

    def test_nonnegative(self):
        rng = np.random.default_rng(7)
        base = discretize(CASE, 256)
        for _ in range(20):
            bumps = 0.2 + rng.random(256)
            dist = GridDistribution.from_density(base.grid, base.weights * bumps)
            assert bayesian_information_q(dist) >= 0.0

    def test_case_study_against_refined_oracle(self):
        q_coarse = bayesian_information_q(discretize(CASE, 2048))
        q_fine = bayesian_information_q(discretize(CASE, 20480))
        assert abs(q_coarse - q_fine) / q_fine < 1e-3
        assert q_coarse > 0.0

    def test_sharp_negative_alpha_diverges(self):
        # boundary layers make Q grow with |alpha|; the exact uniform limit
        # (alpha = -inf) is the configuration with Q = 1
        q_m50 = bayesian_information_q(discretize(PriorSpec(-50.0, 1.0, 10.0), 4096))
        assert q_m50 > 10.0


class TestNoGoFunctionalF:
    def test_uniform_is_zero(self):
        dist = discretize(UNIFORM, 2048)
        assert no_go_functional_f(dist) == pytest.approx(0.0, abs=1e-12)

    def test_case_study_closed_form(self):
        # integrate -dp * theta by parts over [midpoint, theta_max]:
        # f = midpoint * p(midpoint) + 1/2 for the symmetric density
        dist = discretize(CASE, 2048)
        expected = 5.5 * prior_density(CASE, 5.5) + 0.5
        assert no_go_functional_f(dist) == pytest.approx(expected, rel=1e-4)

    def test_region_is_upper_half(self):
        dist = discretize(CASE, 2048)
        dp = np.gradient(dist.weights, dist.grid, edge_order=2)
        # density increases strictly below the midpoint
        assert np.all(dp[(dist.grid > 1.01) & (dist.grid < 5.4)] > 0.0)
        assert np.all(dp[(dist.grid > 5.6) & (dist.grid < 9.99)] < 0.0)

    def test_refined_oracle(self):
        f_coarse = no_go_functional_f(discretize(CASE, 2048))
        f_fine = no_go_functional_f(discretize(CASE, 20480))
        assert abs(f_coarse - f_fine) / f_fine < 5e-3

    def test_nonnegative(self):
        rng = np.random.default_rng(11)
        base = discretize(CASE, 256)
        for _ in range(20):
            bumps = 0.2 + rng.random(256)
            dist = GridDistribution.from_density(base.grid, base.weights * bumps)
            assert no_go_functional_f(dist) >= 0.0


class TestAltFunctionalG:
    def test_uniform_is_zero(self):
        # derivatives of the constant density vanish up to stencil rounding,
        # which the theta^2 flux amplifies to ~1e-11
        dist = discretize(UNIFORM, 2048)
        assert alt_functional_g(dist) == pytest.approx(0.0, abs=1e-9)

    def test_case_study_positive(self):
        assert alt_functional_g(discretize(CASE, 2048)) > 0.0

    def test_refined_oracle(self):
        g_coarse = alt_functional_g(discretize(CASE, 2048))
        g_fine = alt_functional_g(discretize(CASE, 20480))
        assert abs(g_coarse - g_fine) / g_fine < 5e-3

    def test_nonnegative(self):
        rng = np.random.default_rng(13)
        base = discretize(CASE, 256)
        for _ in range(20):
            bumps = 0.2 + rng.random(256)
            dist = GridDistribution.from_density(base.grid, base.weights * bumps)
            assert alt_functional_g(dist) >= 0.0
