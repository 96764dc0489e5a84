"""Probe thermodynamics, extremal quantities and their special-function kernels."""

import math

import mpmath
import numpy as np
import pytest

from bayestherm.errors import DomainError
from bayestherm.probe import (
    ProbeSpectrum,
    fisher_information,
    heat_capacity,
    lambert_w,
    make_effective_two_level,
    massieu_potential,
    max_energy_per_temperature,
    max_heat_capacity_cd,
    max_thermal_energy_bound,
    mean_energy,
    partition_function,
    thermalize,
    xi_d,
)

QUBIT = ProbeSpectrum(levels=((0.0, 1), (1.0, 1)))

# roots of exp(x)(x - 2) = (D - 1)(x + 2), frozen from the bisection oracle below
XI_2 = 2.3993572805154676
XI_4 = 2.8449889661554086
W_INV_E = 0.2784645427610738  # W(1/e), Halley fixed point


def random_spectrum(rng, max_levels=6, max_energy=8.0, dimension=None):
    n_levels = int(rng.integers(2, max_levels + 1))
    energies = np.sort(rng.uniform(0.1, max_energy, size=n_levels - 1))
    if dimension is None:
        degs = [int(d) for d in rng.integers(1, 6, size=n_levels)]
    else:
        # random composition of `dimension` into n_levels positive parts
        n_levels = min(n_levels, dimension)
        cuts = np.sort(rng.choice(np.arange(1, dimension), size=n_levels - 1, replace=False))
        parts = np.diff(np.concatenate([[0], cuts, [dimension]]))
        degs = [int(d) for d in parts]
        energies = np.sort(rng.uniform(0.1, max_energy, size=n_levels - 1))
    levels = [(0.0, degs[0])] + [(float(e), d) for e, d in zip(energies, degs[1:])]
    return ProbeSpectrum(levels=tuple(levels))


def bisect_xi(dimension, lo=2.0 + 1e-12, hi=200.0):
    # independent oracle for the transcendental root
    def h(x):
        return math.exp(x) * (x - 2.0) - (dimension - 1) * (x + 2.0)

    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def golden_max(f, a, b, tol=1e-12):
    # independent oracle: golden-section maximization on [a, b]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    h = b - a
    x1, x2 = b - invphi * h, a + invphi * h
    f1, f2 = f(x1), f(x2)
    while h > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            h = b - a
            x1 = b - invphi * h
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            h = b - a
            x2 = a + invphi * h
            f2 = f(x2)
    return 0.5 * (a + b), f(0.5 * (a + b))


class TestSpectrumValidation:
    def test_ground_energy_must_be_zero(self):
        with pytest.raises(ValueError):
            ProbeSpectrum(levels=((0.5, 1), (1.0, 1)))

    def test_strictly_increasing(self):
        with pytest.raises(ValueError):
            ProbeSpectrum(levels=((0.0, 1), (1.0, 1), (1.0, 2)))

    def test_positive_integer_degeneracy(self):
        with pytest.raises(ValueError):
            ProbeSpectrum(levels=((0.0, 0), (1.0, 1)))
        with pytest.raises(ValueError):
            ProbeSpectrum(levels=((0.0, 1.5), (1.0, 1)))

    def test_minimum_dimension(self):
        with pytest.raises(ValueError):
            ProbeSpectrum(levels=((0.0, 1),))

    def test_huge_degeneracy(self):
        spec = ProbeSpectrum(levels=((0.0, 1), (1.0, 2**100 - 1)))
        assert spec.dimension == 2**100
        assert spec.log_degeneracies[1] == pytest.approx(100 * math.log(2), rel=1e-12)


class TestThermalize:
    def test_infinite_temperature_limit(self):
        spec = ProbeSpectrum(levels=((0.0, 1), (1.0, 3)))
        probs = thermalize(spec, 1e12).level_probs
        np.testing.assert_allclose(probs, [0.25, 0.75], rtol=1e-10)

    def test_qubit_at_unit_temperature(self):
        probs = thermalize(QUBIT, 1.0).level_probs
        expected = math.exp(-1.0) / (1.0 + math.exp(-1.0))
        assert probs[1] == pytest.approx(expected, rel=1e-14)

    def test_large_degenerate_two_level(self):
        # cross-checked in 40-digit arithmetic: 1023 e^-5 / (1 + 1023 e^-5)
        spec = make_effective_two_level(5.0, 1024)
        with mpmath.workdps(40):
            expected = float(1023 * mpmath.exp(-5) / (1 + 1023 * mpmath.exp(-5)))
        assert thermalize(spec, 1.0).level_probs[1] == pytest.approx(expected, rel=1e-13)

    def test_normalization_across_scales(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            spec = random_spectrum(rng)
            for theta in (1e-3, 0.3, 2.0, 1e3):
                assert abs(thermalize(spec, theta).level_probs.sum() - 1.0) < 1e-12

    def test_rejects_nonpositive_theta(self):
        with pytest.raises(DomainError):
            thermalize(QUBIT, 0.0)
        with pytest.raises(DomainError):
            thermalize(QUBIT, -1.0)


class TestPartitionAndMassieu:
    def test_low_temperature_limit(self):
        assert partition_function(QUBIT, 1e-4) == pytest.approx(1.0, rel=1e-12)
        assert massieu_potential(QUBIT, 1e-4) == pytest.approx(0.0, abs=1e-12)

    def test_high_temperature_limit(self):
        spec = ProbeSpectrum(levels=((0.0, 2), (1.0, 3), (2.0, 5)))
        assert partition_function(spec, 1e12) == pytest.approx(10.0, rel=1e-10)
        assert massieu_potential(spec, 1e12) == pytest.approx(math.log(10.0), rel=1e-10)

    def test_qubit_value(self):
        assert partition_function(QUBIT, 1.0) == pytest.approx(1.0 + math.exp(-1.0), rel=1e-14)

    def test_massieu_nonnegative(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            spec = random_spectrum(rng)
            assert massieu_potential(spec, float(rng.uniform(0.05, 20.0))) >= 0.0

    def test_huge_dimension_massieu_finite(self):
        spec = make_effective_two_level(1.0, 2**2000)
        psi = massieu_potential(spec, 1e6)
        assert psi == pytest.approx(2000 * math.log(2), rel=1e-3)
        assert math.isinf(partition_function(spec, 1e6))


class TestMeanEnergy:
    def test_two_level_closed_form(self):
        spec = ProbeSpectrum(levels=((0.0, 1), (2.0, 4)))
        theta = 1.3
        z = 4 * math.exp(-2.0 / theta)
        assert mean_energy(spec, theta) == pytest.approx(2.0 * z / (1 + z), rel=1e-13)

    def test_equal_occupation_limit(self):
        assert mean_energy(QUBIT, 1e12) == pytest.approx(0.5, rel=1e-10)

    def test_bounded_by_lambert_ceiling(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            spec = random_spectrum(rng)
            theta = float(rng.uniform(0.05, 10.0))
            assert mean_energy(spec, theta) <= max_thermal_energy_bound(theta, spec.dimension) * (
                1 + 1e-12
            )


class TestHeatCapacity:
    def test_two_level_closed_form(self):
        spec = ProbeSpectrum(levels=((0.0, 1), (1.5, 7)))
        theta = 0.9
        x = 1.5 / theta
        z = 7 * math.exp(-x)
        expected = x * x * z / (1 + z) ** 2
        assert heat_capacity(spec, theta) == pytest.approx(expected, rel=1e-12)

    def test_matches_energy_derivative(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            spec = random_spectrum(rng)
            theta = float(rng.uniform(0.2, 5.0))
            h = 1e-5 * theta
            fd = (mean_energy(spec, theta + h) - mean_energy(spec, theta - h)) / (2 * h)
            assert heat_capacity(spec, theta) == pytest.approx(fd, rel=1e-6)

    def test_high_temperature_vanishes(self):
        assert heat_capacity(QUBIT, 1e8) < 1e-15

    def test_fully_degenerate_spectrum(self):
        spec = ProbeSpectrum(levels=((0.0, 16),))
        assert heat_capacity(spec, 1.0) == 0.0


class TestFisherInformation:
    def test_identity_with_heat_capacity(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            spec = random_spectrum(rng)
            theta = float(rng.uniform(0.2, 5.0))
            assert fisher_information(spec, theta) == pytest.approx(
                heat_capacity(spec, theta) / theta**2, rel=1e-14
            )

    def test_definitional_outcome_sum(self):
        # sum_x p(x|theta) (d/dtheta log p(x|theta))^2 via central differences
        rng = np.random.default_rng(29)
        for _ in range(20):
            spec = random_spectrum(rng)
            theta = float(rng.uniform(0.5, 3.0))
            h = 1e-6 * theta
            p0 = thermalize(spec, theta - h).level_probs
            p1 = thermalize(spec, theta + h).level_probs
            pc = thermalize(spec, theta).level_probs
            dlog = (np.log(p1) - np.log(p0)) / (2 * h)
            definitional = float(np.dot(pc, dlog**2))
            assert fisher_information(spec, theta) == pytest.approx(definitional, rel=1e-7, abs=1e-8)

    def test_degenerate_spectrum_zero(self):
        spec = ProbeSpectrum(levels=((0.0, 8),))
        assert fisher_information(spec, 2.0) == 0.0


class TestXiD:
    def test_frozen_roots(self):
        assert xi_d(2) == pytest.approx(XI_2, rel=1e-12)
        assert xi_d(4) == pytest.approx(XI_4, rel=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 4, 16, 256, 1024, 2**20])
    def test_against_bisection_oracle(self, dim):
        assert xi_d(dim) == pytest.approx(bisect_xi(dim), rel=1e-10)

    @pytest.mark.parametrize("dim", [2, 5, 100, 2**30])
    def test_residual(self, dim):
        x = xi_d(dim)
        resid = math.exp(x) - (dim - 1) * (x + 2.0) / (x - 2.0)
        assert abs(resid) <= 1e-12 * math.exp(x)

    def test_exceeds_log_dimension(self):
        for dim in (2, 64, 2**10, 2**20):
            assert xi_d(dim) > math.log(dim - 1) if dim > 2 else True

    def test_gap_shrinks_with_dimension(self):
        gap10 = xi_d(2**10) - math.log(2**10 - 1)
        gap20 = xi_d(2**20) - math.log(2**20 - 1)
        assert 0.0 < gap20 < gap10

    def test_invalid_dimension(self):
        with pytest.raises(DomainError):
            xi_d(1)


class TestMaxHeatCapacity:
    def test_qubit_against_golden_section(self):
        gap, c_max = golden_max(lambda e: heat_capacity(make_effective_two_level(e, 2), 1.0), 0.5, 8.0)
        assert max_heat_capacity_cd(2) == pytest.approx(c_max, abs=1e-6)
        assert gap == pytest.approx(XI_2, abs=1e-4)

    def test_dim4_against_golden_section(self):
        _, c_max = golden_max(lambda e: heat_capacity(make_effective_two_level(e, 4), 1.0), 0.5, 10.0)
        assert max_heat_capacity_cd(4) == pytest.approx(c_max, abs=1e-6)

    def test_critical_pairing_saturates(self):
        for dim in (2, 16, 1024):
            for theta in (0.5, 1.0, 3.0):
                spec = make_effective_two_level(xi_d(dim) * theta, dim)
                assert heat_capacity(spec, theta) == pytest.approx(
                    max_heat_capacity_cd(dim), rel=1e-9
                )

    def test_random_spectra_below_ceiling(self):
        rng = np.random.default_rng(31)
        for _ in range(2000):
            dim = int(rng.integers(2, 40))
            spec = random_spectrum(rng, dimension=dim)
            theta = float(rng.uniform(0.05, 10.0))
            assert heat_capacity(spec, theta) <= max_heat_capacity_cd(dim) * (1 + 1e-9)

    def test_asymptotic_ratio_monotone(self):
        ratios = []
        for n in (5, 10, 20, 30):
            c = max_heat_capacity_cd(2**n)
            ratios.append(c / (n**2 * math.log(2) ** 2 / 4.0))
        assert all(r > 1.0 for r in ratios)
        assert all(a > b for a, b in zip(ratios, ratios[1:]))


class TestLambertW:
    def test_fixed_points(self):
        assert lambert_w(0.0) == 0.0
        assert lambert_w(math.e) == pytest.approx(1.0, rel=1e-13)
        assert lambert_w(1.0 / math.e) == pytest.approx(W_INV_E, rel=1e-13)

    @pytest.mark.parametrize("x", np.geomspace(1e-8, 1e12, 30).tolist())
    def test_residual(self, x):
        w = lambert_w(x)
        assert abs(w * math.exp(w) - x) <= 1e-13 * x

    @pytest.mark.parametrize("x", [1e-3, 0.2, 1.0, 7.0, 1e4])
    def test_against_extended_precision(self, x):
        with mpmath.workdps(40):
            expected = float(mpmath.lambertw(x))
        assert lambert_w(x) == pytest.approx(expected, rel=1e-13)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            lambert_w(-0.1)


class TestEnergyBound:
    def test_qubit_value(self):
        assert max_thermal_energy_bound(1.0, 2) == pytest.approx(W_INV_E, rel=1e-13)

    def test_saturating_construction(self):
        for dim in (2, 64, 1024, 2**20):
            for theta in (0.5, 1.0, 4.0):
                w = max_energy_per_temperature(dim)
                spec = make_effective_two_level(theta * (1.0 + w), dim)
                e = mean_energy(spec, theta)
                assert e == pytest.approx(theta * w, rel=1e-9)

    def test_ratio_to_log_dimension(self):
        ratios = [
            max_energy_per_temperature(2**n) / (n * math.log(2)) for n in (10, 20, 30)
        ]
        assert all(r < 1.0 for r in ratios)
        assert ratios[0] < ratios[1] < ratios[2]

    def test_huge_dimension_path(self):
        dim = 2**2000
        w = max_energy_per_temperature(dim)
        log_x = math.log(dim - 1) - 1.0
        assert abs(w + math.log(w) - log_x) <= 1e-12
        assert w < 2000 * math.log(2)

    def test_rejects_nonpositive_theta(self):
        with pytest.raises(DomainError):
            max_thermal_energy_bound(0.0, 2)


class TestEffectiveTwoLevel:
    def test_structure(self):
        spec = make_effective_two_level(1.0, 2)
        assert spec.levels == ((0.0, 1), (1.0, 1))
        spec = make_effective_two_level(2.0, 1024)
        assert spec.levels == ((0.0, 1), (2.0, 1023))

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            make_effective_two_level(0.0, 2)
        with pytest.raises(DomainError):
            make_effective_two_level(1.0, 1)
