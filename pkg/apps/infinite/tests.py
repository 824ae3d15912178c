"""
Tests for the infinite app.
"""

import math

import numpy as np
from django.test import SimpleTestCase

from apps.hellinger.types import PureState
from apps.infinite.services import InfiniteService
from apps.infinite.types import WindowPolicy
from apps.quantifiers.sampling import random_density_matrix
from apps.quantifiers.services import QuantifierService
from apps.states.services import StateService
from apps.utils.exceptions import InvariantError, TruncationError


def number_state(n):
    amplitudes = np.zeros(2 * n + 2, dtype=complex)
    amplitudes[n] = 1.0
    return PureState(amplitudes)


def inverse_square(dim):
    n = np.arange(dim)
    return 6.0 / math.pi**2 / (n + 1.0) ** 2


class ThermalReferenceTest(SimpleTestCase):
    """Test the thermal-like reference state."""

    def test_default_window(self):
        """Test that the default window leaves out less than the tail tolerance."""
        reference = InfiniteService.thermal_reference(0.99)
        self.assertLessEqual(reference.outside_mass, 1e-10)
        self.assertAlmostEqual(float(np.sum(reference.populations)), 1.0, places=14)
        self.assertAlmostEqual(reference.mean_photons, 99.0, places=5)

    def test_fixed_window(self):
        """Test the renormalized populations of a short window."""
        reference = InfiniteService.thermal_reference(0.5, dim=3)
        np.testing.assert_allclose(reference.populations, np.array([4, 2, 1]) / 7.0)
        self.assertAlmostEqual(reference.outside_mass, 0.125)
        self.assertEqual(reference.density.dim, 3)

    def test_vacuum_reference(self):
        """Test that xi = 0 is the vacuum."""
        reference = InfiniteService.thermal_reference(0.0)
        self.assertEqual(reference.dim, 1)
        self.assertEqual(reference.outside_mass, 0.0)

    def test_invalid(self):
        """Test that xi outside [0, 1) is rejected."""
        for xi in (-0.1, 1.0, 1.5):
            with self.assertRaises(InvariantError):
                InfiniteService.thermal_reference(xi)

    def test_ceiling(self):
        """Test that a window above the ceiling is refused."""
        with self.assertRaises(TruncationError):
            InfiniteService.thermal_reference(0.99999)


class ConvergenceCheckTest(SimpleTestCase):
    """Test the sqrt-sum convergence classification."""

    def test_inverse_square_diverges(self):
        """Test that p_n ~ 1/(n+1)^2 has a diverging sqrt-sum."""
        result = InfiniteService.convergence_check(inverse_square)
        self.assertFalse(result.converged)
        self.assertEqual(result.status, "diverging")
        self.assertTrue(all(b > a for a, b in zip(result.partial_sums, result.partial_sums[1:])))

    def test_geometric_converges(self):
        """Test that the Susskind-Glogower distribution converges."""
        result = InfiniteService.convergence_check(lambda dim: 0.75 * 0.25 ** np.arange(dim))
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.partial_sums[-1], 2.0 * math.sqrt(0.75), places=8)

    def test_fixed_vector(self):
        """Test the classification of an already truncated distribution."""
        psi, _ = StateService.sg_phase_state(0.5)
        self.assertTrue(InfiniteService.convergence_check(psi.probabilities).converged)
        self.assertTrue(InfiniteService.convergence_check(np.array([0, 0, 1.0])).converged)

    def test_truncated_heavy_tail(self):
        """Test that a truncated heavy tail still reads as diverging."""
        policy = WindowPolicy(start=64)
        result = InfiniteService.convergence_check(inverse_square(4096), policy)
        self.assertFalse(result.converged)


class CertaintyLimitTest(SimpleTestCase):
    """Test the xi -> 1 limit of certainty and nonclassicality."""

    def test_number_state_at_fixed_xi(self):
        """Test S_H of |5> against the xi = 0.9 reference."""
        expected = 2.0 - 2.0 * math.sqrt(0.1) * 0.9**2.5
        self.assertAlmostEqual(
            InfiniteService.certainty_against_thermal(number_state(5).probabilities, 0.9),
            expected,
            places=12,
        )

    def test_number_state_limit(self):
        """Test that number states reach NC_H = 2."""
        for n in (0, 1, 5, 20):
            sweep = InfiniteService.certainty_limit_sweep(number_state(n))
            self.assertEqual(sweep.c_h, 0.0)
            self.assertAlmostEqual(sweep.nc_h_extrapolated, 2.0, delta=1e-4)
            self.assertTrue(sweep.monotone)

    def test_sg_limit(self):
        """Test that the xi = 0.5 phase state reaches C_H + 2 = 4."""
        psi, _ = StateService.sg_phase_state(0.5)
        sweep = InfiniteService.certainty_limit_sweep(psi)
        self.assertAlmostEqual(sweep.c_h, 2.0, places=8)
        self.assertAlmostEqual(sweep.nc_h_extrapolated, 4.0, delta=1e-3)
        self.assertLess(sweep.residual_at_largest_xi, 1e-2)

    def test_cross_term_bounds_deviation(self):
        """Test that NC_H(xi) falls short of the limit by the cross term."""
        psi, _ = StateService.sg_phase_state(0.3 + 0.2j)
        sweep = InfiniteService.certainty_limit_sweep(psi, xi_grid=[0.5, 0.9, 0.99])
        for point in sweep.points:
            self.assertAlmostEqual(sweep.nc_h_limit - point.nc_h, point.cross_term, places=10)

    def test_diverging_rejected(self):
        """Test that a heavy-tailed distribution has no finite limit."""
        p = inverse_square(4096)
        state = PureState(np.sqrt(p / np.sum(p)).astype(complex))
        with self.assertRaises(InvariantError):
            InfiniteService.certainty_limit_sweep(state)
        with self.assertRaises(InvariantError):
            InfiniteService.nonclassicality_infinite(state)

    def test_nonclassicality_infinite(self):
        """Test NC_H = C_H + 2 for pure and mixed states."""
        psi, _ = StateService.sg_phase_state(0.5)
        self.assertAlmostEqual(InfiniteService.nonclassicality_infinite(psi), 4.0, places=8)
        rho = random_density_matrix(5, np.random.default_rng(11))
        self.assertAlmostEqual(
            InfiniteService.nonclassicality_infinite(rho),
            QuantifierService.coherence_h(rho) + 2.0,
            places=12,
        )


class InfinitePythagorasTest(SimpleTestCase):
    """Test the Pythagoras identities against the thermal reference."""

    def test_pure_states(self):
        """Test both identities for Fock-family pure states."""
        states = [
            StateService.sg_phase_state(0.6j)[0],
            StateService.squeezed_coherent_state(2.0, 0.3)[0],
            number_state(4),
        ]
        for psi in states:
            for xi in (0.0, 0.5, 0.99):
                result = InfiniteService.infinite_pythagoras_residual(psi, xi)
                self.assertLess(result.hellinger.residual, 1e-10)
                self.assertLess(result.hilbert_schmidt.residual, 1e-10)

    def test_mixed_state(self):
        """Test both identities for a random mixed state."""
        rho = random_density_matrix(6, np.random.default_rng(3))
        result = InfiniteService.infinite_pythagoras_residual(rho, 0.99)
        self.assertEqual(result.support_dim, 6)
        self.assertLess(result.hellinger.residual, 1e-10)
        self.assertLess(result.hilbert_schmidt.residual, 1e-10)
        self.assertAlmostEqual(
            result.hellinger.coherence, QuantifierService.coherence_h(rho), places=10
        )

    def test_number_state_terms(self):
        """Test the terms of |5> against the xi = 0.9 reference."""
        result = InfiniteService.infinite_pythagoras_residual(number_state(5), 0.9)
        self.assertAlmostEqual(result.hellinger.coherence, 0.0, places=14)
        self.assertAlmostEqual(
            result.hellinger.certainty, 2.0 - 2.0 * math.sqrt(0.1) * 0.9**2.5, places=12
        )


class ClosedFormTest(SimpleTestCase):
    """Test the closed forms of the infinite-dimensional families."""

    def test_sg_closed_forms_agree(self):
        """Test that the xi and mean-photon forms of C_H agree."""
        for modulus in (0.0, 0.3, 0.5, 0.9):
            mean = InfiniteService.mean_photons_from_xi(modulus)
            self.assertAlmostEqual(
                InfiniteService.sg_coherence_closed_form(modulus),
                InfiniteService.sg_coherence_from_mean_photons(mean),
                places=10,
            )
            self.assertAlmostEqual(InfiniteService.xi_from_mean_photons(mean), modulus, places=12)

    def test_sg_matches_built_state(self):
        """Test the closed form against the truncated state."""
        psi, _ = StateService.sg_phase_state(0.8)
        self.assertAlmostEqual(
            QuantifierService.report_pure(psi).c_h,
            InfiniteService.sg_coherence_closed_form(0.8),
            places=8,
        )

    def test_sg_asymptote(self):
        """Test C_H ~ 4 n for large mean photon numbers."""
        mean = 1e4
        ratio = InfiniteService.sg_coherence_from_mean_photons(mean) / InfiniteService.sg_coherence_asymptote(mean)
        self.assertAlmostEqual(ratio, 1.0, places=4)

    def test_gaussian_estimate(self):
        """Test the broad-distribution coherence estimate."""
        self.assertAlmostEqual(
            InfiniteService.gaussian_coherence_estimate(100.0),
            2.0 * math.sqrt(200.0 * math.pi) - 1.0,
        )
        with self.assertRaises(InvariantError):
            InfiniteService.gaussian_coherence_estimate(0.0)

    def test_gaussian_estimate_tracks_coherent_state(self):
        """Test the estimate against a bright coherent state."""
        psi, _ = StateService.squeezed_coherent_state(10.0, 0.0)
        c_h = QuantifierService.report_pure(psi).c_h
        estimate = InfiniteService.gaussian_coherence_estimate(
            InfiniteService.rough_number_variance(100.0, 0.0)
        )
        self.assertLess(abs(c_h - estimate) / c_h, 0.05)

    def test_negative_inputs(self):
        """Test that closed forms reject invalid arguments."""
        with self.assertRaises(InvariantError):
            InfiniteService.sg_coherence_closed_form(1.0)
        with self.assertRaises(InvariantError):
            InfiniteService.sg_coherence_from_mean_photons(-1.0)
