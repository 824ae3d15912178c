"""
Tests for the overcomplete app.
"""

import math

import numpy as np
from django.test import SimpleTestCase

from apps.hellinger.services import DensityService
from apps.overcomplete.services import PhaseBasisService
from apps.overcomplete.types import PhaseBasisConfig, SqrtPrefactor
from apps.quantifiers.sampling import random_density_matrix
from apps.states.services import StateService
from apps.utils.exceptions import (InvariantError, QuadratureError,
                                   StructuralError)


class PhaseOverlapTest(SimpleTestCase):
    """Test overlaps of finite-dimensional phase states."""

    def test_equal_phases(self):
        """Test that a phase state has unit overlap with itself."""
        self.assertAlmostEqual(PhaseBasisService.phase_overlap(0.7, 0.7, 5), 1.0)

    def test_qubit_opposite_phases(self):
        """Test that opposite qubit phase states are orthogonal."""
        self.assertAlmostEqual(abs(PhaseBasisService.phase_overlap(math.pi, 0.0, 2)), 0.0, places=15)

    def test_generic_overlap_is_nonzero(self):
        """Test the lack of orthogonality for generic phase differences."""
        rng = np.random.default_rng(5)
        for _ in range(20):
            phi, phi_prime = rng.uniform(0, 2 * math.pi, size=2)
            overlap = PhaseBasisService.phase_overlap(phi, phi_prime, 4)
            self.assertLessEqual(abs(overlap), 1.0 + 1e-15)

        self.assertGreater(abs(PhaseBasisService.phase_overlap(0.3, 0.0, 4)), 0.5)


class PhaseRhoDTest(SimpleTestCase):
    """Test the phase-averaged reference state."""

    def test_maximally_mixed_is_fixed(self):
        """Test that I/N averages to itself."""
        for n in (2, 3, 5):
            result = PhaseBasisService.phase_rho_d(
                DensityService.maximally_mixed(n), PhaseBasisConfig(n)
            )
            np.testing.assert_allclose(result.matrix, np.eye(n) / n, atol=1e-14)
            self.assertAlmostEqual(result.off_diagonal_mass, 0.0, places=14)

    def test_qubit_is_not_diagonal(self):
        """Test that a generic qubit keeps half its coherence in rho_d."""
        rho = StateService.qubit_from_bloch((0.5, 0.2, 0.3))
        result = PhaseBasisService.phase_rho_d(rho, PhaseBasisConfig(2))
        np.testing.assert_allclose(result.matrix.diagonal(), [0.5, 0.5], atol=1e-14)
        self.assertAlmostEqual(result.matrix[0, 1], rho.entries[0, 1] / 2, places=14)
        self.assertGreater(result.off_diagonal_mass, 0.1)

    def test_is_a_valid_state(self):
        """Test that rho_d is Hermitian, unit trace and positive semidefinite."""
        rng = np.random.default_rng(17)
        for n in (2, 3, 6):
            rho = random_density_matrix(n, rng)
            matrix = PhaseBasisService.phase_rho_d(rho, PhaseBasisConfig(n)).matrix
            self.assertIsInstance(DensityService.require_density(matrix), type(rho))
            self.assertAlmostEqual(np.trace(matrix).real, 1.0, places=12)

    def test_idempotent(self):
        """Test that averaging twice changes nothing."""
        rho = random_density_matrix(4, np.random.default_rng(2))
        config = PhaseBasisConfig(4)
        once = PhaseBasisService.phase_rho_d(rho, config).matrix
        twice = PhaseBasisService.phase_rho_d(DensityService.require_density(once), config).matrix
        np.testing.assert_allclose(twice, once, atol=1e-14)

    def test_config_checks(self):
        """Test node-count and dimension validation."""
        rho = DensityService.maximally_mixed(3)
        with self.assertRaises(InvariantError):
            PhaseBasisService.phase_rho_d(rho, PhaseBasisConfig(3, quadrature_nodes=11))
        with self.assertRaises(InvariantError):
            PhaseBasisService.phase_rho_d(rho, PhaseBasisConfig(3, prefactor="half"))
        with self.assertRaises(StructuralError):
            PhaseBasisService.phase_rho_d(rho, PhaseBasisConfig(4))

    def test_default_nodes(self):
        """Test that the node count defaults to 8N."""
        config = PhaseBasisService.resolve_config(PhaseBasisConfig(5))
        self.assertEqual(config.quadrature_nodes, 40)


class ContinuousSqrtTest(SimpleTestCase):
    """Test the continuous square root of rho_d."""

    def test_unit_prefactor_squares_back_for_uniform_weights(self):
        """Test that the unit prefactor gives I/sqrt(N) for I/N."""
        config = PhaseBasisConfig(3, prefactor=SqrtPrefactor.UNIT)
        result = PhaseBasisService.continuous_sqrt(DensityService.maximally_mixed(3), config)
        np.testing.assert_allclose(result.matrix, np.eye(3) / math.sqrt(3), atol=1e-14)
        self.assertAlmostEqual(result.square_defect, 0.0, places=14)

    def test_printed_prefactor_defect(self):
        """Test that the printed prefactor does not square back to rho_d."""
        result = PhaseBasisService.continuous_sqrt(
            DensityService.maximally_mixed(3), PhaseBasisConfig(3)
        )
        np.testing.assert_allclose(result.matrix, np.eye(3) * math.sqrt(2 * math.pi) / 3, atol=1e-14)
        self.assertGreater(result.square_defect, 0.1)
        self.assertEqual(result.prefactor, "printed")


class OrthogonalityViolationTest(SimpleTestCase):
    """Test the failure of the Pythagoras split in the phase basis."""

    def test_qubit_counterexample(self):
        """Test the qubit with Bloch vector (0, 0, 0.5)."""
        rho = StateService.qubit_from_bloch((0.0, 0.0, 0.5))
        report = PhaseBasisService.orthogonality_violation(rho, PhaseBasisConfig(2))
        self.assertGreater(report.violation, 1e-3)
        c = math.sqrt(math.pi / 2)
        expected = (c - 1 / math.sqrt(2)) * (math.sqrt(0.75) + 0.5 - 2 * c)
        self.assertAlmostEqual(report.cross_term, expected, places=12)
        self.assertLessEqual(report.stability, 1e-8)

    def test_maximally_mixed_unit_prefactor(self):
        """Test that I/N has no cross term with the unit prefactor."""
        for n in (2, 3, 4):
            config = PhaseBasisConfig(n, prefactor=SqrtPrefactor.UNIT)
            report = PhaseBasisService.orthogonality_violation(
                DensityService.maximally_mixed(n), config
            )
            self.assertAlmostEqual(report.violation, 0.0, places=12)
            self.assertAlmostEqual(report.coherence.mismatch, 0.0, places=12)

    def test_maximally_mixed_printed_prefactor(self):
        """Test that the printed prefactor leaves a cross term even for I/N."""
        report = PhaseBasisService.orthogonality_violation(
            DensityService.maximally_mixed(3), PhaseBasisConfig(3)
        )
        expected = 3 * (math.sqrt(2 * math.pi) / 3 - 1 / math.sqrt(3)) ** 2
        self.assertAlmostEqual(report.violation, expected, places=12)

    def test_generic_qubit_unit_prefactor(self):
        """Test that a qubit with phase-dependent weights violates orthogonality."""
        rho = StateService.qubit_from_bloch((0.5, 0.0, 0.0))
        config = PhaseBasisConfig(2, prefactor=SqrtPrefactor.UNIT)
        report = PhaseBasisService.orthogonality_violation(rho, config)
        self.assertGreater(report.violation, 1e-3)
        self.assertGreater(report.off_diagonal_mass, 0.0)

    def test_stable_under_node_doubling(self):
        """Test that doubling the starting grid leaves the value unchanged."""
        rho = random_density_matrix(3, np.random.default_rng(8))
        coarse = PhaseBasisService.orthogonality_violation(rho, PhaseBasisConfig(3))
        fine = PhaseBasisService.orthogonality_violation(
            rho, PhaseBasisConfig(3, quadrature_nodes=2 * coarse.nodes)
        )
        self.assertAlmostEqual(coarse.cross_term, fine.cross_term, delta=2e-8)

    def test_pythagoras_residual_is_twice_the_cross_term(self):
        """Test the phase-basis Pythagoras residual."""
        rho = StateService.qubit_from_bloch((0.5, 0.0, 0.0))
        config = PhaseBasisConfig(2)
        report = PhaseBasisService.orthogonality_violation(rho, config)
        terms = PhaseBasisService.phase_pythagoras_residual(rho, config)
        self.assertAlmostEqual(terms.residual, 2 * report.violation, delta=1e-7)

    def test_pure_state_does_not_converge(self):
        """Test that a vanishing phase weight stalls the quadrature."""
        rho = StateService.qubit_from_bloch((1.0, 0.0, 0.0))
        with self.assertRaises(QuadratureError) as context:
            PhaseBasisService.orthogonality_violation(rho, PhaseBasisConfig(2))
        self.assertEqual(context.exception.exit_code, 3)


class ContinuousCoherenceTest(SimpleTestCase):
    """Test the continuous-basis coherence."""

    def test_distance_does_not_reproduce_sqrt_purity(self):
        """Test that the two coherence forms disagree for a generic state."""
        rho = StateService.qubit_from_bloch((0.5, 0.0, 0.0))
        result = PhaseBasisService.continuous_basis_coherence(
            rho, PhaseBasisConfig(2, prefactor=SqrtPrefactor.UNIT)
        )
        self.assertAlmostEqual(result.sqrt_purity_form, 0.5, places=12)
        self.assertGreater(result.mismatch, 1e-3)
