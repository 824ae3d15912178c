"""
Tests for the hellinger app.
"""

import numpy as np
from django.test import SimpleTestCase

from apps.hellinger.services import DensityService
from apps.hellinger.types import DensityDiagnostics, DensityMatrix, Tolerances
from apps.utils.exceptions import (ConsistencyError, InvalidDensityMatrixError,
                                   InvariantError, StructuralError)


def ginibre_density(dim, rng):
    matrix = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = matrix @ matrix.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


class ValidateDensityTest(SimpleTestCase):
    """Test density-matrix validation."""

    def test_maximally_mixed_is_valid(self):
        """Test that I/2 passes validation."""
        result = DensityService.validate_density(np.eye(2) / 2)
        self.assertIsInstance(result, DensityMatrix)
        self.assertEqual(result.dim, 2)

    def test_pure_basis_state_is_valid(self):
        """Test that diag(1, 0) passes validation."""
        result = DensityService.validate_density(np.diag([1.0, 0.0]))
        self.assertIsInstance(result, DensityMatrix)

    def test_negative_eigenvalue_reported(self):
        """Test that a non-PSD matrix yields a positivity violation."""
        result = DensityService.validate_density([[0.6, 0.6], [0.6, 0.4]])

        self.assertIsInstance(result, DensityDiagnostics)
        self.assertEqual(result.violated, ["positive_semidefinite"])
        expected = np.sqrt(0.1**2 + 0.6**2) - 0.5
        self.assertAlmostEqual(result.violations[0].magnitude, expected, places=12)

    def test_multiple_violations_reported(self):
        """Test that every violated invariant is named."""
        result = DensityService.validate_density([[1.0, 0.5], [0.0, 0.5]])

        self.assertIsInstance(result, DensityDiagnostics)
        self.assertIn("hermitian", result.violated)
        self.assertIn("unit_trace", result.violated)

    def test_non_square_input_is_structural_error(self):
        """Test that a non-square matrix raises."""
        with self.assertRaises(StructuralError):
            DensityService.validate_density(np.ones((2, 3)) / 6)

    def test_require_density_raises(self):
        """Test that require_density turns diagnostics into an error."""
        with self.assertRaises(InvalidDensityMatrixError) as ctx:
            DensityService.require_density([[0.6, 0.6], [0.6, 0.4]])
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_tolerances_override(self):
        """Test that a looser PSD tolerance accepts the same matrix."""
        loose = Tolerances(psd_tol=0.2)
        result = DensityService.validate_density([[0.6, 0.6], [0.6, 0.4]], loose)
        self.assertIsInstance(result, DensityMatrix)


class ElementwiseSqrtTest(SimpleTestCase):
    """Test the Hermitian-consistent elementwise square root."""

    def test_diagonal_matrix(self):
        """Test the root of a diagonal matrix."""
        root = DensityService.hermitian_elementwise_sqrt(DensityMatrix(np.eye(2) / 2))
        np.testing.assert_allclose(root.entries, np.eye(2) / np.sqrt(2))

    def test_negative_real_off_diagonal(self):
        """Test the branch choice on a negative real coherence."""
        rho = DensityMatrix([[0.5, -0.5], [-0.5, 0.5]])
        root = DensityService.hermitian_elementwise_sqrt(rho).entries

        self.assertAlmostEqual(root[0, 1], 1j / np.sqrt(2), places=15)
        self.assertAlmostEqual(root[1, 0], -1j / np.sqrt(2), places=15)
        self.assertAlmostEqual((root[0, 1] * root[1, 0]).real, 0.5, places=15)

    def test_signed_zero_imaginary_part(self):
        """Test that -0.0 and +0.0 imaginary parts give the same branch."""
        for imag in (0.0, -0.0):
            entries = np.array([[0.5, complex(-0.5, imag)], [complex(-0.5, -imag), 0.5]])
            root = DensityService.hermitian_elementwise_sqrt(DensityMatrix(entries)).entries
            self.assertAlmostEqual(root[0, 1], 1j / np.sqrt(2), places=15)
            self.assertAlmostEqual(root[1, 0], -1j / np.sqrt(2), places=15)

    def test_sqrt_purity_identity(self):
        """Test tr(S^2) - 1 equals the l1 coherence on random states."""
        rng = np.random.default_rng(7)
        for _ in range(20):
            rho = ginibre_density(4, rng)
            root = DensityService.hermitian_elementwise_sqrt(rho).entries
            l1 = np.sum(np.abs(rho.entries)) - np.trace(rho.entries).real
            purity = DensityService.trace_of_product(root, root)
            self.assertAlmostEqual(purity.real - 1.0, l1, delta=1e-12)

    def test_sqrt_purity_identity_real_negative(self):
        """Test the identity holds for real matrices with negative entries."""
        rng = np.random.default_rng(11)
        for _ in range(20):
            matrix = rng.normal(size=(5, 5))
            rho = matrix @ matrix.T
            rho = DensityMatrix(rho / np.trace(rho))
            root = DensityService.hermitian_elementwise_sqrt(rho).entries
            l1 = np.sum(np.abs(rho.entries)) - 1.0
            purity = DensityService.trace_of_product(root, root)
            self.assertAlmostEqual(purity.real - 1.0, l1, delta=1e-12)

    def test_negative_diagonal_raises(self):
        """Test that a negative population is rejected."""
        with self.assertRaises(InvariantError):
            DensityService.hermitian_elementwise_sqrt(DensityMatrix(np.diag([1.1, -0.1])))


class DistanceTest(SimpleTestCase):
    """Test the Hellinger-like and Hilbert-Schmidt distances."""

    def setUp(self):
        """Set up test data."""
        self.plus = DensityMatrix([[0.5, 0.5], [0.5, 0.5]])
        self.ground = DensityMatrix(np.diag([1.0, 0.0]))
        self.mixed = DensityService.maximally_mixed(2)

    def test_distance_to_self_is_zero(self):
        """Test d(a, a) = 0 for both distances."""
        self.assertEqual(DensityService.hellinger_distance_sq(self.plus, self.plus), 0.0)
        self.assertEqual(
            DensityService.hilbert_schmidt_distance_sq(self.plus, self.plus), 0.0
        )

    def test_hellinger_to_diagonal(self):
        """Test the qubit s=(1,0,0) distance to its diagonal part."""
        diagonal = DensityService.diagonal_part(self.plus)
        self.assertAlmostEqual(
            DensityService.hellinger_distance_sq(self.plus, diagonal), 1.0, places=14
        )

    def test_hellinger_basis_state_to_mixed(self):
        """Test the maximal certainty distance for N=2."""
        self.assertAlmostEqual(
            DensityService.hellinger_distance_sq(self.ground, self.mixed),
            2 * (1 - 1 / np.sqrt(2)),
            places=14,
        )

    def test_hilbert_schmidt_values(self):
        """Test Hilbert-Schmidt distances from the examples."""
        diagonal = DensityService.diagonal_part(self.plus)
        self.assertAlmostEqual(
            DensityService.hilbert_schmidt_distance_sq(self.plus, diagonal), 0.5
        )
        self.assertAlmostEqual(
            DensityService.hilbert_schmidt_distance_sq(self.ground, self.mixed), 0.5
        )

    def test_hellinger_symmetry(self):
        """Test that the distance is symmetric."""
        rng = np.random.default_rng(3)
        a = ginibre_density(6, rng)
        b = ginibre_density(6, rng)
        self.assertAlmostEqual(
            DensityService.hellinger_distance_sq(a, b),
            DensityService.hellinger_distance_sq(b, a),
            places=13,
        )

    def test_hilbert_schmidt_coherence_sum(self):
        """Test d_HS(rho, rho_d) equals the squared off-diagonal sum."""
        rng = np.random.default_rng(5)
        rho = ginibre_density(5, rng)
        off_diagonal = rho.entries - np.diag(rho.entries.diagonal())
        self.assertAlmostEqual(
            DensityService.hilbert_schmidt_distance_sq(
                rho, DensityService.diagonal_part(rho)
            ),
            float(np.sum(np.abs(off_diagonal) ** 2)),
            places=14,
        )

    def test_dimension_mismatch(self):
        """Test that distances refuse mismatched dimensions."""
        with self.assertRaises(StructuralError):
            DensityService.hellinger_distance_sq(self.plus, DensityService.maximally_mixed(3))

    def test_basis_mismatch(self):
        """Test that distances refuse mismatched basis labels."""
        other = DensityMatrix(self.plus.entries, basis_label="fock")
        with self.assertRaises(StructuralError):
            DensityService.hilbert_schmidt_distance_sq(self.plus, other)

    def test_imaginary_residue_raises(self):
        """Test that a non-Hermitian root leaves an imaginary trace."""

        def skewed_root(rho):
            return DensityService.hermitian_elementwise_sqrt(rho).__class__(
                rho.entries * np.array([[1, 1j], [1, 1]])
            )

        with self.assertRaises(ConsistencyError):
            DensityService.hellinger_distance_sq(
                self.plus, self.mixed, sqrt_fn=skewed_root
            )


class DiagonalAndMixedTest(SimpleTestCase):
    """Test diagonal_part and maximally_mixed."""

    def test_diagonal_part_idempotent(self):
        """Test that taking the diagonal twice changes nothing."""
        rho = ginibre_density(4, np.random.default_rng(1))
        once = DensityService.diagonal_part(rho)
        twice = DensityService.diagonal_part(once)
        np.testing.assert_array_equal(once.entries, twice.entries)

    def test_phase_state_diagonal(self):
        """Test that an N=4 phase state has diagonal part I/4."""
        psi = np.exp(1j * np.array([0.0, 0.3, 1.1, 2.0])) / 2
        rho = DensityMatrix(np.outer(psi, psi.conj()))
        np.testing.assert_allclose(
            DensityService.diagonal_part(rho).entries, np.eye(4) / 4, atol=1e-15
        )

    def test_maximally_mixed(self):
        """Test I/N construction."""
        np.testing.assert_array_equal(DensityService.maximally_mixed(1).entries, [[1.0]])
        self.assertAlmostEqual(
            np.trace(DensityService.maximally_mixed(64).entries).real, 1.0, places=14
        )

    def test_maximally_mixed_zero_dim(self):
        """Test that N = 0 is rejected."""
        with self.assertRaises(InvariantError):
            DensityService.maximally_mixed(0)
