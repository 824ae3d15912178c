"""
Tests for the quantifiers app.
"""

import math

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from apps.hellinger.services import DensityService
from apps.hellinger.types import DensityMatrix, PureState, SqrtMatrix
from apps.quantifiers.sampling import (random_bloch_vector,
                                       random_density_matrix,
                                       random_diagonal_state,
                                       random_pure_state)
from apps.quantifiers.services import QuantifierService
from apps.utils.exceptions import (ConsistencyError, ContractError,
                                   InvariantError)


def bloch_density(s):
    s_x, s_y, s_z = s
    return DensityMatrix(
        0.5 * np.array([[1 + s_z, s_x - 1j * s_y], [s_x + 1j * s_y, 1 - s_z]])
    )


def phase_state(n, phases=None):
    phases = np.zeros(n) if phases is None else np.asarray(phases)
    return PureState(np.exp(1j * phases) / math.sqrt(n))


def naive_sqrt(rho):
    return SqrtMatrix(np.sqrt(rho.entries))


class CoherenceTest(SimpleTestCase):
    """Test the Hellinger coherence."""

    def test_basis_state(self):
        """Test that a basis state is incoherent."""
        rho = DensityMatrix(np.diag([0.0, 1.0, 0.0]))
        self.assertEqual(QuantifierService.coherence_h(rho), 0.0)

    def test_phase_state_is_maximal(self):
        """Test that an N-dimensional phase state reaches N - 1."""
        for n in (2, 3, 5, 8):
            rho = phase_state(n, np.linspace(0, 1, n)).to_density()
            self.assertAlmostEqual(QuantifierService.coherence_h(rho), n - 1, places=12)

    def test_qubit(self):
        """Test the qubit Bloch (0.6, 0, 0.8) example."""
        rho = bloch_density((0.6, 0.0, 0.8))
        self.assertAlmostEqual(QuantifierService.coherence_h(rho), 0.6, places=14)

    def test_naive_root_detected(self):
        """Test that a principal-branch root on both triangles is rejected."""
        rho = bloch_density((-0.8, 0.0, 0.0))
        with self.assertRaises(ConsistencyError):
            QuantifierService.coherence_h(rho, sqrt_fn=naive_sqrt, cross_check=True)

    @override_settings(COHERENCE_LAB={**settings.COHERENCE_LAB, "CROSS_CHECK": False})
    def test_cross_check_disabled(self):
        """Test that the distance form is skipped without cross-checking."""
        rho = bloch_density((-0.8, 0.0, 0.0))
        self.assertAlmostEqual(
            QuantifierService.coherence_h(rho, sqrt_fn=naive_sqrt), 0.8, places=14
        )


class CoherencePureTest(SimpleTestCase):
    """Test the pure-state coherence formula."""

    def test_examples(self):
        """Test the documented values."""
        self.assertAlmostEqual(QuantifierService.coherence_pure([0.5, 0.5]), 1.0)
        self.assertEqual(QuantifierService.coherence_pure([0.0, 1.0, 0.0]), 0.0)
        self.assertAlmostEqual(QuantifierService.coherence_pure(np.full(5, 0.2)), 4.0)

    def test_unnormalized(self):
        """Test that an unnormalized vector is rejected."""
        with self.assertRaises(InvariantError):
            QuantifierService.coherence_pure([0.5, 0.6])

    def test_matches_density_form(self):
        """Test coherence_pure(diag) equals coherence_h for pure states."""
        rng = np.random.default_rng(2)
        for dim in (2, 5, 9):
            psi = random_pure_state(dim, rng)
            self.assertAlmostEqual(
                QuantifierService.coherence_pure(psi.probabilities),
                QuantifierService.coherence_h(psi.to_density()),
                places=11,
            )


class CertaintyTest(SimpleTestCase):
    """Test certainty and nonclassicality."""

    def test_maximally_mixed(self):
        """Test that I/N has zero certainty and nonclassicality."""
        rho = DensityService.maximally_mixed(4)
        self.assertAlmostEqual(QuantifierService.certainty_h(rho), 0.0, places=14)
        self.assertAlmostEqual(QuantifierService.nonclassicality_h(rho), 0.0, places=14)

    def test_basis_state(self):
        """Test the maximal certainty 2 - sqrt(2) for N = 2."""
        rho = DensityMatrix(np.diag([1.0, 0.0]))
        self.assertAlmostEqual(QuantifierService.certainty_h(rho), 2 - math.sqrt(2), places=14)

    def test_qubit_z_axis(self):
        """Test the qubit certainty formula on the z axis."""
        for s_z in (-0.7, 0.0, 0.3, 0.9):
            rho = bloch_density((0.0, 0.0, s_z))
            self.assertAlmostEqual(
                QuantifierService.certainty_h(rho),
                2 - math.sqrt(1 + s_z) - math.sqrt(1 - s_z),
                places=14,
            )

    def test_phase_state_nonclassicality(self):
        """Test that an N = 3 phase state has NC_H = 2."""
        rho = phase_state(3).to_density()
        self.assertAlmostEqual(QuantifierService.nonclassicality_h(rho), 2.0, places=12)

    def test_qubit_x_axis(self):
        """Test NC_H = C_H = |s| for s = (1, 0, 0)."""
        rho = bloch_density((1.0, 0.0, 0.0))
        self.assertAlmostEqual(QuantifierService.nonclassicality_h(rho), 1.0, places=14)

    def test_naive_root_breaks_nonclassicality(self):
        """Test that the naive root is caught by the nonclassicality check."""
        rho = bloch_density((-0.8, 0.0, 0.0))
        with self.assertRaises(ConsistencyError):
            QuantifierService.nonclassicality_h(rho, sqrt_fn=naive_sqrt, cross_check=True)


class RenyiTest(SimpleTestCase):
    """Test the Renyi-1/2 entropy."""

    def test_values(self):
        """Test the delta, uniform and qubit values."""
        self.assertAlmostEqual(QuantifierService.renyi_half([1.0, 0.0]), 0.0)
        self.assertAlmostEqual(QuantifierService.renyi_half(np.full(6, 1 / 6)), math.log(6))
        self.assertAlmostEqual(QuantifierService.renyi_half([0.5, 0.5]), math.log(2))

    def test_certainty_link(self):
        """Test S_H = 2(1 - exp(H/2)/sqrt(N)) on random states."""
        rng = np.random.default_rng(4)
        rho = random_density_matrix(6, rng)
        renyi = QuantifierService.renyi_half(rho.populations / rho.populations.sum())
        self.assertAlmostEqual(
            QuantifierService.certainty_from_renyi(renyi, 6),
            QuantifierService.certainty_h(rho),
            places=12,
        )


class PythagorasTest(SimpleTestCase):
    """Test both Pythagoras identities and their orthogonality terms."""

    def setUp(self):
        """Set up test data."""
        self.rng = np.random.default_rng(20200101)

    def test_random_states_with_mixed_reference(self):
        """Test the identity with I/N for random states."""
        for dim in (2, 3, 4, 8, 16):
            for real in (False, True):
                rho = random_density_matrix(dim, self.rng, real=real)
                reference = DensityService.maximally_mixed(dim)
                check_h = QuantifierService.pythagoras_residual_h(rho, reference)
                check_hs = QuantifierService.pythagoras_residual_hs(rho, reference)
                self.assertLess(check_h.residual, 1e-12)
                self.assertLess(check_h.cross_term, 1e-12)
                self.assertLess(check_hs.residual, 1e-12)

    def test_random_diagonal_reference(self):
        """Test orthogonality with an arbitrary incoherent reference."""
        rho = random_density_matrix(8, self.rng)
        reference = random_diagonal_state(8, self.rng)
        check = QuantifierService.pythagoras_residual_h(rho, reference)
        self.assertLess(check.residual, 1e-12)
        self.assertLess(check.cross_term, 1e-12)

    def test_diagonal_state(self):
        """Test that an incoherent state has a zero coherence term."""
        rho = random_diagonal_state(5, self.rng)
        check = QuantifierService.pythagoras_residual_h(rho, DensityService.maximally_mixed(5))
        self.assertEqual(check.coherence, 0.0)
        self.assertLess(check.residual, 1e-12)

    def test_non_diagonal_reference(self):
        """Test that a coherent reference is a contract error."""
        rho = random_density_matrix(2, self.rng)
        with self.assertRaises(ContractError):
            QuantifierService.pythagoras_residual_h(rho, bloch_density((0.5, 0.0, 0.0)))


class DerivedRelationsTest(SimpleTestCase):
    """Test sqrt-purity and the duality inequality."""

    def test_sqrt_purity(self):
        """Test tr(sqrt(rho)^2) = C_H + 1."""
        self.assertAlmostEqual(
            QuantifierService.sqrt_purity(DensityService.maximally_mixed(3)), 1.0
        )
        self.assertAlmostEqual(
            QuantifierService.sqrt_purity(phase_state(4).to_density()), 4.0, places=12
        )
        self.assertAlmostEqual(
            QuantifierService.sqrt_purity(bloch_density((0.6, 0.0, 0.8))), 1.6, places=14
        )

    def test_duality_gap_pure(self):
        """Test that pure states saturate the duality inequality."""
        rng = np.random.default_rng(8)
        for dim in (2, 3, 7):
            rho = random_pure_state(dim, rng).to_density()
            self.assertLess(abs(QuantifierService.duality_gap(rho)), 1e-10)

    def test_duality_gap_mixed(self):
        """Test the gap of I/N and of a mixed qubit."""
        self.assertAlmostEqual(
            QuantifierService.duality_gap(DensityService.maximally_mixed(4)), 0.5, places=14
        )
        self.assertGreater(QuantifierService.duality_gap(bloch_density((0.3, 0.0, 0.0))), 0.0)


class HilbertSchmidtTest(SimpleTestCase):
    """Test the Hilbert-Schmidt quantifiers."""

    def test_phase_state(self):
        """Test c_hs = nc_hs = 1 - 1/N for phase states."""
        result = QuantifierService.hs_quantifiers(phase_state(5).to_density())
        self.assertAlmostEqual(result.c_hs, 0.8, places=14)
        self.assertAlmostEqual(result.nc_hs, 0.8, places=14)
        self.assertLess(result.residual, 1e-12)

    def test_maximally_mixed(self):
        """Test that I/N has every HS quantifier zero."""
        result = QuantifierService.hs_quantifiers(DensityService.maximally_mixed(3))
        self.assertEqual((result.c_hs, result.s_hs), (0.0, 0.0))
        self.assertAlmostEqual(result.nc_hs, 0.0, places=15)

    def test_qubit(self):
        """Test the qubit s = (1, 0, 0) values."""
        result = QuantifierService.hs_quantifiers(bloch_density((1.0, 0.0, 0.0)))
        self.assertAlmostEqual(result.c_hs, 0.5)
        self.assertAlmostEqual(result.s_hs, 0.0)
        self.assertAlmostEqual(result.nc_hs, 0.5)


class QubitTest(SimpleTestCase):
    """Test qubit closed forms and the basis-rotation search."""

    def test_closed_form_examples(self):
        """Test the documented qubit values."""
        result = QuantifierService.qubit_closed_forms((0.0, 0.0, 1.0))
        self.assertEqual(result.c_h, 0.0)
        self.assertAlmostEqual(result.s_h, 2 - math.sqrt(2), places=15)

        result = QuantifierService.qubit_closed_forms((1.0, 0.0, 0.0))
        self.assertEqual((result.c_h, result.c_h_max_over_bases), (1.0, 1.0))
        self.assertAlmostEqual(result.s_h, 0.0, places=15)

        result = QuantifierService.qubit_closed_forms((0.0, 0.0, 0.0))
        self.assertEqual((result.c_h, result.s_h, result.nc_h), (0.0, 0.0, 0.0))

    def test_closed_forms_match_matrix(self):
        """Test closed forms against the matrix quantifiers."""
        rng = np.random.default_rng(12)
        for _ in range(200):
            s = random_bloch_vector(rng)
            rho = bloch_density(s)
            closed = QuantifierService.qubit_closed_forms(s)
            self.assertAlmostEqual(closed.c_h, QuantifierService.coherence_h(rho), delta=1e-12)
            self.assertAlmostEqual(closed.s_h, QuantifierService.certainty_h(rho), delta=1e-12)
            self.assertAlmostEqual(
                closed.nc_h, QuantifierService.nonclassicality_h(rho), delta=1e-12
            )

    def test_outside_ball(self):
        """Test that |s| > 1 is rejected."""
        with self.assertRaises(InvariantError):
            QuantifierService.qubit_closed_forms((1.0, 1.0, 0.0))

    def test_basis_optimum(self):
        """Test that the best basis reaches |s| with rotated s_z = 0."""
        for s in ((0.0, 0.0, 0.9), (0.3, -0.4, 0.5), (0.6, 0.0, 0.0)):
            optimum = QuantifierService.qubit_basis_optimum(bloch_density(s))
            length = float(np.linalg.norm(s))
            self.assertAlmostEqual(optimum.c_h_max, length, delta=1e-6)
            self.assertAlmostEqual(optimum.rotated_s_z, 0.0, delta=1e-6)
            self.assertAlmostEqual(optimum.nc_h_at_optimum, length, delta=1e-6)
            self.assertLessEqual(optimum.grid_c_h_max, length + 1e-12)
            self.assertGreater(optimum.grid_c_h_max, length - 1e-4)


class ReportTest(SimpleTestCase):
    """Test the full reports."""

    def test_random_report_is_valid(self):
        """Test that random mixed states pass every report invariant."""
        rng = np.random.default_rng(1)
        for dim in (2, 4, 16):
            report = QuantifierService.report(random_density_matrix(dim, rng))
            self.assertEqual(report.invariant_violations(), [])
            self.assertAlmostEqual(report.sqrt_purity, report.c_h + 1, places=10)

    @override_settings(COHERENCE_LAB={**settings.COHERENCE_LAB, "CROSS_CHECK": False})
    def test_residual_without_cross_check(self):
        """Test that the Hellinger residual comes from the distances, not C + S."""
        rho = DensityMatrix([[0.7, 0.2], [0.2, 0.3]])
        self.assertLess(QuantifierService.report(rho).pythagoras_residual_h, 1e-12)

        def inflated_root(state):
            # scales the root of non-diagonal states only, breaking orthogonality
            off_diagonal = state.entries - np.diag(state.entries.diagonal())
            scale = 1.1 if np.any(off_diagonal) else 1.0
            return SqrtMatrix(scale * np.sqrt(np.abs(state.entries)))

        report = QuantifierService.report(rho, sqrt_fn=inflated_root)
        expected = 0.2 * sum(p - math.sqrt(p / 2) for p in (0.7, 0.3))
        self.assertAlmostEqual(report.pythagoras_residual_h, abs(expected), places=12)
        self.assertGreater(report.pythagoras_residual_h, 1e-3)

    def test_pure_report_matches_density_report(self):
        """Test the amplitude path against the density-matrix path."""
        rng = np.random.default_rng(6)
        psi = random_pure_state(7, rng)
        pure = QuantifierService.report_pure(psi)
        mixed = QuantifierService.report(psi.to_density())
        for name in ("c_h", "s_h", "nc_h", "c_hs", "s_hs", "nc_hs", "x_sum", "renyi_half"):
            self.assertAlmostEqual(getattr(pure, name), getattr(mixed, name), places=11)
        self.assertLess(abs(pure.duality_gap), 1e-10)

    def test_pure_report_phase_state(self):
        """Test a finite phase state report."""
        report = QuantifierService.report_pure(phase_state(4))
        self.assertAlmostEqual(report.c_h, 3.0, places=12)
        self.assertAlmostEqual(report.nc_h, 3.0, places=12)
        self.assertTrue(report.is_valid)

    def test_unnormalized_pure_state(self):
        """Test that an unnormalized amplitude vector is rejected."""
        with self.assertRaises(InvariantError):
            QuantifierService.report_pure(PureState([1.0, 1.0]))

    def test_bounds_flagged(self):
        """Test that an out-of-range row reports its violations."""
        report = QuantifierService.report_pure(phase_state(2))
        report.c_h = 5.0
        self.assertIn("c_h_bounds", report.invariant_violations())
        report.c_h = float("nan")
        self.assertEqual(report.invariant_violations(), ["non_finite"])
