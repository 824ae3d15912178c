"""
Tests for the states app.
"""

import math

import numpy as np
from django.test import SimpleTestCase
from scipy.special import gammaln

from apps.quantifiers.services import QuantifierService
from apps.states import oracles
from apps.states.fock import FockOperators
from apps.states.serializers.state_spec_serializer import (parse_state_spec,
                                                           state_spec_to_dict)
from apps.states.services import StateService, fix_global_phase
from apps.states.types import (SqueezedCoherent, StateSpec, StateVariant,
                               TruncationConfig)
from apps.utils.exceptions import (InvariantError, StateSpecError,
                                   TruncationError)


class QubitAndPhaseStateTest(SimpleTestCase):
    """Test the finite-dimensional families."""

    def test_qubit_from_bloch(self):
        """Test the documented Bloch examples."""
        np.testing.assert_allclose(StateService.qubit_from_bloch((0, 0, 0)).entries, np.eye(2) / 2)
        np.testing.assert_allclose(
            StateService.qubit_from_bloch((0, 0, 1)).entries, np.diag([1.0, 0.0])
        )
        np.testing.assert_allclose(
            StateService.qubit_from_bloch((1, 0, 0)).entries, [[0.5, 0.5], [0.5, 0.5]]
        )

    def test_qubit_outside_ball(self):
        """Test that |s| > 1 is rejected."""
        with self.assertRaises(InvariantError):
            StateService.qubit_from_bloch((0.8, 0.8, 0.0))

    def test_finite_phase_state(self):
        """Test phase states and their coherence."""
        np.testing.assert_allclose(StateService.finite_phase_state(1).amplitudes, [1.0])
        psi = StateService.finite_phase_state(4)
        np.testing.assert_allclose(psi.amplitudes, np.full(4, 0.5))
        self.assertAlmostEqual(QuantifierService.report_pure(psi).c_h, 3.0, places=12)

        rotated = StateService.finite_phase_state(4, [0.1, 2.0, -1.3, 0.7])
        self.assertAlmostEqual(QuantifierService.report_pure(rotated).c_h, 3.0, places=12)

    def test_finite_phase_state_bad_phases(self):
        """Test that the phase count must match N."""
        with self.assertRaises(InvariantError):
            StateService.finite_phase_state(3, [0.0, 1.0])


class BeamSplitterTest(SimpleTestCase):
    """Test the beam-splitter coefficients and their oracle."""

    def test_single_photon(self):
        """Test (1, 0) gives equal weights."""
        coefficients = StateService.beam_splitter_coefficients(1, 0)
        np.testing.assert_allclose(np.abs(coefficients), [1 / math.sqrt(2)] * 2, atol=1e-15)

    def test_hong_ou_mandel(self):
        """Test (1, 1) leaves no weight on the middle level."""
        coefficients = StateService.beam_splitter_coefficients(1, 1)
        np.testing.assert_allclose(coefficients, [1 / math.sqrt(2), 0.0, -1 / math.sqrt(2)])
        self.assertEqual(coefficients[1], 0.0)

    def test_normalization(self):
        """Test unit norm for a spread of inputs."""
        for n, m in ((0, 0), (3, 5), (25, 25), (60, 0), (17, 43)):
            coefficients = StateService.beam_splitter_coefficients(n, m)
            self.assertAlmostEqual(float(np.sum(coefficients**2)), 1.0, delta=1e-12)

    def test_oracle_agreement(self):
        """Test the c_j formula against the binomial expansion."""
        for total in range(0, 61, 4):
            for m in range(0, total + 1, 3):
                self.assertLess(
                    StateService.beam_splitter_oracle_deviation(total - m, m), 1e-10
                )

    def test_binomial_expansion(self):
        """Test (x + y)(x - y) = x^2 - y^2."""
        self.assertEqual(oracles.binomial_expansion(1, 1), [-1, 0, 1])
        self.assertEqual(oracles.binomial_expansion(2, 0), [1, 2, 1])

    def test_rotated_number_coherence(self):
        """Test the documented rotated number state coherences."""
        for n, m, expected in ((1, 0, 1.0), (1, 1, 1.0), (0, 0, 0.0)):
            psi = StateService.rotated_number_state(n, m)
            self.assertEqual(psi.dim, n + m + 1)
            self.assertAlmostEqual(QuantifierService.report_pure(psi).c_h, expected, places=12)

    def test_negative_photon_number(self):
        """Test that negative inputs are rejected."""
        with self.assertRaises(InvariantError):
            StateService.beam_splitter_coefficients(-1, 2)


class GeometricFamiliesTest(SimpleTestCase):
    """Test Susskind-Glogower and two-mode squeezed vacuum states."""

    def test_vacuum(self):
        """Test xi = 0 gives the vacuum."""
        psi, diagnostics = StateService.sg_phase_state(0.0)
        np.testing.assert_allclose(psi.amplitudes, [1.0])
        self.assertEqual(QuantifierService.report_pure(psi).c_h, 0.0)
        self.assertEqual(diagnostics.tail_mass, 0.0)

    def test_sg_closed_form(self):
        """Test C_H = 2|xi|/(1-|xi|) within ten tail tolerances."""
        for modulus in np.arange(1, 10) / 10:
            psi, diagnostics = StateService.sg_phase_state(modulus * np.exp(0.4j))
            report = QuantifierService.report_pure(psi)
            self.assertAlmostEqual(
                report.c_h, 2 * modulus / (1 - modulus), delta=10 * diagnostics.tail_mass_tol
            )

    def test_sg_mean_photon_one(self):
        """Test C_H = 2(1 + sqrt(2)) at one mean photon."""
        psi, _ = StateService.sg_phase_state(math.sqrt(0.5))
        self.assertAlmostEqual(
            QuantifierService.report_pure(psi).c_h, 2 * (1 + math.sqrt(2)), delta=1e-9
        )

    def test_tmsv_matches_sg(self):
        """Test the twin-ladder distribution has the SG coherence."""
        p, _ = StateService.tmsv_distribution(0.5)
        self.assertAlmostEqual(float(np.sum(p)), 1.0, delta=1e-10)
        self.assertAlmostEqual(QuantifierService.coherence_pure(p), 2.0, delta=1e-9)

        p, _ = StateService.tmsv_distribution(0.0)
        np.testing.assert_array_equal(p, [1.0])

    def test_xi_outside_disk(self):
        """Test that |xi| >= 1 is rejected."""
        with self.assertRaises(InvariantError):
            StateService.sg_phase_state(1.0)
        with self.assertRaises(InvariantError):
            StateService.tmsv_state(0.6 + 0.8j)

    def test_fixed_cutoff_too_small(self):
        """Test that a fixed cutoff with a heavy tail is refused."""
        with self.assertRaises(TruncationError):
            StateService.sg_phase_state(0.9, TruncationConfig(dim=10, auto_grow=False))

    def test_ceiling(self):
        """Test that the dimension ceiling is enforced."""
        with self.assertRaises(TruncationError):
            StateService.sg_phase_state(0.999, TruncationConfig(ceiling=64))


class FockOperatorsTest(SimpleTestCase):
    """Test truncated Fock operators."""

    def test_annihilation(self):
        """Test the two-level ladder operator."""
        np.testing.assert_array_equal(FockOperators(2).annihilation, [[0, 1], [0, 0]])

    def test_identity_displacement(self):
        """Test D(0) = I."""
        np.testing.assert_allclose(FockOperators(6).displacement(0.0), np.eye(6), atol=1e-15)

    def test_unitarity(self):
        """Test orthonormal columns of D(alpha) and S(r)."""
        operators = FockOperators(40)
        self.assertLess(operators.unitarity_defect(operators.displacement(1.5 - 0.5j), 0.1), 1e-8)
        self.assertLess(operators.unitarity_defect(operators.squeeze(0.7), 0.1), 1e-8)

    def test_too_small(self):
        """Test that one level is rejected."""
        with self.assertRaises(InvariantError):
            FockOperators(1)


class SqueezedCoherentTest(SimpleTestCase):
    """Test squeezed coherent states."""

    def test_coherent_state_is_poissonian(self):
        """Test r = 0 gives Poisson statistics with mean R^2."""
        psi, diagnostics = StateService.squeezed_coherent_state(2.0, 0.0)
        levels = np.arange(psi.dim)
        poisson = np.exp(-4.0 + levels * math.log(4.0) - gammaln(levels + 1))

        np.testing.assert_allclose(psi.probabilities, poisson, atol=1e-12)
        self.assertAlmostEqual(
            QuantifierService.report_pure(psi).c_h,
            QuantifierService.coherence_pure(poisson / poisson.sum()),
            delta=1e-9,
        )
        self.assertLess(diagnostics.oracle_max_deviation, 1e-8)

    def test_squeezed_vacuum_parity(self):
        """Test that squeezed vacuum has no odd-number amplitudes."""
        psi, _ = StateService.squeezed_coherent_state(0.0, 0.8)
        np.testing.assert_array_equal(psi.amplitudes[1::2], 0.0)

    def test_oracle_agreement(self):
        """Test operator exponentials against the Hermite recurrence."""
        for R, r in ((0.5, 0.2), (3.0, 1.0), (6.0, 1.5), (6.0, 0.0)):
            psi, diagnostics = StateService.squeezed_coherent_state(R, r, cross_check=True)
            reference = fix_global_phase(oracles.squeezed_coherent_amplitudes(R, r, psi.dim))
            np.testing.assert_allclose(psi.amplitudes, reference, atol=1e-8)
            self.assertAlmostEqual(psi.norm_sq, 1.0, delta=1e-10)

    def test_moments(self):
        """Test the closed-form number variance against the built state."""
        built = StateService.build(StateSpec(StateVariant.SQUEEZED_COHERENT, SqueezedCoherent(3.0, 0.5)))
        mean, variance = StateService.squeezed_coherent_moments(3.0, 0.5)
        self.assertAlmostEqual(built.mean_photons, mean, delta=1e-8)
        self.assertAlmostEqual(built.number_variance, variance, delta=1e-7)

    def test_gaussian_regime(self):
        """Test exact C_H against 2 sqrt(2 pi var) - 1 for large displacement."""
        for R, r in ((10.0, 0.0), (10.0, 0.5), (8.0, 0.25)):
            psi, _ = StateService.squeezed_coherent_state(R, r)
            p = psi.probabilities
            levels = np.arange(psi.dim)
            variance = float(np.sum(levels**2 * p) - np.sum(levels * p) ** 2)
            estimate = 2 * math.sqrt(2 * math.pi * variance) - 1
            c_h = QuantifierService.report_pure(psi).c_h
            self.assertLess(abs(c_h - estimate) / estimate, 0.05)

    def test_energy_split(self):
        """Test the photon budget split between R and r."""
        R, r = StateService.energy_split(30.0, 0.3)
        self.assertAlmostEqual(math.sinh(r) ** 2, 9.0, places=12)
        self.assertAlmostEqual(R**2, 21.0, places=12)
        with self.assertRaises(InvariantError):
            StateService.energy_split(30.0, 1.5)

    def test_amplitude_split(self):
        """Test the displacement-axis split keeps the photon budget."""
        R, r = StateService.amplitude_split(30.0, 0.3)
        self.assertAlmostEqual(R, 0.7 * math.sqrt(30.0), places=12)
        self.assertAlmostEqual(R**2 + math.sinh(r) ** 2, 30.0, places=10)
        self.assertEqual(StateService.amplitude_split(30.0, 1.0)[0], 0.0)
        with self.assertRaises(InvariantError):
            StateService.amplitude_split(30.0, -0.1)

    def test_pure_squeezing_at_thirty_photons(self):
        """Test that squeezed vacuum with n = 30 fits below the default ceiling."""
        R, r = StateService.energy_split(30.0, 1.0)
        psi, diagnostics = StateService.squeezed_coherent_state(R, r)
        self.assertLessEqual(psi.dim, 4096)
        self.assertLessEqual(diagnostics.tail_mass, diagnostics.tail_mass_tol)
        self.assertAlmostEqual(psi.norm_sq, 1.0, delta=1e-10)

    def test_growth_stops_at_the_ceiling(self):
        """Test that the last doubling is clamped to the ceiling."""
        psi, diagnostics = StateService.squeezed_coherent_state(
            2.0, 0.0, TruncationConfig(dim=20, ceiling=30)
        )
        self.assertEqual(psi.dim, 30)
        self.assertEqual(diagnostics.growth_steps, 1)

        with self.assertRaises(TruncationError):
            StateService.squeezed_coherent_state(2.0, 0.0, TruncationConfig(dim=10, ceiling=15))


class DisplacedNumberTest(SimpleTestCase):
    """Test displaced number states."""

    def test_zero_displacement(self):
        """Test alpha = 0 leaves |n0> untouched."""
        psi, _ = StateService.displaced_number_state(0.0, 3)
        self.assertAlmostEqual(abs(psi.amplitudes[3]), 1.0, places=14)
        self.assertEqual(QuantifierService.report_pure(psi).c_h, 0.0)

    def test_matches_coherent_state(self):
        """Test D(alpha)|0> against the r = 0 squeezed coherent state."""
        displaced, _ = StateService.displaced_number_state(2.5, 0)
        coherent, _ = StateService.squeezed_coherent_state(2.5, 0.0)
        np.testing.assert_allclose(displaced.amplitudes, coherent.amplitudes, atol=1e-10)

    def test_laguerre_oracle(self):
        """Test operator exponentials against the Laguerre closed form."""
        for alpha, n0 in ((1.2 + 0.7j, 1), (3.0, 2), (-2.0 + 4.0j, 4), (6.0, 4)):
            psi, diagnostics = StateService.displaced_number_state(alpha, n0, cross_check=True)
            self.assertLess(diagnostics.oracle_max_deviation, 1e-8)
            self.assertLessEqual(1.0 - float(np.sum(psi.probabilities)), 1e-10)

    def test_negative_label(self):
        """Test that n0 < 0 is rejected."""
        with self.assertRaises(InvariantError):
            StateService.displaced_number_state(1.0, -1)


class StateSpecSerializerTest(SimpleTestCase):
    """Test StateSpec parsing."""

    def test_squeezed_coherent(self):
        """Test the canonical example document."""
        spec = parse_state_spec('{"variant": "SqueezedCoherent", "R": 3.0, "r": 0.5}')
        self.assertEqual(spec.variant, StateVariant.SQUEEZED_COHERENT)
        self.assertEqual((spec.parameters.R, spec.parameters.r), (3.0, 0.5))
        self.assertTrue(spec.truncation.auto_grow)

    def test_complex_forms(self):
        """Test every accepted complex notation."""
        for xi in (0.5, [0.3, 0.4], {"re": 0.3, "im": 0.4}):
            spec = parse_state_spec({"variant": "SGPhase", "xi": xi})
            self.assertLess(abs(spec.parameters.xi), 1)
        spec = parse_state_spec({"variant": "DisplacedNumber", "alpha": [1.0, -2.0], "n0": 2})
        self.assertEqual(spec.parameters.alpha, 1.0 - 2.0j)

    def test_truncation(self):
        """Test the nested truncation settings."""
        spec = parse_state_spec(
            {"variant": "TMSV", "xi": 0.2, "trunc": {"dim": 64, "auto_grow": False}}
        )
        self.assertEqual(spec.truncation, TruncationConfig(dim=64, auto_grow=False))

    def test_invalid_documents(self):
        """Test that malformed specs raise StateSpecError."""
        documents = [
            "not json",
            "[1, 2]",
            {"variant": "Nope"},
            {"variant": "SGPhase", "xi": 1.2},
            {"variant": "QubitBloch", "s": [1.0, 1.0, 0.0]},
            {"variant": "FinitePhase", "N": 3, "phases": [0.0]},
            {"variant": "RotatedNumber", "n": 1, "m": 1, "extra": 2},
            {"variant": "DisplacedNumber", "alpha": "big", "n0": 0},
        ]
        for document in documents:
            with self.assertRaises(StateSpecError):
                parse_state_spec(document)

    def test_round_trip_representation(self):
        """Test that the canonical form parses back to the same spec."""
        spec = parse_state_spec({"variant": "DisplacedNumber", "alpha": [1.0, 0.5], "n0": 1})
        document = state_spec_to_dict(spec)
        self.assertEqual(document["alpha"], [1.0, 0.5])
        self.assertEqual(parse_state_spec(document), spec)


class BuildTest(SimpleTestCase):
    """Test the StateSpec dispatcher."""

    def test_build_fock_family(self):
        """Test a Fock family carries truncation and photon moments."""
        built = StateService.build(parse_state_spec({"variant": "SGPhase", "xi": 0.5}))
        self.assertTrue(built.is_pure)
        self.assertTrue(built.is_fock_family)
        self.assertAlmostEqual(built.mean_photons, 1 / 3, delta=1e-9)
        self.assertIsNotNone(built.truncation)

    def test_build_qubit(self):
        """Test the qubit family gives a density matrix."""
        built = StateService.build(parse_state_spec({"variant": "QubitBloch", "s": [1, 0, 0]}))
        self.assertFalse(built.is_pure)
        self.assertIsNone(built.truncation)
