"""
Tests for the reports app.
"""

import io
import json
import math
from unittest import mock

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.hellinger.types import SqrtMatrix
from apps.reports.figures import FigureService, grid
from apps.reports.types import SweepRow, SweepTable, VerificationReport
from apps.reports.verification import VerificationService
from apps.utils.constants import RANDOM_SUITE_DIMS
from apps.utils.exceptions import InvariantError


def naive_sqrt(rho):
    """Principal root of every entry, without the Hermitian fix."""
    return SqrtMatrix(np.sqrt(rho.entries))


def run_command(*args):
    stdout, stderr = io.StringIO(), io.StringIO()
    call_command(*args, stdout=stdout, stderr=stderr)
    return stdout.getvalue()


def csv_body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


class QuantifyCommandTest(SimpleTestCase):
    """Test the quantify command."""

    def quantify(self, spec):
        return json.loads(run_command("quantify", json.dumps(spec)))

    def test_qubit_example(self):
        """Test that the qubit (1, 0, 0) has unit coherence."""
        document = self.quantify({"variant": "QubitBloch", "s": [1, 0, 0]})
        self.assertEqual(document["library"], "coherence-lab")
        self.assertAlmostEqual(document["report"]["c_h"], 1.0, places=10)
        self.assertEqual(document["report"]["invariant_violations"], [])

    def test_phase_state_example(self):
        """Test that the four-level phase state reaches N - 1."""
        document = self.quantify({"variant": "FinitePhase", "N": 4})
        self.assertAlmostEqual(document["report"]["nc_h"], 3.0, places=10)

    def test_sg_phase_state_example(self):
        """Test that the SG phase state at |xi| = 0.5 has C_H = 2."""
        document = self.quantify({"variant": "SGPhase", "xi": 0.5})
        report = document["report"]
        self.assertAlmostEqual(report["c_h"], 2.0, delta=1e-8)
        self.assertAlmostEqual(report["nc_h_infinite"], 4.0, delta=1e-8)
        self.assertIsNotNone(report["truncation"])

    def test_truncation_flags_override_the_spec(self):
        """Test that --trunc-dim replaces the cutoff from the spec."""
        spec = json.dumps({"variant": "SqueezedCoherent", "R": 1.0, "r": 0.2})
        document = json.loads(run_command("quantify", spec, "--trunc-dim", "64"))
        self.assertEqual(document["state"]["trunc"]["dim"], 64)
        self.assertGreaterEqual(document["report"]["truncation"]["dim"], 64)

    def test_invalid_spec_is_a_validation_error(self):
        """Test that a bad spec exits with the validation code."""
        with self.assertRaises(CommandError) as context:
            run_command("quantify", json.dumps({"variant": "QubitBloch", "s": [1, 1, 1]}))
        self.assertEqual(context.exception.returncode, 2)

        with self.assertRaises(CommandError) as context:
            run_command("quantify", "{not json")
        self.assertEqual(context.exception.returncode, 2)

    def test_missing_argument_is_a_usage_error(self):
        """Test that argument errors exit with the usage code."""
        with self.assertRaises(CommandError) as context:
            run_command("quantify")
        self.assertEqual(context.exception.returncode, 1)


class FigureCommandTest(SimpleTestCase):
    """Test the figure sweeps."""

    def test_fig3_dip_at_equal_split(self):
        """Test the local coherence minimum at m = 25 for NT = 50."""
        table = FigureService.run("fig3")
        self.assertEqual(len(table.rows), 51)
        self.assertIn(25, table.metadata["local_minima_m"])

        c_h = table.column("c_h")
        self.assertLess(c_h[25], c_h[24])
        self.assertLess(c_h[25], c_h[26])
        self.assertEqual(table.invalid_rows, [])

    def test_fig2_crossover(self):
        """Test that twin inputs lose at small NT and win at large NT."""
        table = FigureService.run("fig2", overrides={"NT": [2, 60]})
        values = {
            (row.parameters["NT"], row.parameters["input"]): row.report.c_h for row in table.rows
        }
        self.assertGreater(values[(2, "su2")], values[(2, "twin")])
        self.assertGreater(values[(60, "twin")], values[(60, "su2")])
        self.assertEqual(table.metadata["crossover_nt"], 60)

    def test_fig2_closed_form_column(self):
        """Test that the closed-form column matches the report."""
        table = FigureService.run("fig2", overrides={"NT": [4, 10]})
        for row in table.rows:
            self.assertAlmostEqual(row.extras["closed_form_c_h"], row.report.c_h, places=10)

    def test_fig6_optimum_location(self):
        """Test that the best squeeze share of the displacement lies in [0.2, 0.4]."""
        table = FigureService.run("fig6", overrides={"nbar": [16.0, 30.0], "f": grid(0.0, 1.0, 0.02)})
        self.assertEqual(table.invalid_rows, [])
        for mean in ("16.0", "30.0"):
            argmax = table.metadata["argmax_f"][mean]
            self.assertGreaterEqual(argmax, 0.2)
            self.assertLessEqual(argmax, 0.4)
            energy = table.metadata["argmax_energy_fraction"][mean]
            self.assertAlmostEqual(energy, 1.0 - (1.0 - argmax) ** 2, places=9)

    def test_fig6_energy_split(self):
        """Test the energy-share axis keeps n fixed and reports the same fraction."""
        table = FigureService.run(
            "fig6", overrides={"nbar": [30.0], "f": [0.0, 0.5, 1.0], "split": "energy"}
        )
        for row in table.rows:
            self.assertAlmostEqual(row.parameters["energy_fraction"], row.parameters["f"], places=12)
            self.assertAlmostEqual(row.report.mean_photons, 30.0, delta=1e-4)

    def test_fig6_unknown_split(self):
        """Test that an unknown split axis is a validation error."""
        with self.assertRaises(InvariantError):
            FigureService.run("fig6", overrides={"nbar": [30.0], "f": [0.5], "split": "phase"})

    def test_fig7_n0_zero_grows_softest(self):
        """Test that the displaced vacuum lies below displaced number states."""
        table = FigureService.run("fig7", overrides={"n0": [0, 1, 2, 4], "alpha": [1.0, 2.0]})
        c_h = {(row.parameters["n0"], row.parameters["alpha"]): row.report.c_h for row in table.rows}
        for alpha in (1.0, 2.0):
            for n0 in (1, 2, 4):
                self.assertLess(c_h[(0, alpha)], c_h[(n0, alpha)])

    def test_fig4_coherence_grows_with_displacement(self):
        """Test monotone growth in R at fixed squeezing."""
        table = FigureService.run("fig4", overrides={"r": [0.5], "R": [0.0, 2.0, 4.0, 8.0]})
        c_h = table.column("c_h")
        self.assertEqual(c_h, sorted(c_h))

    def test_gaussian_estimate(self):
        """Test the Gaussian coherence estimate for large displacement."""
        table = FigureService.run("fig4", overrides={"r": [0.25, 0.5], "R": [8.0, 10.0]})
        for row in table.rows:
            estimate = row.extras["gaussian_estimate"]
            self.assertLess(abs(row.report.c_h - estimate), 0.05 * estimate)

    def test_invalid_rows_carry_a_reason(self):
        """Test that a row beyond the dimension ceiling is kept with a reason."""
        table = FigureService.run("fig7", overrides={"n0": [0], "alpha": [1.0, 60.0]})
        self.assertEqual(len(table.rows), 2)
        self.assertTrue(table.rows[0].is_valid)
        self.assertFalse(table.rows[1].is_valid)
        self.assertTrue(table.rows[1].reason.startswith("truncation_error"))
        self.assertEqual(table.metadata["invalid_rows"], 1)

        rows = csv_body(table.to_csv())
        self.assertEqual(rows[0].split(",")[-1], "reason")
        self.assertIn("truncation_error", rows[2])

    def test_csv_is_deterministic(self):
        """Test that two runs give identical bytes."""
        args = ("figure", "fig5", "--override", "R=[1.0]", "--override", "r=[0.0,0.5]")
        first = run_command(*args)
        self.assertEqual(first, run_command(*args))
        self.assertTrue(first.startswith("# library: "))
        self.assertEqual(len(csv_body(first)), 3)

    def test_json_format(self):
        """Test the JSON rendering of a sweep."""
        document = json.loads(
            run_command("figure", "fig3", "--override", "m=[24,25]", "--format", "json")
        )
        self.assertEqual(document["family"], "RotatedNumber")
        self.assertEqual([row["m"] for row in document["rows"]], [24, 25])

    def test_unknown_figure_is_a_usage_error(self):
        """Test that an unknown id is rejected by the parser."""
        with self.assertRaises(CommandError) as context:
            run_command("figure", "fig9")
        self.assertEqual(context.exception.returncode, 1)

    def test_bad_override(self):
        """Test override validation."""
        with self.assertRaises(CommandError) as context:
            run_command("figure", "fig3", "--override", "NT")
        self.assertEqual(context.exception.returncode, 1)

        with self.assertRaises(CommandError) as context:
            run_command("figure", "fig3", "--override", "q=[1]")
        self.assertEqual(context.exception.returncode, 2)

        with self.assertRaises(InvariantError):
            FigureService.run("fig3", overrides={"NT": [50]})


class SweepTableTest(SimpleTestCase):
    """Test CSV rendering of sweep tables."""

    def test_float_format_and_metadata(self):
        """Test 17 significant digits and the comment header."""
        table = SweepTable(
            family="Test",
            parameter_columns=["x"],
            rows=[SweepRow(parameters={"x": 0.1}, reason="skipped")],
            metadata={"figure": "test"},
        )
        text = table.to_csv()
        self.assertTrue(text.startswith('# figure: "test"\n'))
        self.assertIn("0.10000000000000001", text)
        self.assertEqual(table.records()[0]["c_h"], None)

        header, row = csv_body(text)
        self.assertEqual(header.split(","), table.columns)
        cells = dict(zip(table.columns, row.split(",")))
        self.assertEqual(cells["c_h"], "")
        self.assertEqual(cells["reason"], "skipped")


class VerificationTest(SimpleTestCase):
    """Test the verification suites."""

    def test_suites_pass(self):
        """Test that every suite passes on a short seeded run."""
        for suite in ("pythagoras", "bounds", "oracles", "infinite"):
            report = VerificationService.run(suite=suite, seed=7, trials=5)
            self.assertTrue(report.passed, report.failures)
            self.assertTrue(all(counter.total > 0 for counter in report.counters.values()))

    def test_trials_per_dimension(self):
        """Test that every random-state dimension gets the full trial count."""
        report = VerificationService.run(suite="pythagoras", seed=2, trials=4)
        self.assertEqual(report.dimension_trials["pythagoras"], {dim: 4 for dim in RANDOM_SUITE_DIMS})
        self.assertEqual(report.counters["pythagoras_h"].total, 4 * len(RANDOM_SUITE_DIMS))

        everything = VerificationService.run(seed=2, trials=2)
        self.assertEqual(set(everything.dimension_trials), {"pythagoras", "bounds", "infinite"})
        for per_dim in everything.dimension_trials.values():
            self.assertEqual(per_dim, {dim: 2 for dim in RANDOM_SUITE_DIMS})

    def test_deterministic(self):
        """Test that a seed fixes the report."""
        first = VerificationService.run(suite="bounds", seed=3, trials=5).to_csv()
        second = VerificationService.run(suite="bounds", seed=3, trials=5).to_csv()
        self.assertEqual(first, second)

    def test_naive_root_fails_pythagoras_suite(self):
        """Test that the unfixed principal root is caught on real states."""
        report = VerificationService.run(suite="pythagoras", seed=11, trials=10, sqrt_fn=naive_sqrt)
        self.assertFalse(report.passed)
        self.assertGreater(report.counters["coherence_forms"].failed, 0)
        self.assertGreater(report.counters["sqrt_purity"].failed, 0)

    def test_heavy_tail_property(self):
        """Test that the infinite suite classifies the inverse-square tail."""
        report = VerificationService.run(suite="infinite", seed=1, trials=1)
        self.assertEqual(report.counters["heavy_tail_diverges"].passed, 1)

    def test_bad_arguments(self):
        """Test suite and trial validation."""
        with self.assertRaises(InvariantError):
            VerificationService.run(suite="everything")
        with self.assertRaises(InvariantError):
            VerificationService.run(trials=0)

    def test_command_output(self):
        """Test the verify command on a short run."""
        output = run_command("verify", "--suite", "oracles", "--trials", "3", "--seed", "5")
        self.assertIn("# verdict: pass", output)
        self.assertIn("beam_splitter_oracle,3,0", output)
        self.assertEqual(
            output, run_command("verify", "--suite", "oracles", "--trials", "3", "--seed", "5")
        )

    def test_command_exit_code_on_failure(self):
        """Test that a failed suite exits with the verification code."""
        failing = VerificationReport(suite="bounds", seed=1, trials=1)
        failing.record("report_invariants", False, "broken")
        with mock.patch(
            "apps.reports.management.commands.verify.VerificationService.run", return_value=failing
        ):
            with self.assertRaises(CommandError) as context:
                run_command("verify", "--suite", "bounds", "--trials", "1")
        self.assertEqual(context.exception.returncode, 4)


class CounterexampleCommandTest(SimpleTestCase):
    """Test the counterexample command."""

    def test_default_qubit(self):
        """Test the printed-prefactor violation for (0, 0, 0.5)."""
        document = json.loads(run_command("counterexample"))
        report = document["report"]
        self.assertEqual(document["bloch"], [0.0, 0.0, 0.5])
        self.assertTrue(report["violates"])
        c = math.sqrt(math.pi / 2)
        expected = abs((c - 1 / math.sqrt(2)) * (math.sqrt(0.75) + 0.5 - 2 * c))
        self.assertAlmostEqual(report["violation"], expected, places=10)
        self.assertLessEqual(report["stability"], 1e-8)

    def test_maximally_mixed_unit_prefactor(self):
        """Test that s = 0 gives no violation with the unit prefactor."""
        document = json.loads(
            run_command("counterexample", "--bloch", "0", "0", "0", "--prefactor", "unit")
        )
        self.assertAlmostEqual(document["report"]["violation"], 0.0, places=12)
        self.assertFalse(document["report"]["violates"])

    def test_csv_format(self):
        """Test the single-row CSV output."""
        output = run_command("counterexample", "--format", "csv", "--nodes", "32")
        header, values = output.strip().splitlines()
        self.assertIn("rho_d_off_diagonal_mass", header.split(","))
        self.assertEqual(len(header.split(",")), len(values.split(",")))

    def test_pure_state_is_a_numerical_error(self):
        """Test that a stalled quadrature exits with the numerical code."""
        with self.assertRaises(CommandError) as context:
            run_command("counterexample", "--bloch", "1", "0", "0")
        self.assertEqual(context.exception.returncode, 3)

    def test_outside_ball_is_a_validation_error(self):
        """Test that |s| > 1 exits with the validation code."""
        with self.assertRaises(CommandError) as context:
            run_command("counterexample", "--bloch", "1", "1", "0")
        self.assertEqual(context.exception.returncode, 2)
