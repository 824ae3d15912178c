"""
Seeded verification suites.
"""

from apps.reports.management.commands._base import LabCommand
from apps.reports.serializers.report_serializer import (
    VerificationReportSerializer, render_json)
from apps.reports.types import OutputFormat, VerifySuite
from apps.reports.verification import VerificationService
from apps.utils.constants import DEFAULT_SEED, DEFAULT_TRIALS
from apps.utils.exceptions import VerificationFailedError


class Command(LabCommand):
    help = "Run the property suites and print per-property pass/fail counters"

    def add_arguments(self, parser):
        parser.add_argument("--suite", type=str, choices=VerifySuite.values, default=VerifySuite.ALL)
        parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
        parser.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
        self.add_output_arguments(parser)

    def run(self, *args, **options):
        report = VerificationService.run(
            suite=str(options["suite"]),
            seed=options["seed"],
            trials=options["trials"],
        )

        if options["format"] == OutputFormat.JSON:
            text = render_json(VerificationReportSerializer(report).data)
        else:
            text = report.to_csv()
        self.write_output(text, options["out"])

        if not report.passed:
            for message in report.failures:
                self.stderr.write(message)
            raise VerificationFailedError(
                f"Suite {report.suite} failed.",
                failed={name: c.failed for name, c in report.counters.items() if c.failed},
            )
