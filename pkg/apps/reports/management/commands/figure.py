"""
Parameter sweeps behind the figures.
"""

import json

from django.core.management.base import CommandError

from apps.reports.figures import FigureService
from apps.reports.management.commands._base import LabCommand
from apps.reports.serializers.report_serializer import (SweepTableSerializer,
                                                        render_json)
from apps.reports.types import FigureId, OutputFormat
from apps.utils.constants import EXIT_CODES


class Command(LabCommand):
    help = "Run a figure sweep and print one row per parameter point"

    def add_arguments(self, parser):
        parser.add_argument("figure", type=str, choices=FigureId.values, help="Figure id")
        parser.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=JSON",
            help="Replace a parameter grid, e.g. NT=[2,4,6] or nbar=30",
        )
        self.add_output_arguments(parser)
        self.add_truncation_arguments(parser)

    def run(self, *args, **options):
        table = FigureService.run(
            options["figure"],
            overrides=self.parse_overrides(options["override"]),
            tolerances=self.tolerances(options),
            truncation=self.truncation(options),
        )

        if options["format"] == OutputFormat.JSON:
            text = render_json(SweepTableSerializer(table).data)
        else:
            text = table.to_csv()
        self.write_output(text, options["out"])

    def parse_overrides(self, items):
        overrides = {}
        for item in items:
            key, separator, value = item.partition("=")
            if not separator or not key:
                raise CommandError(f"Error: override {item!r} is not KEY=JSON.", returncode=EXIT_CODES["USAGE"])
            try:
                overrides[key.strip()] = json.loads(value)
            except json.JSONDecodeError as e:
                raise CommandError(
                    f"Error: override {key!r} has invalid JSON: {e.msg}.", returncode=EXIT_CODES["USAGE"]
                )
        return overrides
