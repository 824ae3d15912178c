"""
Quantify a single state.
"""

import sys
from dataclasses import replace
from pathlib import Path

from loguru import logger

from apps.reports.management.commands._base import LabCommand
from apps.reports.serializers.report_serializer import (
    QuantifierReportSerializer, envelope, render_json)
from apps.reports.services import ReportService
from apps.reports.types import OutputFormat
from apps.states.serializers.state_spec_serializer import (parse_state_spec,
                                                           state_spec_to_dict)
from apps.utils.exceptions import StateSpecError


class Command(LabCommand):
    help = "Print the full quantifier report of one state as JSON"
    default_format = OutputFormat.JSON

    def add_arguments(self, parser):
        parser.add_argument(
            "spec",
            type=str,
            help="StateSpec JSON: inline text, a file path, or '-' for stdin",
        )
        self.add_output_arguments(parser, formats=[OutputFormat.JSON])
        self.add_truncation_arguments(parser)

    def run(self, *args, **options):
        spec = parse_state_spec(self.read_spec(options["spec"]))
        spec = replace(spec, truncation=self.truncation(options, spec.truncation))
        tolerances = self.tolerances(options)

        report = ReportService.quantify_spec(spec, tolerances)
        logger.info(f"Quantified {spec.variant}: C_H={report.c_h:.6g}, NC_H={report.nc_h:.6g}")

        document = envelope(
            state=state_spec_to_dict(spec),
            report=QuantifierReportSerializer(report).data,
        )
        self.write_output(render_json(document), options["out"])

    def read_spec(self, source: str) -> str:
        if source == "-":
            return sys.stdin.read()
        if source.lstrip().startswith("{"):
            return source
        path = Path(source)
        if not path.is_file():
            raise StateSpecError("State spec is neither JSON nor a readable file.", source=source)
        return path.read_text(encoding="utf-8")
