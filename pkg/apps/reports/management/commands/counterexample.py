"""
Phase-basis counterexample to the Pythagoras split.
"""

from apps.overcomplete.services import PhaseBasisService
from apps.overcomplete.types import PhaseBasisConfig, SqrtPrefactor
from apps.reports.management.commands._base import LabCommand
from apps.reports.serializers.report_serializer import (
    OrthogonalityReportSerializer, envelope, render_json)
from apps.reports.types import OutputFormat, records_to_csv
from apps.states.services import StateService


class Command(LabCommand):
    help = "Evaluate the phase-basis orthogonality violation for a qubit"
    default_format = OutputFormat.JSON

    def add_arguments(self, parser):
        parser.add_argument(
            "--bloch",
            type=float,
            nargs=3,
            default=[0.0, 0.0, 0.5],
            metavar=("SX", "SY", "SZ"),
            help="Bloch vector of the qubit",
        )
        parser.add_argument("--nodes", type=int, default=None, help="Starting quadrature node count")
        parser.add_argument(
            "--prefactor",
            type=str,
            choices=SqrtPrefactor.values,
            default=SqrtPrefactor.PRINTED,
            help="Normalization of the continuous square root",
        )
        self.add_output_arguments(parser)

    def run(self, *args, **options):
        bloch = tuple(options["bloch"])
        rho = StateService.qubit_from_bloch(bloch)
        config = PhaseBasisConfig(2, quadrature_nodes=options["nodes"], prefactor=str(options["prefactor"]))
        report = PhaseBasisService.orthogonality_violation(rho, config)

        if options["format"] == OutputFormat.JSON:
            text = render_json(
                envelope(bloch=list(bloch), report=OrthogonalityReportSerializer(report).data)
            )
        else:
            values = {"s_x": bloch[0], "s_y": bloch[1], "s_z": bloch[2], **report.as_dict()}
            text = records_to_csv([values], list(values))
        self.write_output(text, options["out"])
