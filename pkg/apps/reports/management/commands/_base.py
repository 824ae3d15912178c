"""
Shared plumbing for the lab management commands.
"""

import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from django.core.management.base import BaseCommand, CommandError
from loguru import logger

from apps.hellinger.types import Tolerances
from apps.reports.types import OutputFormat
from apps.states.types import TruncationConfig
from apps.utils.constants import EXIT_CODES
from apps.utils.exceptions import CoherenceLabError, format_error_json


class LabCommand(BaseCommand):
    """
    Base class for the lab commands.

    Argument errors exit with the usage code, lab errors with their own
    exit code after the JSON error payload has been written to stderr.
    """

    requires_system_checks = []
    default_format = OutputFormat.CSV

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # raise instead of exiting so run_from_argv owns the exit code
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            self.stderr.write(str(e))
            sys.exit(e.returncode or EXIT_CODES["USAGE"])

    def add_output_arguments(self, parser, formats=None):
        parser.add_argument("--out", type=str, default=None, help="Write output to this path instead of stdout")
        parser.add_argument(
            "--format",
            type=str,
            choices=formats or OutputFormat.values,
            default=self.default_format,
            help="Output format",
        )

    def add_truncation_arguments(self, parser):
        parser.add_argument("--trunc-dim", type=int, default=None, help="Starting Fock cutoff")
        parser.add_argument("--tail-tol", type=float, default=None, help="Tail-mass tolerance")

    def tolerances(self, options) -> Tolerances:
        return Tolerances.from_settings(tail_mass_tol=options.get("tail_tol"))

    def truncation(self, options, base: Optional[TruncationConfig] = None) -> TruncationConfig:
        """Apply --trunc-dim and --tail-tol on top of a truncation config."""
        config = base or TruncationConfig()
        if options.get("trunc_dim") is not None:
            if options["trunc_dim"] < 1:
                raise CommandError("Error: --trunc-dim must be positive.", returncode=EXIT_CODES["USAGE"])
            config = replace(config, dim=options["trunc_dim"])
        if options.get("tail_tol") is not None:
            config = replace(config, tail_mass_tol=options["tail_tol"])
        return config

    def write_output(self, text: str, out: Optional[str] = None) -> None:
        if not text.endswith("\n"):
            text += "\n"
        if out:
            Path(out).write_text(text, encoding="utf-8")
            logger.info(f"Wrote {len(text)} bytes to {out}")
        else:
            self.stdout.write(text, ending="")

    def handle(self, *args, **options):
        try:
            self.run(*args, **options)
        except CoherenceLabError as e:
            self.stderr.write(format_error_json(e))
            raise CommandError(e.detail, returncode=e.exit_code) from e

    def run(self, *args, **options):
        raise NotImplementedError("Lab commands implement run().")
