"""
Quantifier reports for built states.
"""

from typing import Optional

from loguru import logger

from apps.hellinger.types import Tolerances, resolve_tolerances
from apps.infinite.services import InfiniteService
from apps.quantifiers.services import QuantifierService
from apps.quantifiers.types import QuantifierReport
from apps.states.services import StateService
from apps.states.types import BuiltState, StateSpec
from apps.utils.exceptions import InvariantError


class ReportService:
    """Service class for full state reports."""

    @staticmethod
    def quantify(
        built: BuiltState,
        tolerances: Optional[Tolerances] = None,
        cross_check: Optional[bool] = None,
    ) -> QuantifierReport:
        """
        Quantify a built state.

        Pure states go through the closed forms, mixed ones through the
        density-matrix path. Fock families also carry their truncation,
        photon moments and the infinite-dimensional NC_H when the sqrt-sum
        of their populations converges.
        """
        tolerances = resolve_tolerances(tolerances)
        if built.is_pure:
            report = QuantifierService.report_pure(built.state, tolerances)
        else:
            report = QuantifierService.report(built.state, tolerances, cross_check=cross_check)

        if built.is_fock_family:
            report.truncation = built.truncation.as_dict() if built.truncation else None
            report.mean_photons = built.mean_photons
            if built.number_variance is not None:
                report.extras["number_variance"] = built.number_variance
            try:
                report.nc_h_infinite = InfiniteService.nonclassicality_infinite(
                    built.state, tolerances
                )
            except InvariantError as e:
                logger.warning(f"No infinite-dimensional limit for {built.spec.variant}: {e}")

        return report

    @staticmethod
    def quantify_spec(
        spec: StateSpec,
        tolerances: Optional[Tolerances] = None,
        cross_check: Optional[bool] = None,
    ) -> QuantifierReport:
        """Build the state a StateSpec describes and quantify it."""
        built = StateService.build(spec, tolerances, cross_check)
        return ReportService.quantify(built, tolerances, cross_check)
