"""
Parameter sweeps behind the coherence figures.

Each figure is a FigureDefinition: default parameter grids, how a grid
expands into rows, the StateSpec of a row and the extra columns it adds.
Rows are evaluated on a thread pool and kept in parameter order; a row
whose state cannot be built or whose report breaks an invariant is kept
with a reason instead of aborting the sweep.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from django.conf import settings
from loguru import logger

from apps.hellinger.types import Tolerances, resolve_tolerances
from apps.infinite.services import InfiniteService
from apps.quantifiers.services import QuantifierService
from apps.quantifiers.types import QuantifierReport
from apps.reports.services import ReportService
from apps.reports.types import FigureId, SweepRow, SweepTable
from apps.states.services import StateService
from apps.states.types import (BuiltState, DisplacedNumber, RotatedNumber,
                               SqueezedCoherent, StateSpec, StateVariant,
                               TruncationConfig)
from apps.utils.constants import ASSUMPTIONS, LIBRARY_NAME, LIBRARY_VERSION
from apps.utils.exceptions import CoherenceLabError, InvariantError


def grid(start: float, stop: float, step: float) -> List[float]:
    """Inclusive uniform grid, rounded so 0.35 prints as 0.35."""
    count = int(round((stop - start) / step)) + 1
    return [round(start + step * k, 10) for k in range(count)]


@dataclass(frozen=True)
class FigureDefinition:
    figure_id: str
    family: str
    parameter_columns: List[str]
    defaults: Dict[str, Any]
    points: Callable[[Dict[str, Any]], List[Dict[str, Any]]]
    spec: Callable[[Dict[str, Any], TruncationConfig], StateSpec]
    extra_columns: List[str] = field(default_factory=list)
    extras: Optional[Callable[[Dict[str, Any], BuiltState, QuantifierReport], Dict]] = None
    summary: Optional[Callable[[SweepTable], Dict[str, Any]]] = None


def _beam_splitter_spec(point, truncation):
    return StateSpec(StateVariant.ROTATED_NUMBER, RotatedNumber(n=point["n"], m=point["m"]))


def _squeezed_spec(point, truncation):
    return StateSpec(
        StateVariant.SQUEEZED_COHERENT,
        SqueezedCoherent(R=point["R"], r=point["r"]),
        truncation,
    )


def _closed_form_extras(point, built, report):
    return {"closed_form_c_h": QuantifierService.coherence_pure(built.state.probabilities)}


def _variance_extras(point, built, report):
    R, r = point["R"], point["r"]
    _, closed_form = StateService.squeezed_coherent_moments(R, r)
    estimate = None
    if built.number_variance and built.number_variance > 0:
        estimate = InfiniteService.gaussian_coherence_estimate(built.number_variance)
    return {
        "number_variance": built.number_variance,
        "variance_closed_form": closed_form,
        "variance_rough": InfiniteService.rough_number_variance(built.mean_photons, r),
        "gaussian_estimate": estimate,
    }


def _fig2_points(params):
    points = []
    for total in sorted(params["NT"]):
        if total < 2 or total % 2:
            raise InvariantError("Twin inputs need an even total photon number >= 2.", NT=total)
        points.append({"NT": total, "input": "su2", "n": total, "m": 0})
        points.append({"NT": total, "input": "twin", "n": total // 2, "m": total // 2})
    return points


def _fig2_summary(table):
    by_total = {}
    for row in table.rows:
        if row.is_valid:
            by_total.setdefault(row.parameters["NT"], {})[row.parameters["input"]] = row.report.c_h
    crossover = next(
        (
            total
            for total in sorted(by_total)
            if len(by_total[total]) == 2 and by_total[total]["twin"] > by_total[total]["su2"]
        ),
        None,
    )
    return {"crossover_nt": crossover}


def _fig3_points(params):
    total = int(params["NT"])
    points = []
    for m in sorted(params["m"]):
        if not 0 <= m <= total:
            raise InvariantError("Need 0 <= m <= NT.", m=m, NT=total)
        points.append({"NT": total, "n": total - m, "m": m})
    return points


def _fig3_summary(table):
    values = [row.report.c_h if row.is_valid else None for row in table.rows]
    minima = [
        table.rows[k].parameters["m"]
        for k in range(1, len(values) - 1)
        if None not in values[k - 1 : k + 2]
        and values[k] < values[k - 1]
        and values[k] < values[k + 1]
    ]
    return {"local_minima_m": minima}


def _fig4_points(params):
    return [{"r": r, "R": R} for r in sorted(params["r"]) for R in sorted(params["R"])]


def _fig5_points(params):
    return [{"R": R, "r": r} for R in sorted(params["R"]) for r in sorted(params["r"])]


FIG6_SPLITS = {
    "amplitude": StateService.amplitude_split,
    "energy": StateService.energy_split,
}


def _fig6_points(params):
    split = FIG6_SPLITS.get(params["split"])
    if split is None:
        raise InvariantError(f"Unknown split {params['split']!r}.", allowed=sorted(FIG6_SPLITS))
    points = []
    for mean in sorted(params["nbar"]):
        for fraction in sorted(params["f"]):
            R, r = split(mean, fraction)
            energy_fraction = math.sinh(r) ** 2 / mean if mean > 0 else 0.0
            points.append(
                {"nbar": mean, "f": fraction, "energy_fraction": energy_fraction, "R": R, "r": r}
            )
    return points


def _fig6_summary(table):
    best = {}
    for row in table.rows:
        if row.is_valid:
            mean = row.parameters["nbar"]
            if mean not in best or row.report.c_h > best[mean].report.c_h:
                best[mean] = row
    return {
        "argmax_f": {str(mean): best[mean].parameters["f"] for mean in sorted(best)},
        "argmax_energy_fraction": {
            str(mean): best[mean].parameters["energy_fraction"] for mean in sorted(best)
        },
    }


def _fig7_points(params):
    return [
        {"n0": int(n0), "alpha": alpha}
        for n0 in sorted(params["n0"])
        for alpha in sorted(params["alpha"])
    ]


def _fig7_spec(point, truncation):
    return StateSpec(
        StateVariant.DISPLACED_NUMBER,
        DisplacedNumber(alpha=complex(point["alpha"]), n0=point["n0"]),
        truncation,
    )


def _fig7_extras(point, built, report):
    return {"number_variance": built.number_variance}


VARIANCE_COLUMNS = ["number_variance", "variance_closed_form", "variance_rough", "gaussian_estimate"]

FIGURES = {
    FigureId.FIG2.value: FigureDefinition(
        figure_id=FigureId.FIG2.value,
        family=StateVariant.ROTATED_NUMBER.value,
        parameter_columns=["NT", "input", "n", "m"],
        defaults={"NT": list(range(2, 61, 2))},
        points=_fig2_points,
        spec=_beam_splitter_spec,
        extra_columns=["closed_form_c_h"],
        extras=_closed_form_extras,
        summary=_fig2_summary,
    ),
    FigureId.FIG3.value: FigureDefinition(
        figure_id=FigureId.FIG3.value,
        family=StateVariant.ROTATED_NUMBER.value,
        parameter_columns=["NT", "n", "m"],
        defaults={"NT": 50, "m": list(range(0, 51))},
        points=_fig3_points,
        spec=_beam_splitter_spec,
        extra_columns=["closed_form_c_h"],
        extras=_closed_form_extras,
        summary=_fig3_summary,
    ),
    FigureId.FIG4.value: FigureDefinition(
        figure_id=FigureId.FIG4.value,
        family=StateVariant.SQUEEZED_COHERENT.value,
        parameter_columns=["r", "R"],
        defaults={"R": grid(0.0, 10.0, 0.25), "r": [0.0, 0.25, 0.5, 0.75, 1.0]},
        points=_fig4_points,
        spec=_squeezed_spec,
        extra_columns=VARIANCE_COLUMNS,
        extras=_variance_extras,
    ),
    FigureId.FIG5.value: FigureDefinition(
        figure_id=FigureId.FIG5.value,
        family=StateVariant.SQUEEZED_COHERENT.value,
        parameter_columns=["R", "r"],
        defaults={"r": grid(0.0, 1.5, 0.05), "R": [1.0, 2.0, 4.0, 6.0]},
        points=_fig5_points,
        spec=_squeezed_spec,
        extra_columns=VARIANCE_COLUMNS,
        extras=_variance_extras,
    ),
    FigureId.FIG6.value: FigureDefinition(
        figure_id=FigureId.FIG6.value,
        family=StateVariant.SQUEEZED_COHERENT.value,
        parameter_columns=["nbar", "f", "energy_fraction", "R", "r"],
        defaults={"nbar": [16.0, 20.0, 30.0, 40.0], "f": grid(0.0, 1.0, 0.01), "split": "amplitude"},
        points=_fig6_points,
        spec=_squeezed_spec,
        extra_columns=VARIANCE_COLUMNS,
        extras=_variance_extras,
        summary=_fig6_summary,
    ),
    FigureId.FIG7.value: FigureDefinition(
        figure_id=FigureId.FIG7.value,
        family=StateVariant.DISPLACED_NUMBER.value,
        parameter_columns=["n0", "alpha"],
        defaults={"n0": [0, 1, 2, 4], "alpha": grid(0.0, 6.0, 0.25)},
        points=_fig7_points,
        spec=_fig7_spec,
        extra_columns=["number_variance"],
        extras=_fig7_extras,
    ),
}


class FigureService:
    """Service class for figure sweeps."""

    @staticmethod
    def resolve_parameters(definition: FigureDefinition, overrides: Optional[Dict[str, Any]]) -> Dict:
        """
        Merge overrides into the default grids.

        Raises:
            InvariantError: If an override names an unknown parameter
                or gives a list for a single-valued one
        """
        params = dict(definition.defaults)
        for key, value in (overrides or {}).items():
            if key not in params:
                raise InvariantError(
                    f"Unknown parameter {key!r} for {definition.figure_id}.",
                    allowed=sorted(params),
                )
            if isinstance(params[key], list) and not isinstance(value, list):
                value = [value]
            elif not isinstance(params[key], list) and isinstance(value, list):
                raise InvariantError(f"Parameter {key!r} takes a single value.", value=value)
            params[key] = value
        return params

    @staticmethod
    def run(
        figure_id: str,
        overrides: Optional[Dict[str, Any]] = None,
        tolerances: Optional[Tolerances] = None,
        truncation: Optional[TruncationConfig] = None,
    ) -> SweepTable:
        """
        Run one figure sweep.

        Args:
            figure_id: One of fig2..fig7
            overrides: Replacement parameter grids
            tolerances: Tolerances for states and reports
            truncation: Fock truncation for every row

        Returns:
            SweepTable in parameter order

        Raises:
            InvariantError: If the id or an override is invalid
        """
        if figure_id not in FIGURES:
            raise InvariantError(f"Unknown figure {figure_id!r}.", allowed=sorted(FIGURES))
        definition = FIGURES[figure_id]
        tolerances = resolve_tolerances(tolerances)
        truncation = truncation or TruncationConfig()
        params = FigureService.resolve_parameters(definition, overrides)
        points = definition.points(params)

        def evaluate(point):
            return FigureService.evaluate_row(definition, point, tolerances, truncation)

        with ThreadPoolExecutor(max_workers=settings.COHERENCE_LAB["THREADS"]) as pool:
            rows = list(pool.map(evaluate, points))

        table = SweepTable(
            family=definition.family,
            parameter_columns=definition.parameter_columns,
            extra_columns=definition.extra_columns,
            rows=rows,
            metadata={
                "library": LIBRARY_NAME,
                "version": LIBRARY_VERSION,
                "figure": definition.figure_id,
                "family": definition.family,
                "parameters": params,
                "tolerances": tolerances.as_dict(),
                "truncation": truncation.as_dict(),
                "assumptions": ASSUMPTIONS,
            },
        )
        if definition.summary:
            table.metadata.update(definition.summary(table))
        table.metadata["invalid_rows"] = len(table.invalid_rows)

        logger.info(
            f"Figure {definition.figure_id}: {len(rows)} rows, {len(table.invalid_rows)} invalid"
        )
        return table

    @staticmethod
    def evaluate_row(
        definition: FigureDefinition,
        point: Dict[str, Any],
        tolerances: Tolerances,
        truncation: TruncationConfig,
    ) -> SweepRow:
        try:
            built = StateService.build(definition.spec(point, truncation), tolerances)
            report = ReportService.quantify(built, tolerances)
            extras = definition.extras(point, built, report) if definition.extras else {}
        except CoherenceLabError as e:
            logger.warning(f"{definition.figure_id} row {point} invalid: {e.detail}")
            return SweepRow(parameters=point, reason=f"{e.default_code}: {e.detail}")

        violations = report.invariant_violations(tolerances)
        non_finite = [key for key, value in extras.items() if value is not None and not math.isfinite(value)]
        if violations or non_finite:
            reason = "invariants: " + ",".join(violations + non_finite)
            logger.warning(f"{definition.figure_id} row {point} invalid: {reason}")
            return SweepRow(parameters=point, reason=reason)

        return SweepRow(parameters=point, report=report, extras=extras)
