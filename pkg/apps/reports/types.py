"""
Sweep tables, verification reports and the choices the CLI accepts.
"""

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd
from django.db import models

from apps.quantifiers.types import QuantifierReport
from apps.utils.constants import (CSV_COMMENT_PREFIX, CSV_FLOAT_FORMAT,
                                  FIGURE_IDS, INVALID_REASON_COLUMN,
                                  OUTPUT_FORMATS, VERIFY_SUITES)


class FigureId(models.TextChoices):
    FIG2 = FIGURE_IDS["FIG2"], "Beam-splitter inputs against total photon number"
    FIG3 = FIGURE_IDS["FIG3"], "Beam-splitter inputs at fixed total photon number"
    FIG4 = FIGURE_IDS["FIG4"], "Squeezed coherent states against displacement"
    FIG5 = FIGURE_IDS["FIG5"], "Squeezed coherent states against squeezing"
    FIG6 = FIGURE_IDS["FIG6"], "Squeezed coherent states at fixed energy"
    FIG7 = FIGURE_IDS["FIG7"], "Displaced number states"


class VerifySuite(models.TextChoices):
    ALL = VERIFY_SUITES["ALL"], "All suites"
    PYTHAGORAS = VERIFY_SUITES["PYTHAGORAS"], "Pythagoras identities"
    BOUNDS = VERIFY_SUITES["BOUNDS"], "Bounds and closed forms"
    ORACLES = VERIFY_SUITES["ORACLES"], "State constructions against closed forms"
    INFINITE = VERIFY_SUITES["INFINITE"], "Infinite-dimensional limit"


class OutputFormat(models.TextChoices):
    CSV = OUTPUT_FORMATS["CSV"], "CSV"
    JSON = OUTPUT_FORMATS["JSON"], "JSON"


REPORT_COLUMNS = [
    "dim",
    "c_h",
    "s_h",
    "nc_h",
    "c_hs",
    "s_hs",
    "nc_hs",
    "pythagoras_residual_h",
    "pythagoras_residual_hs",
    "x_sum",
    "renyi_half",
    "sqrt_purity",
    "duality_gap",
    "mean_photons",
    "nc_h_infinite",
]


def records_to_csv(
    records: List[Dict[str, Any]], columns: List[str], metadata: Optional[Dict[str, Any]] = None
) -> str:
    """
    CSV text of a record list: '# key: value' metadata lines, then the table.

    Floats keep 17 significant digits; None is written as an empty cell.
    """
    buffer = io.StringIO()
    for key, value in (metadata or {}).items():
        buffer.write(f"{CSV_COMMENT_PREFIX}{key}: {json.dumps(value, sort_keys=True)}\n")
    frame = pd.DataFrame.from_records(records, columns=columns)
    frame.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


@dataclass
class SweepRow:
    """One parameter point; report is None when the row is invalid."""

    parameters: Dict[str, Any]
    report: Optional[QuantifierReport] = None
    extras: Dict[str, float] = field(default_factory=dict)
    reason: Optional[str] = None

    @property
    def is_valid(self) -> bool:
        return self.report is not None and self.reason is None

    def values(self) -> Dict[str, Any]:
        data = dict(self.parameters)
        report = self.report.as_dict() if self.report is not None else {}
        for column in REPORT_COLUMNS:
            data[column] = report.get(column)
        data["trunc_dim"] = (report.get("truncation") or {}).get("dim")
        data.update(self.extras)
        data[INVALID_REASON_COLUMN] = self.reason
        return data


@dataclass
class SweepTable:
    """
    Rows of a figure sweep in parameter order.

    CSV output starts with '# key: value' metadata lines, then a header of
    parameter columns, report columns, extra columns and the reason column.
    """

    family: str
    parameter_columns: List[str]
    extra_columns: List[str] = field(default_factory=list)
    rows: List[SweepRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def columns(self) -> List[str]:
        return (
            self.parameter_columns
            + REPORT_COLUMNS
            + ["trunc_dim"]
            + self.extra_columns
            + [INVALID_REASON_COLUMN]
        )

    @property
    def invalid_rows(self) -> List[SweepRow]:
        return [row for row in self.rows if not row.is_valid]

    def column(self, name: str) -> List[Any]:
        return [row.values().get(name) for row in self.rows]

    def records(self) -> List[Dict[str, Any]]:
        """Rows as dicts; non-finite numbers become None."""
        records = []
        for row in self.rows:
            values = row.values()
            records.append(
                {
                    name: (
                        None
                        if isinstance(values.get(name), float) and not math.isfinite(values[name])
                        else values.get(name)
                    )
                    for name in self.columns
                }
            )
        return records

    def to_csv(self) -> str:
        return records_to_csv(self.records(), self.columns, self.metadata)


@dataclass
class PropertyCounter:
    passed: int = 0
    failed: int = 0

    @property
    def total(self) -> int:
        return self.passed + self.failed


@dataclass
class VerificationReport:
    """
    Per-property pass/fail counters of one verify run.

    dimension_trials counts the random states drawn per suite and dimension.
    """

    suite: str
    seed: int
    trials: int
    counters: Dict[str, PropertyCounter] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    dimension_trials: Dict[str, Dict[int, int]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(counter.failed == 0 for counter in self.counters.values())

    def record(self, name: str, ok: bool, message: Optional[str] = None) -> None:
        counter = self.counters.setdefault(name, PropertyCounter())
        if ok:
            counter.passed += 1
        else:
            counter.failed += 1
            if message:
                self.failures.append(f"{name}: {message}")

    def count_dimension(self, suite: str, dim: int) -> None:
        per_dim = self.dimension_trials.setdefault(suite, {})
        per_dim[dim] = per_dim.get(dim, 0) + 1

    def merge(self, other: "VerificationReport") -> None:
        for name, counter in other.counters.items():
            mine = self.counters.setdefault(name, PropertyCounter())
            mine.passed += counter.passed
            mine.failed += counter.failed
        for suite, per_dim in other.dimension_trials.items():
            counts = self.dimension_trials.setdefault(suite, {})
            for dim, count in per_dim.items():
                counts[dim] = counts.get(dim, 0) + count
        self.failures.extend(other.failures)

    def to_csv(self) -> str:
        header = "".join(
            f"{CSV_COMMENT_PREFIX}{key}: {value}\n"
            for key, value in (
                ("suite", self.suite),
                ("seed", self.seed),
                ("trials", self.trials),
                ("verdict", "pass" if self.passed else "fail"),
                ("dimension_trials", json.dumps(self.dimension_trials, sort_keys=True)),
            )
        )
        records = [
            {"property": name, "passed": counter.passed, "failed": counter.failed}
            for name, counter in sorted(self.counters.items())
        ]
        return header + records_to_csv(records, ["property", "passed", "failed"])
