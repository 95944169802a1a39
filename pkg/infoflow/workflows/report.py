# infoflow/workflows/report.py
# This file contains the comparison report emitted by the experiment workflows and the CSV writer
# Purpose: Collect per-method, per-label result rows, re-check their feasibility and objective ordering, and write them as deterministic CSV. This is NOT for computing the results (see the *_workflow.py modules).

"""
Comparison reports: proposed allocation versus the max-flow baseline.
"""
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Union

import yaml

from ..network.graph import Network, RateAssignment
from ..utils.logger import get_logger
from ..utils.validation import OutputError, ReportConsistencyError

logger = get_logger("workflow.report")

METHODS = ("max_flow", "proposed")
DOMINANCE_TOL = 1e-9


@dataclass
class ReportRow:
    """Result of one method on one experiment label (an alpha or a setting name)."""
    method: str
    label: Any
    rates: RateAssignment
    objective_relaxed: float
    objective_integral: float
    metrics: Dict[str, Any] = field(default_factory=dict)

    @property
    def total_bits(self) -> int:
        return int(round(sum(self.rates.sensor_rates.values())))

    @property
    def sensor_rates(self) -> Dict[Any, int]:
        return {s: int(round(r)) for s, r in self.rates.sensor_rates.items()}


def format_value(value: Any) -> str:
    """Render a cell so that identical runs give identical bytes."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    if isinstance(value, Mapping):
        return ";".join(f"{k}={format_value(v)}" for k, v in value.items())
    return str(value)


def write_csv(path: Union[str, Path], fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    """
    Write rows with a header.

    Raises:
        OutputError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: format_value(row.get(k, "")) for k in fieldnames})
    except OSError as e:
        raise OutputError(f"Could not write '{path}': {e}")
    logger.debug(f"💾 Wrote {path}")
    return path


def write_yaml(path: Union[str, Path], data: Mapping[str, Any]) -> Path:
    """
    Write a structured report as YAML.

    Raises:
        OutputError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(dict(data), f, sort_keys=False)
    except OSError as e:
        raise OutputError(f"Could not write '{path}': {e}")
    logger.debug(f"💾 Wrote {path}")
    return path


class ComparisonReport:
    """
    Rows for every (method, label) pair of one experiment.

    Args:
        task: Experiment task name
        network: Network every rate vector must be feasible on
        label_column: CSV column holding the label ('alpha' or 'setting')
        metric_columns: Task metric columns, in CSV order
        labels: Labels in config order (fixes the row order)
        extra_columns: Columns after the objectives
        dominance_tol: Slack allowed when the relaxed objective is compared with
            max flow; a Frank-Wolfe objective is only certified to the solver tol
    """

    def __init__(
        self,
        task: str,
        network: Network,
        label_column: str,
        metric_columns: Sequence[str],
        labels: Sequence[Any],
        extra_columns: Sequence[str] = (),
        dominance_tol: float = DOMINANCE_TOL,
    ):
        self.task = task
        self.network = network
        self.label_column = label_column
        self.metric_columns = list(metric_columns)
        self.extra_columns = list(extra_columns)
        self.labels = list(labels)
        self.dominance_tol = max(DOMINANCE_TOL, dominance_tol)
        self._rows: Dict[tuple, ReportRow] = {}

    @property
    def columns(self) -> List[str]:
        return (
            ["method", self.label_column, "total_bits"]
            + self.metric_columns
            + ["objective_relaxed", "objective_integral"]
            + self.extra_columns
            + ["sensor_rates"]
        )

    def add_row(self, row: ReportRow) -> None:
        if row.method not in METHODS:
            raise ValueError(f"Unknown method '{row.method}'; expected one of {METHODS}")
        if row.label not in self.labels:
            raise ValueError(f"Unknown label {row.label!r}; expected one of {self.labels}")
        self._rows[(row.method, row.label)] = row

    @property
    def rows(self) -> List[ReportRow]:
        """Rows ordered by method, then label in config order."""
        return [
            self._rows[(method, label)]
            for method in METHODS
            for label in self.labels
            if (method, label) in self._rows
        ]

    def row(self, method: str, label: Any) -> ReportRow:
        return self._rows[(method, label)]

    def check(self) -> List[str]:
        """
        Re-check every row before emission.

        Returns:
            Violations of rate feasibility or relaxed-objective dominance
        """
        violations = []
        for row in self.rows:
            for problem in row.rates.check(self.network):
                violations.append(f"{row.method}/{row.label}: {problem}")
            if not row.rates.is_integral:
                violations.append(f"{row.method}/{row.label}: emitted rates are not integral")

        for label in self.labels:
            if ("proposed", label) not in self._rows or ("max_flow", label) not in self._rows:
                continue
            proposed, baseline = self._rows[("proposed", label)], self._rows[("max_flow", label)]
            if proposed.objective_relaxed < baseline.objective_integral - self.dominance_tol:
                violations.append(
                    f"{label}: relaxed objective {proposed.objective_relaxed:.12g} is below the max-flow "
                    f"objective {baseline.objective_integral:.12g}"
                )
            if proposed.objective_integral < baseline.objective_integral - DOMINANCE_TOL:
                logger.warning(
                    f"⚠️ {label}: rounded proposed objective {proposed.objective_integral:.12g} fell below "
                    f"max flow {baseline.objective_integral:.12g}"
                )
        return violations

    def to_records(self) -> List[Dict[str, Any]]:
        records = []
        for row in self.rows:
            record = {
                "method": row.method,
                self.label_column: row.label,
                "total_bits": row.total_bits,
                "objective_relaxed": row.objective_relaxed,
                "objective_integral": row.objective_integral,
                "sensor_rates": row.sensor_rates,
            }
            record.update(row.metrics)
            records.append(record)
        return records

    def write(self, path: Union[str, Path]) -> Path:
        """
        Check and write the report as CSV.

        Raises:
            ReportConsistencyError: If a row fails the emission checks
            OutputError: If the file cannot be written
        """
        violations = self.check()
        if violations:
            raise ReportConsistencyError("Report failed consistency checks: " + "; ".join(violations))
        return write_csv(path, self.columns, self.to_records())
