"""Result tables and how they are compared.

A QueryTable is the end product of an experiment: one labelled row per
query, one probability column per analysis, plus the metadata needed to
reproduce it (rollouts per regime, master seed, config hash). Serialization
is canonical, so identical inputs give byte-identical artifacts.

Comparison against a reference table is per-row and absolute. Tolerances
are supplied separately, keyed by row label, either as one number for every
column or as a per-column map; rows or columns without a tolerance are
reported as skipped rather than judged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from causalprobe.engine import Query


class TableMismatchError(Exception):
    """Raised when two tables do not describe the same rows and columns."""


@dataclass(frozen=True)
class TableRow:
    """One query and its probability per column. Derived rows (differences
    of two other rows) carry no query of their own and may be negative;
    query rows always lie in [0, 1]."""

    label: str
    values: tuple[float, ...]
    query: Query | None = None

    def to_json(self) -> dict:
        payload: dict = {"label": self.label, "values": list(self.values)}
        if self.query is not None:
            payload["query"] = self.query.to_json()
        return payload

    @classmethod
    def from_json(cls, data: dict) -> "TableRow":
        query = Query.from_json(data["query"]) if "query" in data else None
        return cls(data["label"], tuple(float(v) for v in data["values"]), query)


@dataclass(frozen=True)
class QueryTable:
    name: str
    columns: tuple[str, ...]
    rows: tuple[TableRow, ...]
    meta: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, name, columns, rows, meta=()) -> "QueryTable":
        columns = tuple(columns)
        rows = tuple(rows)
        labels = [row.label for row in rows]
        if len(set(labels)) != len(labels):
            raise TableMismatchError(f"table {name} repeats a row label")
        for row in rows:
            if len(row.values) != len(columns):
                raise TableMismatchError(
                    f"row {row.label!r} has {len(row.values)} values for {len(columns)} columns"
                )
            low = -1.0 if row.query is None else 0.0
            for v in row.values:
                if not (low <= v <= 1.0):
                    raise TableMismatchError(f"row {row.label!r} value {v} out of range")
        return cls(name, columns, rows, tuple(sorted((str(k), str(v)) for k, v in dict(meta).items())))

    def row(self, label: str) -> TableRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(f"no row {label!r} in table {self.name}")

    def value(self, label: str, column: str) -> float:
        return self.row(label).values[self.columns.index(column)]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "columns": list(self.columns),
            "rows": [row.to_json() for row in self.rows],
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, data: dict) -> "QueryTable":
        return cls.of(
            data["name"],
            data["columns"],
            [TableRow.from_json(r) for r in data["rows"]],
            data.get("meta", {}),
        )

    def to_bytes(self) -> bytes:
        """Canonical serialization: sorted keys, fixed separators, UTF-8."""
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")).encode()

    def render(self) -> str:
        """Aligned plain-text rendering, one row per query."""
        label_width = max([len("query")] + [len(row.label) for row in self.rows])
        col_width = max([7] + [len(c) for c in self.columns])
        head = "query".ljust(label_width) + "".join(
            "  " + c.rjust(col_width) for c in self.columns
        )
        rule = "-" * len(head)
        lines = [self.name, rule, head, rule]
        for row in self.rows:
            cells = "".join("  " + f"{v:.3f}".rjust(col_width) for v in row.values)
            lines.append(row.label.ljust(label_width) + cells)
        lines.append(rule)
        lines.append("  ".join(f"{k}={v}" for k, v in self.meta))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DiffEntry:
    label: str
    column: str
    actual: float
    reference: float
    tolerance: float | None

    @property
    def skipped(self) -> bool:
        return self.tolerance is None

    @property
    def passed(self) -> bool:
        return self.skipped or abs(self.actual - self.reference) <= self.tolerance

    def render(self) -> str:
        if self.skipped:
            verdict = "skip"
            bound = ""
        else:
            verdict = "pass" if self.passed else "FAIL"
            bound = f" tol {self.tolerance:.3f}"
        return (
            f"[{verdict}] {self.label} [{self.column}]: "
            f"{self.actual:.3f} vs {self.reference:.3f}{bound}"
        )


@dataclass(frozen=True)
class DiffReport:
    name: str
    entries: tuple[DiffEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> tuple[DiffEntry, ...]:
        return tuple(e for e in self.entries if not e.passed)

    def render(self) -> str:
        checked = sum(1 for e in self.entries if not e.skipped)
        failed = len(self.failures)
        lines = [e.render() for e in self.entries]
        lines.append(f"{self.name}: {checked - failed}/{checked} checks passed")
        return "\n".join(lines) + "\n"


def _tolerance_for(tolerances, label: str, column: str) -> float | None:
    rows = tolerances.get("rows", {})
    spec = rows[label] if label in rows else tolerances.get("default")
    if spec is None:
        return None
    if isinstance(spec, dict):
        value = spec.get(column)
        return None if value is None else float(value)
    return float(spec)


def diff_tables(actual: QueryTable, reference: QueryTable, tolerances: dict) -> DiffReport:
    """Compare two tables row by row under absolute tolerances.

    tolerances has an optional "default" (number or null) and an optional
    "rows" map from row label to either a number for every column or a
    per-column map. A null or missing bound skips the check but keeps the
    entry, so a report always shows the full table.
    """
    if actual.columns != reference.columns:
        raise TableMismatchError(
            f"column mismatch: {list(actual.columns)} vs {list(reference.columns)}"
        )
    ours = [row.label for row in actual.rows]
    theirs = [row.label for row in reference.rows]
    if ours != theirs:
        raise TableMismatchError(f"row label mismatch: {ours} vs {theirs}")
    entries = []
    for row in actual.rows:
        ref = reference.row(row.label)
        for column, a, r in zip(actual.columns, row.values, ref.values):
            entries.append(
                DiffEntry(row.label, column, a, r, _tolerance_for(tolerances, row.label, column))
            )
    return DiffReport(actual.name, tuple(entries))
