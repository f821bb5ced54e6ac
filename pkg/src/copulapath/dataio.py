"""CSV ingestion, the standardize-and-check pipeline, and report serialization.

The on-disk report formats are:

* ``json``   -- one file, full-precision floats, re-parses to equal values;
* ``csv``    -- one file per table (indices / coefficients / effects), values
  printed with 6 significant digits;
* ``markdown`` -- one human-readable document with the same tables.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    EmptyFile,
    IoError,
    MissingColumn,
    NonNumericCell,
    UnsupportedFormat,
)
from .numerics import KsResult, ks_test_normal, standardize

__all__ = [
    "Dataset",
    "read_csv",
    "prepare",
    "write_report",
    "render_report",
    "REPORT_FORMATS",
]

REPORT_FORMATS = ("json", "csv", "markdown")

# Cell contents treated as missing rather than malformed numbers.
_MISSING_TOKENS = {"", "na", "n/a", "nan", "null", "none"}

_SIGNIFICANT_DIGITS = 6


@dataclass(frozen=True)
class Dataset:
    """Named numeric columns with row-aligned observations.

    Column 0 is the endogenous variable by convention; the exogenous
    variables follow in declaration order.
    """

    names: tuple[str, ...]
    columns: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        names = tuple(self.names)
        cols = np.asarray(self.columns, dtype=float)
        if cols.ndim != 2:
            raise ValueError("columns must be a 2-d array (rows x variables)")
        if len(names) != cols.shape[1]:
            raise ValueError("number of names must match number of columns")
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        if cols.shape[0] < 1:
            raise ValueError("need at least 1 row")
        if not np.all(np.isfinite(cols)):
            raise ValueError("all entries must be finite")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def p(self) -> int:
        """Number of exogenous variables (all columns but the first)."""
        return self.columns.shape[1] - 1

    @property
    def endogenous(self) -> str:
        return self.names[0]

    @property
    def exogenous(self) -> tuple[str, ...]:
        return self.names[1:]

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.names.index(name)
        except ValueError:
            raise MissingColumn(f"no column named {name!r}") from None
        return self.columns[:, j]

    def subset(self, rows) -> "Dataset":
        """New dataset restricted to the given row indices."""
        return replace(self, columns=self.columns[np.asarray(rows, dtype=int)])


def _parse_cell(raw: str, row: int, column: str) -> float:
    text = raw.strip()
    if text.lower() in _MISSING_TOKENS:
        raise NonNumericCell(row, column, raw)
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCell(row, column, raw) from None
    if not np.isfinite(value):
        raise NonNumericCell(row, column, raw)
    return value


def read_csv(path, endogenous: str, exogenous) -> Dataset:
    """Load the selected columns of a headered CSV file.

    Rows with missing or malformed values in any selected column are hard
    errors: the raised :class:`NonNumericCell` names the first offending
    cell and its message lists every offending row number.
    """
    exogenous = list(exogenous)
    wanted = [endogenous] + exogenous
    if len(set(wanted)) != len(wanted):
        raise ValueError("selected column names must be distinct")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise EmptyFile(f"{path}: no header row") from None
            header = [h.strip() for h in header]
            for name in wanted:
                if name not in header:
                    raise MissingColumn(
                        f"column {name!r} not in {path} (available: {', '.join(header)})"
                    )
            idx = [header.index(name) for name in wanted]
            rows: list[list[float]] = []
            bad: list[NonNumericCell] = []
            for rownum, record in enumerate(reader, start=1):
                if not record or all(not cell.strip() for cell in record):
                    continue
                parsed = []
                for j, name in zip(idx, wanted):
                    raw = record[j] if j < len(record) else ""
                    try:
                        parsed.append(_parse_cell(raw, rownum, name))
                    except NonNumericCell as err:
                        bad.append(err)
                        break
                else:
                    rows.append(parsed)
    except OSError as err:
        raise IoError(f"cannot read {path}: {err}") from err
    if bad:
        first = bad[0]
        rownums = sorted({err.row for err in bad})
        shown = ", ".join(map(str, rownums[:10])) + ("..." if len(rownums) > 10 else "")
        raise NonNumericCell(
            first.row,
            first.column,
            f"{first.value} ({len(rownums)} offending row(s): {shown})",
        )
    if not rows:
        raise EmptyFile(f"{path}: header only, no data rows")
    return Dataset(names=tuple(wanted), columns=np.array(rows, dtype=float))


def prepare(data: Dataset) -> tuple[Dataset, list[KsResult]]:
    """Standardize every column and attach a KS normality result per column.

    Idempotent at the value level: preparing an already-standardized dataset
    returns the same values (within floating point).
    """
    cols = np.column_stack([standardize(data.columns[:, j]) for j in range(data.p + 1)])
    ks = [ks_test_normal(cols[:, j]) for j in range(cols.shape[1])]
    return replace(data, columns=cols, standardized=True), ks


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.{_SIGNIFICANT_DIGITS}g}"
    return str(value)


_INDEX_ROWS = ("mean_mse", "sd_mse", "aic", "bic", "aic_pooled", "bic_pooled")


def _iter_partitions(section: dict) -> list[str]:
    seen: list[str] = []
    for per_method in section.values():
        for partition in per_method:
            if partition not in seen:
                seen.append(partition)
    return seen


def _indices_table(report: dict) -> tuple[list[str], list[list]]:
    indices = report.get("indices", {})
    methods = list(indices)
    header = ["partition", "index"] + methods
    rows = []
    for partition in _iter_partitions(indices):
        for index_name in _INDEX_ROWS:
            if not any(index_name in indices[m].get(partition, {}) for m in methods):
                continue
            row = [partition, index_name]
            for m in methods:
                row.append(indices[m].get(partition, {}).get(index_name, ""))
            rows.append(row)
    return header, rows


def _coefficients_table(report: dict) -> tuple[list[str], list[list]]:
    coeffs = report.get("coefficients", {})
    methods = list(coeffs)
    header = ["partition", "coefficient"] + methods
    rows = []
    for partition in _iter_partitions(coeffs):
        width = max(
            (len(coeffs[m].get(partition, [])) for m in methods),
            default=0,
        )
        for i in range(width):
            row = [partition, f"P{i + 1}"]
            for m in methods:
                vals = coeffs[m].get(partition, [])
                row.append(vals[i] if i < len(vals) else "")
            rows.append(row)
        for pair, value in report.get("correlations", {}).get(partition, {}).items():
            rows.append([partition, f"rho[{pair}]"] + [value] * len(methods))
    return header, rows


def _effects_table(report: dict) -> tuple[list[str], list[list]]:
    effects = report.get("effects", {})
    header = ["method", "partition", "variable", "direct", "indirect", "total"]
    rows = []
    for method, per_partition in effects.items():
        for partition, entries in per_partition.items():
            for entry in entries:
                rows.append(
                    [
                        method,
                        partition,
                        entry["var"],
                        entry["direct"],
                        entry["indirect"],
                        entry["total"],
                    ]
                )
    return header, rows


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _markdown_grid(header: list[str], rows: list[list]) -> str:
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [len(h) for h in header]
    for row in cells:
        for j, cell in enumerate(row):
            widths[j] = max(widths[j], len(cell))
    out = ["| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |"]
    out.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
    for row in cells:
        out.append("| " + " | ".join(c.ljust(w) for c, w in zip(row, widths)) + " |")
    return "\n".join(out)


def render_report(report: dict, format: str):
    """Serialize a report dict.

    Returns a string for ``json``/``markdown`` and a ``{filename: text}``
    mapping (one entry per table) for ``csv``.
    """
    if format == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    tables = {
        "indices": _indices_table(report),
        "coefficients": _coefficients_table(report),
        "effects": _effects_table(report),
    }
    if format == "csv":
        return {
            f"{name}.csv": _csv_text(header, rows)
            for name, (header, rows) in tables.items()
            if rows
        }
    if format == "markdown":
        meta_key = "scenario" if "scenario" in report else "dataset"
        lines = [f"# Path analysis report ({meta_key})", ""]
        meta = report.get(meta_key, {})
        lines.append(
            ", ".join(f"{k}={_fmt(v)}" for k, v in meta.items() if not isinstance(v, (list, dict)))
        )
        for title, (header, rows) in tables.items():
            if not rows:
                continue
            lines += ["", f"## {title.capitalize()}", "", _markdown_grid(header, rows)]
        lines.append("")
        return "\n".join(lines)
    raise UnsupportedFormat(f"unknown report format {format!r}")


def write_report(report: dict, path, format: str = "json") -> list[str]:
    """Write a report to disk; returns the list of files written.

    ``csv`` treats ``path`` as a directory and writes one file per table;
    the other formats write a single file at ``path``.
    """
    rendered = render_report(report, format)
    written: list[str] = []
    try:
        if isinstance(rendered, dict):
            os.makedirs(path, exist_ok=True)
            for name, text in rendered.items():
                target = os.path.join(path, name)
                with open(target, "w", encoding="utf-8") as fh:
                    fh.write(text)
                written.append(target)
        else:
            parent = os.path.dirname(os.path.abspath(path))
            os.makedirs(parent, exist_ok=True)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(rendered)
            written.append(str(path))
    except OSError as err:
        raise IoError(f"cannot write report to {path}: {err}") from err
    return written
