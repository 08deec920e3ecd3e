"""Deterministic report and table writers."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

CONVERGENCE_COLUMNS = ("m", "r_measured", "r_budget", "diff_triple", "ratio")


def jsonable(obj):
    """Plain JSON types only; non-finite floats become ``None``."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def fmt(value):
    """17-significant-digit cell text; ``None`` and non-finite values are empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g") if math.isfinite(value) else ""
    return str(value)


def table_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit_convergence_table(report):
    """CSV text with one row per Picard iteration.

    Columns are ``m, r_measured, r_budget, diff_triple, ratio``;
    ``r_budget`` is empty for resonant systems.  A diverged run gets a
    trailing ``verdict`` row naming the first bad time level.
    """
    rows = []
    for rec in report.iterations:
        budget = report.budget[rec.m] if report.budget is not None else None
        rows.append((rec.m, rec.r_measured, budget, rec.diff_triple, rec.ratio))
    if report.verdict == "diverged":
        rows.append(("verdict", "diverged", report.diverged_at, None, None))
    return table_text(CONVERGENCE_COLUMNS, rows)


def default_stride(grid, target=200):
    return max(1, -(-max(grid.nx, grid.nt) // target))


def write_outputs(out_dir, report, tables, fields, stride=None):
    """Write ``report.json``, ``tables/<name>.csv`` and ``fields/<name>.csv``.

    ``tables`` maps a name to CSV text or to a ``(header, rows)`` pair.
    """
    out = Path(out_dir)
    (out / "tables").mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(report))
    for name, table in sorted(tables.items()):
        text = table if isinstance(table, str) else table_text(*table)
        (out / "tables" / f"{name}.csv").write_text(text)
    if fields:
        (out / "fields").mkdir(exist_ok=True)
        for name, f in sorted(fields.items()):
            f.to_csv(out / "fields" / f"{name}.csv", stride or default_stride(f.grid))
    return out
