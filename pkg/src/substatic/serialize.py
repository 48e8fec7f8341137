"""Deterministic CSV/JSON output for series and reports.

Floats use the shortest representation that round-trips, CSV uses LF line
endings and a ``.`` decimal separator.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .report import CheckReport


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays and dataclass reports into JSON-ready values."""
    if isinstance(obj, CheckReport):
        return _plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else fmt_float(x)
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def series_rows(series) -> list[dict[str, float]]:
    V = series.V if series.V is not None else [math.nan] * len(series.t_grid)
    return [{"t": float(t), "A": float(a), "V": float(v)} for t, a, v in zip(series.t_grid, series.A, V)]


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def series_csv(series) -> str:
    rows = ([fmt_float(row[c]) for c in ("t", "A", "V")] for row in series_rows(series))
    return _csv(("t", "A", "V"), rows)


def emit_series(series, fmt: str = "csv", path: str | Path | None = None) -> str:
    """Render a comparison series as CSV (``t,A,V``) or a JSON array; write it if a path is given."""
    if fmt == "csv":
        text = series_csv(series)
    elif fmt == "json":
        text = to_json(series_rows(series))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text


REPORT_COLUMNS = ("name", "lhs", "rhs", "margin", "tol", "passed", "equality")


def reports_csv(reports: Iterable[CheckReport]) -> str:
    rows = (
        [r.name, fmt_float(r.lhs), fmt_float(r.rhs), fmt_float(r.margin), fmt_float(r.tol),
         str(r.passed).lower(), str(r.equality).lower()]
        for r in reports
    )
    return _csv(REPORT_COLUMNS, rows)


def write_text(text: str, path: str | Path | None) -> None:
    if path is None:
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
