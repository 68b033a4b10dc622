"""Deterministic CSV / JSON reports.

Floats are rounded to 12 significant digits and printed in their shortest
round-trip form, so a report is byte-identical across runs and platforms.
Nothing time- or host-dependent goes into a report.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from . import __version__


def clean_float(x: float, digits: int = 12) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in report")
    y = float(f"{x:.{digits}g}")
    return 0.0 if y == 0 else y


def clean_fixed(x: float, places: int = 12) -> float:
    """Round to a fixed number of decimal places (for exact rationals)."""
    y = round(float(x), places)
    return 0.0 if y == 0 else y


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(clean_float(v))
    if isinstance(v, int):
        return str(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return clean_float(v)
    if isinstance(v, complex):
        return [clean_float(v.real), clean_float(v.imag)]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return _jsonable(v.item())
    raise TypeError(f"cannot serialize {type(v).__name__}")


@dataclass
class Report:
    subcommand: str
    parameters: dict
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, expected {len(self.columns)}")
        self.rows.append(list(values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format_value(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "metadata": {
                "artifact": "histoq",
                "version": __version__,
                "subcommand": self.subcommand,
                "parameters": self.parameters,
                "tolerances": self.tolerances,
            },
            "columns": self.columns,
            "rows": self.rows,
            "summary": self.summary,
        }
        return json.dumps(_jsonable(doc), indent=2, ensure_ascii=False) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")
