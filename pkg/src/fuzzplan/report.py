"""Deterministic CSV / JSON writers shared by the command line."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

SCHEMA_VERSION = 1


def fmt(value, raw: bool = False, places: int = 4) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if raw else f"{value:.{places}f}"
    if value is None:
        return ""
    return str(value)


def to_csv(rows: Iterable[dict], columns: Sequence[str], raw: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c), raw) for c in columns])
    return buf.getvalue()


def _round(obj, raw: bool):
    if isinstance(obj, float) and not raw:
        return round(obj, 4)
    if isinstance(obj, dict):
        return {k: _round(v, raw) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, raw) for v in obj]
    return obj


def to_json(payload: dict, raw: bool = False) -> str:
    body = {"schema_version": SCHEMA_VERSION, **_round(payload, raw)}
    return json.dumps(body, indent=2, sort_keys=True) + "\n"
