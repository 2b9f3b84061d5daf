"""Serialisation of command results as csv, json or a plain table."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, TextIO

import numpy as np

from .errors import ConfigError

__all__ = ["Result", "emit", "flatten", "parse_grid"]


@dataclass
class Result:
    rows: list[dict]
    columns: list[str] | None = None
    single: bool = False
    scalar_key: str | None = None
    summary: dict = field(default_factory=dict)


def parse_grid(spec: str) -> list[float]:
    """``start:stop:count[:lin|geom]`` -> grid values, endpoints included."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"grid spec {spec!r} must be start:stop:count[:lin|geom]")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"malformed grid spec {spec!r}") from exc
    kind = parts[3] if len(parts) == 4 else "lin"
    if count < 0:
        raise ConfigError("grid count must be >= 0")
    if kind == "lin":
        return [float(v) for v in np.linspace(start, stop, count)]
    if kind in ("geom", "log"):
        if start <= 0 or stop <= 0:
            raise ConfigError("geometric grid needs positive endpoints")
        return [float(v) for v in np.geomspace(start, stop, count)]
    raise ConfigError(f"unknown grid kind {kind!r}")


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def flatten(d: dict, prefix: str = "") -> dict:
    out: dict = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = ";".join(_cell(x) for x in v)
        else:
            out[key] = v
    return out


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def _table_cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return _cell(v)


def emit(stream: TextIO, command: str, config: dict, result: Result,
         warnings: list[str], fmt: str) -> None:
    if fmt == "json":
        body: Any
        if result.single:
            body = result.rows[0] if result.rows else {}
        else:
            body = {**result.summary, "rows": result.rows} if result.summary else result.rows
        doc = {"command": command, "config": config, "result": body, "warnings": warnings}
        stream.write(json.dumps(_jsonable(doc), indent=2) + "\n")
        return
    flat = [flatten(r) for r in result.rows]
    columns = list(result.columns or [])
    for r in flat:
        for k in r:
            if k not in columns:
                columns.append(k)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in flat:
            w.writerow([_cell(r.get(c)) for c in columns])
        stream.write(buf.getvalue())
        return
    if result.single and result.scalar_key and flat:
        stream.write(_table_cell(result.rows[0][result.scalar_key]) + "\n")
        return
    if result.single and flat:
        width = max(len(c) for c in columns)
        for c in columns:
            stream.write(f"{c.ljust(width)}  {_table_cell(flat[0].get(c))}\n")
        return
    cells = [[_table_cell(r.get(c)) for c in columns] for r in flat]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    stream.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for row in cells:
        stream.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")
    for k, v in result.summary.items():
        stream.write(f"# {k}: {_table_cell(v)}\n")
