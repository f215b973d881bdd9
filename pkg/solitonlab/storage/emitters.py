"""CSV time series, JSON reports and plain-text summary tables.

CSV files quote nothing, keep a fixed column order per emitter and write
floats with 17 significant digits so values round-trip exactly.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from tabulate import tabulate

from ..core.logging import logger

log = logger.getChild("emitters")

FLOAT_FORMAT = ".17g"


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    text = str(value)
    if any(c in text for c in ",\n\r\""):
        raise ValueError(f"CSV value {text!r} would need quoting")
    return text


def sigma_columns(dim: int) -> list[str]:
    """t, a1..ad, v1..vd, gamma, mu, r_h1, orth_residual."""
    return (["t"] + [f"a{j + 1}" for j in range(dim)] + [f"v{j + 1}" for j in range(dim)]
            + ["gamma", "mu", "r_h1", "orth_residual"])


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Mapping | Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_NONE, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            values = [row[c] for c in columns] if isinstance(row, Mapping) else list(row)
            if len(values) != len(columns):
                raise ValueError(f"row has {len(values)} values for {len(columns)} columns")
            writer.writerow([format_value(v) for v in values])
    log.debug("wrote %s", path)
    return path


def write_sigma_csv(path: str | Path, records: Sequence, dim: int) -> Path:
    """One row per decomposition record (``t``, ``sigma``, ``r_h1``, ``orth_residual`` attributes)."""
    rows = []
    for rec in records:
        s = rec.sigma
        rows.append([rec.t, *s.a, *s.v, s.gamma, s.mu, rec.r_h1, rec.orth_residual])
    return write_csv(path, sigma_columns(dim), rows)


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh, quoting=csv.QUOTE_NONE)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader]
    return header, np.array(data, dtype=float).reshape(len(data), len(header))


def _jsonable(value):
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: str | Path, report: Mapping) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    log.info("report written to %s", path)
    return path


def summary_table(rows: Sequence[Mapping], columns: Sequence[str] | None = None) -> str:
    if not rows:
        return ""
    columns = list(columns or rows[0].keys())
    body = [[row.get(c, "") for c in columns] for row in rows]
    return tabulate(body, headers=columns, floatfmt=".4g", tablefmt="github")
