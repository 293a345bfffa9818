"""CSV ingestion and emission with provenance headers.

Every emitted file starts with ``#`` comment lines naming the tool version,
the subcommand, the resolved configuration (as sorted JSON) and the seed,
followed by a comma-separated table with a header row and LF line endings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

from shrinkreg.core import Dataset


class DataFormatError(ValueError):
    """Input file cannot be parsed as a numeric table."""


class ColumnError(ValueError):
    """A requested column is missing or the column layout is unusable."""


def read_dataset(path: str, response: str, predictors: Sequence[str] | None = None) -> Dataset:
    """Load a CSV with a header row; ``#`` lines are skipped."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    except (OSError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(lines))
    if len(rows) < 2:
        raise DataFormatError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise DataFormatError(f"{path}: duplicate column names")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataFormatError(f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}")
        try:
            values.append([float(v) for v in row])
        except ValueError as exc:
            raise DataFormatError(f"{path}: row {lineno}: {exc}") from exc
    table = np.array(values)
    if not np.all(np.isfinite(table)):
        raise DataFormatError(f"{path}: missing or non-finite values")
    if response not in header:
        raise ColumnError(f"response column {response!r} not found in {path}")
    names = [h for h in header if h != response] if predictors is None else list(predictors)
    missing = [c for c in names if c not in header]
    if missing:
        raise ColumnError(f"predictor column(s) {', '.join(missing)} not found in {path}")
    if not names:
        raise ColumnError(f"{path}: no predictor columns besides {response!r}")
    X = table[:, [header.index(c) for c in names]]
    return Dataset(X, table[:, header.index(response)], tuple(names))


def format_value(v, precision: int = 6) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return ""
    if v == 0.0:
        return "0"
    return f"{v:.{precision}g}"


def provenance_lines(command: str, config: dict, seed, version: str) -> list[str]:
    return [
        f"# shrinkreg {version}",
        f"# command: {command}",
        f"# config: {json.dumps(config, sort_keys=True, default=str)}",
        f"# seed: {seed}",
    ]


def render_table(columns: Sequence[str], rows: Iterable[Sequence], header: Sequence[str] = (),
                 precision: int = 6) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(v, precision) for v in row])
    return buf.getvalue()


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_key_values(path: str) -> dict[str, str]:
    """Flat ``key = value`` config; ``#`` comments and blank lines ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataFormatError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("_", "-")] = value
    return out
