"""CSV and summary writers with a fixed, reproducible number format."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, Mapping, Sequence, Union

Number = Union[int, float, bool]


def format_number(x: Number) -> str:
    """Integers verbatim, floats with 9 significant digits (trailing zeros kept)."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        x = 0.0  # no negative zero
    return format(x, "#.9g")


def emit_csv(rows: Sequence[Mapping[str, Number]], path: Union[str, Path], columns: Sequence[str] = ()) -> Path:
    """Write ``rows`` as CSV with a header line.

    ``columns`` fixes the header (needed for an empty table); otherwise the
    first row's keys are used.  Every row must have exactly those keys.
    """
    path = Path(path)
    header = list(columns) or (list(rows[0].keys()) if rows else [])
    for i, row in enumerate(rows):
        if list(row.keys()) != header:
            raise ValueError(f"row {i} has columns {list(row.keys())}, expected {header}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(row[c]) for c in header])
    return path


def read_csv(path: Union[str, Path]) -> Dict[str, list]:
    """Read a CSV written by :func:`emit_csv` into float columns."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: Dict[str, list] = {h: [] for h in header}
        for line in reader:
            if len(line) != len(header):
                raise ValueError(f"ragged row in {path}")
            for h, cell in zip(header, line):
                cols[h].append(float(cell))
    return cols


def emit_summary(summary: Mapping[str, object], path: Union[str, Path]) -> Path:
    """Flat ``key = value`` text file, keys sorted."""
    path = Path(path)
    lines = []
    for key in sorted(summary):
        value = summary[key]
        text = format_number(value) if isinstance(value, (int, float)) else str(value)
        lines.append(f"{key} = {text}")
    path.write_text("\n".join(lines) + "\n")
    return path
