"""Trace CSV reading and writing.

Files carry the header ``time_s,signed_distance_m,distance_m,pl_db`` and
one sample per line. Floats are written in their shortest round-trip form
so that ``read(write(x))`` reproduces every value bit for bit.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .crossing import CrossingTrace

HEADER = ("time_s", "signed_distance_m", "distance_m", "pl_db")


class TraceFormatError(ValueError):
    """Malformed or semantically invalid trace file."""


def format_trace(trace: CrossingTrace) -> str:
    buf = io.StringIO()
    buf.write(",".join(HEADER) + "\n")
    cols = (trace.time_s, trace.signed_distance_m, trace.distance_m, trace.pl_db)
    for row in zip(*(c.tolist() for c in cols)):
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def write_trace(trace: CrossingTrace, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(format_trace(trace))


def read_trace(path, relative_speed_mps: float | None = None,
               frequency_ghz: float = 59.6) -> CrossingTrace:
    """Parse a trace file.

    When ``relative_speed_mps`` is omitted it is inferred from the end-to-end
    change of signed distance over time.
    """
    path = Path(path)
    with open(path, newline="", encoding="ascii", errors="strict") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise TraceFormatError(f"{path}: file is empty")
    if tuple(c.strip() for c in rows[0]) != HEADER:
        raise TraceFormatError(f"{path}:1: expected header {','.join(HEADER)}")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(HEADER):
            raise TraceFormatError(f"{path}:{lineno}: expected {len(HEADER)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise TraceFormatError(f"{path}:{lineno}: non-numeric field in {row!r}") from None
        if not all(np.isfinite(vals)):
            raise TraceFormatError(f"{path}:{lineno}: non-finite value")
        if vals[2] < 0:
            raise TraceFormatError(f"{path}:{lineno}: negative distance_m")
        if values and vals[0] <= values[-1][0]:
            raise TraceFormatError(f"{path}:{lineno}: time_s not strictly increasing")
        if values and vals[1] <= values[-1][1]:
            raise TraceFormatError(f"{path}:{lineno}: signed_distance_m not strictly increasing")
        values.append(vals)
    if not values:
        raise TraceFormatError(f"{path}: no samples")
    arr = np.asarray(values)
    if relative_speed_mps is None:
        if len(arr) < 2:
            raise TraceFormatError(f"{path}: cannot infer relative speed from one sample")
        relative_speed_mps = float((arr[-1, 1] - arr[0, 1]) / (arr[-1, 0] - arr[0, 0]))
    return CrossingTrace(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3],
                         relative_speed_mps, frequency_ghz)
