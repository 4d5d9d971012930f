"""File formats: series input, result records, and flat tables.

Series files are delimiter-separated text with one column per dimension and
one row per time stamp; a header row and a leading timestamp column are
optional. Result records are JSON with sorted keys and a ``schema_version``
field, so identical runs produce byte-identical files. All offsets in files
are 0-based.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .core import TimeSeries
from .errors import InputFormatError, ParameterError

SCHEMA_VERSION = "1"

_DELIMITERS = (",", ";", "\t", " ")


def _sniff_delimiter(line):
    counts = {d: line.count(d) for d in _DELIMITERS}
    best = max(counts, key=lambda d: counts[d])
    return best if counts[best] > 0 else ","


def read_series(path, delimiter=None, timestamp_column=False) -> TimeSeries:
    """Read a delimiter-separated series file into a TimeSeries.

    The delimiter is sniffed from the first line when not given; a header is
    detected by a non-numeric first row. With ``timestamp_column`` the first
    column is dropped before the values reach any computation.

    Raises
    ------
    InputFormatError
        On malformed content, carrying the offending 1-based line number.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    lines = [(no + 1, line.strip()) for no, line in enumerate(raw_lines)]
    lines = [(no, line) for no, line in lines if line]
    if not lines:
        raise InputFormatError(f"{path} is empty", line=1)
    if delimiter is None:
        delimiter = _sniff_delimiter(lines[0][1])
    rows = []
    width = None
    start = 0
    first_fields = [f for f in lines[0][1].split(delimiter) if f != ""]
    try:
        [float(f) for f in first_fields]
    except ValueError:
        start = 1  # header row
    for no, line in lines[start:]:
        fields = [f for f in line.split(delimiter) if f != ""]
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise InputFormatError(
                f"line {no}: expected {width} fields, got {len(fields)}", line=no
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise InputFormatError(f"line {no}: {exc}", line=no) from exc
    if not rows:
        raise InputFormatError(f"{path} holds no data rows", line=lines[0][0])
    data = np.asarray(rows, dtype=np.float64)
    if timestamp_column:
        if data.shape[1] < 2:
            raise InputFormatError(
                "timestamp column requested but only one column present", line=1
            )
        data = data[:, 1:]
    try:
        return TimeSeries(data.T)  # rows are time stamps, columns dimensions
    except ParameterError as exc:
        raise InputFormatError(str(exc)) from exc


def write_series(path, ts, delimiter=","):
    """Write a TimeSeries as rows of time stamps (one column per dimension)."""
    ts = TimeSeries.coerce(ts)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow([f"dim_{i}" for i in range(ts.d)])
        for row in ts.values.T:
            writer.writerow([repr(float(v)) for v in row])


def write_record(path, record: dict):
    """Write a JSON record deterministically (sorted keys, fixed layout)."""
    record = dict(record)
    record.setdefault("schema_version", SCHEMA_VERSION)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_record(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"{path} is not valid JSON: {exc}", line=exc.lineno
        ) from exc


def write_table(path, header, rows):
    """Write a plot-friendly CSV table."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                repr(float(v)) if isinstance(v, (float, np.floating)) else v
                for v in row
            ])
