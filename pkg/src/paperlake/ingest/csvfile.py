"""CSV to Parquet conversion.

CSV dialects across the integrated sources are too inconsistent for
type inference, so every column is kept as a string; downstream casts
are declared explicitly in the linkage configuration.
"""

from __future__ import annotations

import csv
from pathlib import Path

import pyarrow as pa

from ..tableio import write_table
from .base import ConversionReport


def convert_csv(
    path: str | Path,
    out: str | Path,
    *,
    has_header: bool = True,
    delimiter: str = ",",
    source: str = "",
) -> ConversionReport:
    """Convert an RFC 4180 CSV file to a Parquet table of strings.

    Header row names the columns, otherwise c0..cN.  Rows whose field
    count disagrees with the header are rejected with reason "arity".
    """
    if len(delimiter) != 1:
        raise ValueError("delimiter must be a single character")
    path = Path(path)
    out = Path(out)
    report = ConversionReport(output_path=str(out))
    names: list[str] | None = None
    columns: list[list[str]] = []

    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter=delimiter)
        for row in reader:
            if not row:  # blank line, not a record
                continue
            if names is None:
                if has_header:
                    names = list(row)
                    columns = [[] for _ in names]
                    continue
                names = [f"c{i}" for i in range(len(row))]
                columns = [[] for _ in names]
            report.rows_read += 1
            if len(row) != len(names):
                report.reject("arity")
                continue
            for values, cell in zip(columns, row):
                values.append(cell)
            report.rows_written += 1

    if names is None:
        raise ValueError("no records")
    arrays = [pa.array(values, type=pa.string()) for values in columns]
    write_table(pa.table(arrays, names=names), out, source=source)
    return report
