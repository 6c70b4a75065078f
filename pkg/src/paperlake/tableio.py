"""Parquet-backed table IO shared by every pipeline stage.

Every lake table is a single zstd-compressed Parquet file whose
key/value metadata records the logical source name and the toolkit
version, so a lake can always be audited after the fact.
"""

from __future__ import annotations

from pathlib import Path

import pyarrow as pa
import pyarrow.parquet as pq

from . import __version__
from .errors import LakeError

META_SOURCE = b"paperlake:source"
META_VERSION = b"paperlake:version"


def write_table(
    table: pa.Table,
    path: str | Path,
    *,
    source: str = "",
    extra_metadata: dict[str, str] | None = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = dict(table.schema.metadata or {})
    meta[META_SOURCE] = source.encode()
    meta[META_VERSION] = __version__.encode()
    for key, value in (extra_metadata or {}).items():
        meta[f"paperlake:{key}".encode()] = value.encode()
    pq.write_table(table.replace_schema_metadata(meta), path, compression="zstd")


def read_table(path: str | Path, columns: list[str] | None = None) -> pa.Table:
    path = Path(path)
    if not path.is_file():
        raise LakeError(f"missing lake table: {path}")
    return pq.read_table(path, columns=columns)


def read_metadata(path: str | Path) -> dict[str, str]:
    """File-level key/value metadata without loading any row data."""
    schema = pq.ParquetFile(path).schema_arrow
    return {k.decode(): v.decode() for k, v in (schema.metadata or {}).items()}


def column(table: pa.Table, name: str) -> list:
    if name not in table.column_names:
        raise LakeError(f"table has no column {name!r} (has: {table.column_names})")
    return table.column(name).to_pylist()
