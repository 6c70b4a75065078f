"""JSON Lines to Parquet conversion with schema discovery."""

from __future__ import annotations

from pathlib import Path

import pyarrow as pa
import pyarrow.parquet as pq

from .. import __version__
from ..tableio import META_SOURCE, META_VERSION
from .base import ConversionReport
from .schema import TableSchema, coerce, discover_schema, iter_json_objects

BATCH_ROWS = 65_536


def convert_jsonl(
    path: str | Path,
    out: str | Path,
    schema: TableSchema | None = None,
    *,
    sample_size: int = 10_000,
    source: str = "",
) -> ConversionReport:
    """Convert one JSONL dump to a zstd Parquet file.

    When `schema` is absent it is discovered from the first
    `sample_size` records first.  Rows are written in input order;
    malformed lines are rejected and counted, never fatal.
    """
    path = Path(path)
    out = Path(out)
    if schema is None:
        with open(path, encoding="utf-8") as handle:
            schema = discover_schema(handle, sample_size)
    report = ConversionReport(output_path=str(out))
    arrow_schema = schema.to_arrow().with_metadata(
        {META_SOURCE: source.encode(), META_VERSION: __version__.encode()}
    )
    names = schema.names
    col_types = {c.name: c.type for c in schema.columns}
    buffers: dict[str, list] = {name: [] for name in names}
    buffered = 0

    out.parent.mkdir(parents=True, exist_ok=True)
    writer = pq.ParquetWriter(out, arrow_schema, compression="zstd")
    try:
        with open(path, encoding="utf-8") as handle:
            for obj, reason in iter_json_objects(handle):
                report.rows_read += 1
                if obj is None:
                    report.reject(reason)
                    continue
                row = {}
                ok = True
                for name in names:
                    ok, coerced = coerce(obj.get(name), col_types[name])
                    if not ok:
                        break
                    row[name] = coerced
                if not ok:
                    report.reject("type")
                    continue
                for name in names:
                    buffers[name].append(row[name])
                report.rows_written += 1
                buffered += 1
                if buffered >= BATCH_ROWS:
                    writer.write_batch(_batch(buffers, arrow_schema))
                    buffers = {name: [] for name in names}
                    buffered = 0
        if buffered or report.rows_written == 0:
            writer.write_batch(_batch(buffers, arrow_schema))
    finally:
        writer.close()
    return report


def _batch(buffers: dict[str, list], arrow_schema: pa.Schema) -> pa.RecordBatch:
    arrays = [
        pa.array(buffers[field.name], type=field.type) for field in arrow_schema
    ]
    return pa.RecordBatch.from_arrays(arrays, schema=arrow_schema.remove_metadata())
