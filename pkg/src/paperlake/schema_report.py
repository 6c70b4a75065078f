"""Machine-readable schema reference for the lake.

One section per schema directory listing every table's columns, row
count, and size tier, plus the join keys that bridge schemas.  The
format is meant to be dropped into a coding agent's context as much as
read by people.
"""

from __future__ import annotations

import json
from pathlib import Path

import pyarrow as pa
import pyarrow.parquet as pq

from .ddl import lake_tables
from .errors import LakeError

TIERS = (("<1MB", 1_000_000), ("1MB-1GB", 1_000_000_000), (">1GB", None))


def size_tier(n_bytes: int) -> str:
    for label, limit in TIERS:
        if limit is None or n_bytes < limit:
            return label
    return TIERS[-1][0]


def _column_type(field: pa.Field) -> str:
    if pa.types.is_list(field.type) or pa.types.is_fixed_size_list(field.type):
        return f"list<{field.type.value_type}>"
    return str(field.type)


def build_report(lake_root: str | Path) -> dict:
    lake_root = Path(lake_root)
    tables = lake_tables(lake_root)
    if not tables:
        raise LakeError(f"no tables found under {lake_root}")

    schemas: dict[str, list[dict]] = {}
    for directory in sorted(p.name for p in lake_root.iterdir()
                            if p.is_dir() and not p.name.startswith(".")
                            and p.name != "reports"):
        schemas[directory] = []
    doi_tables: list[str] = []
    topic_tables: list[str] = []
    for schema, table, path in tables:
        qualified = f"{schema}.{table}"
        try:
            meta = pq.ParquetFile(path)
            arrow_schema = meta.schema_arrow
            entry = {
                "table": table,
                "columns": [
                    {"name": f.name, "type": _column_type(f)} for f in arrow_schema
                ],
                "rows": meta.metadata.num_rows,
                "size_tier": size_tier(path.stat().st_size),
            }
            names = set(arrow_schema.names)
            if "doi" in names:
                doi_tables.append(qualified)
            if "topic_id" in names:
                topic_tables.append(qualified)
        except Exception:
            entry = {"table": table, "unreadable": True}
        schemas[schema].append(entry)

    return {
        "lake_root": str(lake_root),
        "schemas": schemas,
        "join_strategies": [
            {"key": "doi", "tables": sorted(doi_tables)},
            {"key": "topic_id", "tables": sorted(topic_tables)},
        ],
    }


def render_text(report: dict) -> str:
    lines = [f"# Lake schema reference: {report['lake_root']}", ""]
    for schema, entries in report["schemas"].items():
        lines.append(f"## schema {schema}")
        if not entries:
            lines.append("  (empty)")
        for entry in entries:
            if entry.get("unreadable"):
                lines.append(f"  table {entry['table']}: unreadable")
                continue
            lines.append(
                f"  table {entry['table']}: {entry['rows']} rows, {entry['size_tier']}"
            )
            for col in entry["columns"]:
                lines.append(f"    - {col['name']}: {col['type']}")
        lines.append("")
    lines.append("## join strategies")
    for strategy in report["join_strategies"]:
        lines.append(f"  key {strategy['key']}: " + (", ".join(strategy["tables"]) or "(none)"))
    return "\n".join(lines) + "\n"


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
