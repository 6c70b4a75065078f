"""SQL view layer over the Parquet lake.

Emits one CREATE VIEW per table so any Parquet-aware SQL engine can
query the lake in place; paths are relative to the lake root, so the
script works wherever the directory is mounted.
"""

from __future__ import annotations

from pathlib import Path

from . import __version__

SKIP_DIRS = {"reports"}


def lake_tables(lake_root: str | Path) -> list[tuple[str, str, Path]]:
    """(schema, table, path) for every Parquet table, deterministically ordered."""
    lake_root = Path(lake_root)
    out = []
    for schema_dir in sorted(p for p in lake_root.iterdir() if p.is_dir()):
        if schema_dir.name in SKIP_DIRS or schema_dir.name.startswith("."):
            continue
        for table_file in sorted(schema_dir.glob("*.parquet")):
            out.append((schema_dir.name, table_file.stem, table_file))
    return out


def generate_view_ddl(lake_root: str | Path) -> str:
    lake_root = Path(lake_root)
    lines = [f"-- paperlake {__version__}: views over Parquet, paths relative to the lake root"]
    current_schema = None
    for schema, table, path in lake_tables(lake_root):
        if schema != current_schema:
            lines.append("")
            lines.append(f"CREATE SCHEMA IF NOT EXISTS {schema};")
            current_schema = schema
        rel = path.relative_to(lake_root).as_posix()
        lines.append(
            f"CREATE OR REPLACE VIEW {schema}.{table} AS "
            f"SELECT * FROM read_parquet('{rel}');"
        )
    return "\n".join(lines) + "\n"


def write_view_ddl(lake_root: str | Path, out_name: str = "views.sql") -> Path:
    lake_root = Path(lake_root)
    out = lake_root / out_name
    out.write_text(generate_view_ddl(lake_root))
    return out
