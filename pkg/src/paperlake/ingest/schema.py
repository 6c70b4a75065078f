"""Schema auto-discovery for JSON Lines dumps.

Upstream sources evolve their payloads across snapshot partitions, so
column structure is discovered from a sample of records rather than
hard-coded.  The discovered column set is the union of keys seen in the
sample, in first-seen order; each column's type is the narrowest type
consistent with all sampled values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

import pyarrow as pa

# Logical column types.  "json" holds nested objects/arrays serialized
# to canonical JSON text; open-ended nesting is deliberately unsupported.
BOOL = "bool"
INT64 = "int64"
FLOAT64 = "float64"
STRING = "string"
LIST_STRING = "list<string>"
JSON = "json"

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1

_ARROW_TYPES = {
    BOOL: pa.bool_(),
    INT64: pa.int64(),
    FLOAT64: pa.float64(),
    STRING: pa.string(),
    LIST_STRING: pa.list_(pa.string()),
    JSON: pa.string(),
}


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    type: str
    nullable: bool


@dataclass(frozen=True)
class TableSchema:
    columns: tuple[ColumnSpec, ...]

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names in schema: {names}")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def to_arrow(self) -> pa.Schema:
        return pa.schema(
            pa.field(c.name, _ARROW_TYPES[c.type], nullable=c.nullable)
            for c in self.columns
        )


def value_type(value) -> str | None:
    """Narrowest column type for one JSON value; None for JSON null."""
    if value is None:
        return None
    if isinstance(value, bool):  # bool before int: bool is an int subclass
        return BOOL
    if isinstance(value, int):
        return INT64 if _INT64_MIN <= value <= _INT64_MAX else STRING
    if isinstance(value, float):
        return FLOAT64
    if isinstance(value, str):
        return STRING
    if isinstance(value, list):
        if all(isinstance(item, str) for item in value):
            return LIST_STRING
        return JSON
    return JSON  # dict


def unify(a: str, b: str) -> str:
    """Join of two column types; conflicting scalars promote to string."""
    if a == b:
        return a
    pair = {a, b}
    if pair == {INT64, FLOAT64}:
        return FLOAT64
    if pair == {LIST_STRING, JSON}:
        return JSON
    return STRING


def canonical_json(value) -> str:
    return json.dumps(value, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def iter_json_objects(lines: Iterable[str]) -> Iterator[tuple[dict | None, str]]:
    """Yield (object, reject_reason) per non-blank line.

    Blank/whitespace-only lines are skipped entirely; they are not rows.
    """
    for line in lines:
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            yield None, "parse"
            continue
        if not isinstance(obj, dict):
            yield None, "not_object"
            continue
        yield obj, ""


def discover_schema(lines: Iterable[str], sample_size: int = 10_000) -> TableSchema:
    """Infer a TableSchema from the first `sample_size` parseable records.

    Invalid lines are counted and skipped; a key absent (or null) in any
    sampled record makes its column nullable.  Deterministic: identical
    input and sample_size give an identical schema, column order included.
    """
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    order: list[str] = []
    types: dict[str, str | None] = {}
    present: dict[str, int] = {}
    saw_null: dict[str, bool] = {}
    n_records = 0
    for obj, _reason in iter_json_objects(lines):
        if obj is None:
            continue
        n_records += 1
        for key, value in obj.items():
            if key not in types:
                order.append(key)
                types[key] = None
                present[key] = 0
                saw_null[key] = False
            present[key] += 1
            vt = value_type(value)
            if vt is None:
                saw_null[key] = True
            else:
                types[key] = vt if types[key] is None else unify(types[key], vt)
        if n_records >= sample_size:
            break
    if n_records == 0:
        raise ValueError("no records")
    columns = tuple(
        ColumnSpec(
            name=key,
            type=types[key] or STRING,  # all-null columns default to string
            nullable=saw_null[key] or present[key] < n_records,
        )
        for key in order
    )
    return TableSchema(columns)


def coerce(value, col_type: str):
    """Coerce one JSON value to a column type.

    Returns (ok, coerced).  String columns absorb anything via canonical
    stringification; other types reject non-conforming values so the row
    can be counted instead of silently corrupted.
    """
    if value is None:
        return True, None
    if col_type == STRING:
        if isinstance(value, str):
            return True, value
        return True, canonical_json(value)
    if col_type == JSON:
        return True, canonical_json(value)
    if col_type == BOOL:
        return (True, value) if isinstance(value, bool) else (False, None)
    if col_type == INT64:
        if isinstance(value, bool) or not isinstance(value, int):
            return False, None
        if not _INT64_MIN <= value <= _INT64_MAX:
            return False, None
        return True, value
    if col_type == FLOAT64:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False, None
        return True, float(value)
    if col_type == LIST_STRING:
        if isinstance(value, list) and all(isinstance(item, str) for item in value):
            return True, value
        return False, None
    raise ValueError(f"unknown column type {col_type!r}")
