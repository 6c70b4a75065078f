"""DOI normalization and cross-source record linkage.

DOIs are the primary linkage key but sources store them in incompatible
shapes (URL prefixes, mixed case).  Everything here reduces them to one
canonical lowercase, prefix-free form and builds the xref layer on top:
`doi_map` (per-source normalized identifiers), `unified_papers` (one row
per DOI with per-source metrics and coverage flags), temporal guardrail
flags, and source-combination counts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import pyarrow as pa

from .errors import LakeError
from .tableio import read_table

# Crossref registrant codes are 4-9 digits; the suffix is any
# non-whitespace run.  Anchored on both ends.
DOI_PATTERN = re.compile(r"10\.\d{4,9}/\S+")

# One leading prefix is stripped case-insensitively.  Real dumps carry
# all of these variants even though most sources document only one.
_PREFIXES = (
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi:",
)


def normalize_doi(raw: str | None) -> str | None:
    """Canonicalize one raw DOI; None when it cannot be a DOI.

    Trims whitespace, strips one known prefix, lowercases, then checks
    the canonical pattern.  Idempotent, and never raises.
    """
    if raw is None:
        return None
    text = raw.strip()
    lowered = text.lower()
    for prefix in _PREFIXES:
        if lowered.startswith(prefix):
            text = text[len(prefix):]
            break
    text = text.lower()
    if DOI_PATTERN.fullmatch(text):
        return text
    return None


@dataclass
class SourceSpec:
    """One integrated data source: where its table lives and which
    columns feed the unified layer."""

    name: str
    table_path: str
    doi_column: str
    id_column: str | None = None
    id_pattern: str | None = None
    year_column: str | None = None
    citation_column: str | None = None
    extra_columns: tuple[str, ...] = ()
    flag: str | None = None  # unified coverage flag fed by this source


@dataclass
class LinkReport:
    """Bookkeeping from doi_map/unified construction."""

    excluded_rows: dict[str, int] = field(default_factory=dict)  # invalid DOIs
    duplicate_rows: dict[str, int] = field(default_factory=dict)  # repeat DOIs


def _load_source(source: SourceSpec, columns: list[str]) -> pa.Table:
    path = Path(source.table_path)
    if not path.is_file():
        raise LakeError(f"source {source.name!r}: missing table {path}")
    table = read_table(path)
    for col in columns:
        if col not in table.column_names:
            raise LakeError(
                f"source {source.name!r}: table {path} has no column {col!r}"
            )
    return table


def build_doi_map(
    registry: list[SourceSpec], report: LinkReport | None = None
) -> pa.Table:
    """Union of per-source (doi, source, native_id) rows, sorted by (doi, source).

    Rows whose raw DOI does not normalize are excluded and counted in
    the report; a missing table or column is a hard error naming the
    source.
    """
    report = report if report is not None else LinkReport()
    rows: list[tuple[str, str, str | None]] = []
    for source in registry:
        wanted = [source.doi_column] + ([source.id_column] if source.id_column else [])
        table = _load_source(source, wanted)
        raw_dois = table.column(source.doi_column).to_pylist()
        native_ids = (
            table.column(source.id_column).to_pylist()
            if source.id_column
            else [None] * len(raw_dois)
        )
        excluded = 0
        for raw, native in zip(raw_dois, native_ids):
            doi = normalize_doi(raw if isinstance(raw, str) or raw is None else str(raw))
            if doi is None:
                excluded += 1
                continue
            rows.append((doi, source.name, None if native is None else str(native)))
        report.excluded_rows[source.name] = excluded
    rows.sort(key=lambda r: (r[0], r[1]))
    return pa.table(
        {
            "doi": pa.array([r[0] for r in rows], pa.string()),
            "source": pa.array([r[1] for r in rows], pa.string()),
            "native_id": pa.array([r[2] for r in rows], pa.string()),
        }
    )


def _parse_int(value) -> int | None:
    if value is None or isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        try:
            return int(value) if value == int(value) else None
        except (ValueError, OverflowError):  # NaN / inf
            return None
    try:
        return int(str(value).strip())
    except ValueError:
        return None


def _parse_float(value) -> float | None:
    if value is None or isinstance(value, bool):
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def materialize_unified(
    doi_map: pa.Table,
    registry: list[SourceSpec],
    *,
    year_precedence: tuple[str, ...] = ("openalex", "s2ag", "sciscinet"),
    report: LinkReport | None = None,
) -> pa.Table:
    """One row per distinct DOI with coverage flags and per-source columns.

    Coverage flags are set from doi_map membership; per-source values
    come from the first row a source holds for the DOI (duplicates are
    counted).  `fwci`/`cd5` extra columns land in the fixed core; other
    extras pass through under their own names.  Output sorted by doi.
    """
    report = report if report is not None else LinkReport()
    by_name = {s.name: s for s in registry}
    membership: dict[str, set[str]] = {s.name: set() for s in registry}
    for doi, src in zip(
        doi_map.column("doi").to_pylist(), doi_map.column("source").to_pylist()
    ):
        if src in membership:
            membership[src].add(doi)

    dois = sorted(set().union(*membership.values()) if membership else set())
    index = {doi: i for i, doi in enumerate(dois)}
    n = len(dois)

    # Per-source first-occurrence rows for the value columns.
    source_values: dict[str, dict[str, dict]] = {}
    for source in registry:
        value_cols = [
            c
            for c in (
                [source.year_column, source.citation_column] + list(source.extra_columns)
            )
            if c
        ]
        if not value_cols:
            report.duplicate_rows.setdefault(source.name, 0)
            continue
        table = _load_source(source, [source.doi_column] + value_cols)
        raw_dois = table.column(source.doi_column).to_pylist()
        col_data = {c: table.column(c).to_pylist() for c in value_cols}
        first: dict[str, dict] = {}
        duplicates = 0
        for i, raw in enumerate(raw_dois):
            doi = normalize_doi(raw if isinstance(raw, str) or raw is None else str(raw))
            if doi is None:
                continue
            if doi in first:
                duplicates += 1
                continue
            first[doi] = {c: col_data[c][i] for c in value_cols}
        source_values[source.name] = first
        report.duplicate_rows[source.name] = duplicates

    columns: dict[str, pa.Array] = {"doi": pa.array(dois, pa.string())}

    years: list[int | None] = [None] * n
    for src_name in year_precedence:
        source = by_name.get(src_name)
        if source is None or not source.year_column:
            continue
        values = source_values.get(src_name, {})
        for doi, row in values.items():
            i = index[doi]
            if years[i] is None:
                years[i] = _parse_int(row.get(source.year_column))
    columns["year"] = pa.array(years, pa.int64())

    for source in registry:
        if not source.citation_column:
            continue
        values = source_values.get(source.name, {})
        cites: list[int | None] = [None] * n
        for doi, row in values.items():
            cites[index[doi]] = _parse_int(row.get(source.citation_column))
        columns[f"citations_{source.name}"] = pa.array(cites, pa.int64())

    # Fixed metric core, fed by extras named fwci / cd5.
    for metric in ("fwci", "cd5"):
        data: list[float | None] = [None] * n
        for source in registry:
            if metric not in source.extra_columns:
                continue
            values = source_values.get(source.name, {})
            for doi, row in values.items():
                i = index[doi]
                if data[i] is None:
                    data[i] = _parse_float(row.get(metric))
        columns[metric] = pa.array(data, pa.float64())

    for source in registry:
        for extra in source.extra_columns:
            if extra in ("fwci", "cd5"):
                continue
            if extra in columns:
                raise LakeError(
                    f"pass-through column {extra!r} from source {source.name!r} "
                    "collides with an existing unified column"
                )
            values = source_values.get(source.name, {})
            data = [None] * n
            for doi, row in values.items():
                data[index[doi]] = row.get(extra)
            if all(v is None for v in data):
                columns[extra] = pa.array(data, pa.string())
            else:
                columns[extra] = pa.array(data)

    for source in registry:
        if not source.flag:
            continue
        members = membership[source.name]
        columns[source.flag] = pa.array([doi in members for doi in dois], pa.bool_())

    return pa.table(columns)


def compute_temporal_flags(
    unified: pa.Table,
    *,
    sciscinet_year: int = 2022,
    ros_year: int = 2023,
    sciscinet_flag: str = "has_sciscinet",
    patent_flag: str = "has_patent",
) -> pa.Table:
    """Per-paper guardrail flags for metrics beyond a source's horizon."""
    if sciscinet_year <= 0 or ros_year <= 0:
        raise ValueError("cutoff years must be positive")
    dois = unified.column("doi").to_pylist()
    years = unified.column("year").to_pylist()
    has_ssn = (
        unified.column(sciscinet_flag).to_pylist()
        if sciscinet_flag in unified.column_names
        else [False] * len(dois)
    )
    has_pat = (
        unified.column(patent_flag).to_pylist()
        if patent_flag in unified.column_names
        else [False] * len(dois)
    )
    stale = [
        year is not None and year > sciscinet_year and bool(ssn)
        for year, ssn in zip(years, has_ssn)
    ]
    incomplete = [
        year is not None and year > ros_year and bool(pat)
        for year, pat in zip(years, has_pat)
    ]
    missing = [year is None for year in years]
    return pa.table(
        {
            "doi": pa.array(dois, pa.string()),
            "sciscinet_metrics_stale": pa.array(stale, pa.bool_()),
            "ros_coverage_incomplete": pa.array(incomplete, pa.bool_()),
            "year_missing": pa.array(missing, pa.bool_()),
        }
    )


def intersection_counts(unified: pa.Table, registry: list[SourceSpec]) -> pa.Table:
    """Papers per observed combination of coverage flags.

    Labels join source names with '+' in registry order; counts always
    partition the unified row total.  Rows sorted by descending count,
    then label.
    """
    flagged = [(s.name, s.flag) for s in registry if s.flag and s.flag in unified.column_names]
    flag_cols = [unified.column(flag).to_pylist() for _, flag in flagged]
    tallies: dict[tuple[bool, ...], int] = {}
    for combo in zip(*flag_cols) if flag_cols else ():
        tallies[combo] = tallies.get(combo, 0) + 1
    rows = []
    for combo, count in tallies.items():
        names = [name for (name, _), on in zip(flagged, combo) if on]
        rows.append(("+".join(names) if names else "none", count))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return pa.table(
        {
            "combination": pa.array([r[0] for r in rows], pa.string()),
            "count": pa.array([r[1] for r in rows], pa.int64()),
        }
    )


def source_coverage(unified: pa.Table, registry: list[SourceSpec]) -> list[dict]:
    """Pairwise overlap counts with both ratio conventions.

    For each (row, col) source pair: n_both, the share of col-source
    papers also in the row source, and the share of all papers carrying
    both flags.  The table's denominator conventions read ambiguously in
    the wild, so both are emitted alongside the raw counts.
    """
    flagged = [(s.name, s.flag) for s in registry if s.flag and s.flag in unified.column_names]
    total = unified.num_rows
    flags = {name: unified.column(flag).to_pylist() for name, flag in flagged}
    out = []
    for row_name, _ in flagged:
        for col_name, _ in flagged:
            both = sum(
                1 for a, b in zip(flags[row_name], flags[col_name]) if a and b
            )
            n_col = sum(1 for b in flags[col_name] if b)
            out.append(
                {
                    "row_source": row_name,
                    "col_source": col_name,
                    "n_both": both,
                    "pct_of_col": (both / n_col) if n_col else None,
                    "pct_of_all": (both / total) if total else None,
                }
            )
    return out
