"""Format-specific converters from source dumps to columnar tables."""

from __future__ import annotations

from pathlib import Path

import pyarrow as pa

from ..tableio import write_table
from .base import ConversionReport, HierarchyEdge, OntologyTerm
from .csvfile import convert_csv
from .jsonl import convert_jsonl
from .ntriples import SkosResult, parse_skos_ntriples
from .obo import OboResult, parse_obo
from .ontology_csv import CsvOntologyResult, parse_ontology_csv
from .schema import TableSchema, discover_schema

__all__ = [
    "ConversionReport",
    "HierarchyEdge",
    "OntologyTerm",
    "TableSchema",
    "convert_csv",
    "convert_jsonl",
    "discover_schema",
    "parse_obo",
    "parse_ontology_csv",
    "parse_skos_ntriples",
    "write_ontology_tables",
]


def terms_to_table(terms: list[OntologyTerm]) -> pa.Table:
    return pa.table(
        {
            "term_id": pa.array([t.term_id for t in terms], pa.string()),
            "ontology": pa.array([t.ontology for t in terms], pa.string()),
            "label": pa.array([t.label for t in terms], pa.string()),
            "synonyms": pa.array([t.synonyms for t in terms], pa.list_(pa.string())),
            "obsolete": pa.array([t.obsolete for t in terms], pa.bool_()),
        }
    )


def edges_to_table(edges: list[HierarchyEdge]) -> pa.Table:
    return pa.table(
        {
            "child_id": pa.array([e.child_id for e in edges], pa.string()),
            "parent_id": pa.array([e.parent_id for e in edges], pa.string()),
            "relation": pa.array([e.relation for e in edges], pa.string()),
        }
    )


def write_ontology_tables(
    result: OboResult | SkosResult | CsvOntologyResult,
    out_dir: str | Path,
    ontology: str,
) -> dict[str, int]:
    """Write terms/hierarchy (and xrefs, when present) under one schema dir."""
    out_dir = Path(out_dir)
    write_table(terms_to_table(result.terms), out_dir / "terms.parquet", source=ontology)
    write_table(edges_to_table(result.edges), out_dir / "hierarchy.parquet", source=ontology)
    counts = {"terms": len(result.terms), "hierarchy": len(result.edges)}
    xrefs = getattr(result, "xrefs", None)
    if xrefs:
        table = pa.table(
            {
                "term_id": pa.array([x[0] for x in xrefs], pa.string()),
                "xref": pa.array([x[1] for x in xrefs], pa.string()),
            }
        )
        write_table(table, out_dir / "xrefs.parquet", source=ontology)
        counts["xrefs"] = len(xrefs)
    return counts
