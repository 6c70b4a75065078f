"""Reader for ontologies distributed as plain CSV term lists.

Expected columns: ``term_id`` and ``label`` (required), ``synonyms``
(optional, pipe-separated) and ``parent_id`` (optional, gives an is_a
edge).  Extra columns are ignored.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .base import HierarchyEdge, OntologyTerm


@dataclass
class CsvOntologyResult:
    terms: list[OntologyTerm] = field(default_factory=list)
    edges: list[HierarchyEdge] = field(default_factory=list)
    rejected_rows: int = 0


def parse_ontology_csv(
    path: str | Path, ontology: str, *, synonym_sep: str = "|"
) -> CsvOntologyResult:
    result = CsvOntologyResult()
    seen: set[str] = set()
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or "term_id" not in reader.fieldnames:
            raise ValueError(f"{path}: ontology CSV needs a term_id column")
        for row in reader:
            term_id = (row.get("term_id") or "").strip()
            if not term_id or term_id in seen:
                result.rejected_rows += 1
                continue
            seen.add(term_id)
            synonyms = [
                s.strip()
                for s in (row.get("synonyms") or "").split(synonym_sep)
                if s.strip()
            ]
            obsolete = (row.get("obsolete") or "").strip().lower() == "true"
            result.terms.append(
                OntologyTerm(term_id, ontology, (row.get("label") or "").strip(), synonyms, obsolete)
            )
            parent = (row.get("parent_id") or "").strip()
            if parent and parent != term_id:
                result.edges.append(HierarchyEdge(term_id, parent, "is_a"))
    return result
