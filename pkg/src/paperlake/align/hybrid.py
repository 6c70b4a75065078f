"""Per-ontology method routing and the final topic-ontology map.

Large ontologies route to exact matching for precision; smaller ones
can afford ranked lexical or embedding search.  The union of all
methods is tiered, deduplicated, and written as one sorted table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import pyarrow as pa

from ..errors import ConfigError, LakeError
from ..ingest import OntologyTerm
from .bm25 import bm25_match
from .embedding import EmbeddingSet, embed_nn_match
from .lexical import exact_match, jw_match
from .tfidf import tfidf_match
from .types import METHODS, Mapping, Topic, assign_tier

TIER_THRESHOLDS = (("exact", 0.95), ("high", 0.85), ("all", 0.65))


@dataclass(frozen=True)
class MethodEntry:
    ontology: str
    method: str
    threshold: float
    top_k: int = 20

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"unknown alignment method {self.method!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold out of range for {self.ontology!r}")


def run_hybrid(
    topics: Sequence[Topic],
    ontology_terms: dict[str, list[OntologyTerm]],
    registry: Sequence[MethodEntry],
    *,
    topic_vectors: EmbeddingSet | None = None,
    term_vectors: dict[str, EmbeddingSet] | None = None,
) -> list[Mapping]:
    """Dispatch each ontology to its configured method and merge.

    Obsolete terms are excluded from the matchable set.  One row per
    (topic, term, ontology, method) with the max score; rows below the
    lowest tier are dropped.  Output sorted by (topic, ontology,
    descending similarity, term).
    """
    routed = {entry.ontology for entry in registry}
    missing = sorted(set(ontology_terms) - routed)
    if missing:
        raise ConfigError(f"ontologies without a method entry: {missing}")
    merged: dict[tuple[str, str, str, str], Mapping] = {}
    for entry in registry:
        terms = [t for t in ontology_terms.get(entry.ontology, []) if not t.obsolete]
        if not terms and entry.method != "embedding":
            continue
        if entry.method == "exact":
            found = exact_match(topics, terms)
        elif entry.method == "jaro_winkler":
            found = jw_match(topics, terms, entry.threshold)
        elif entry.method == "tfidf":
            found = tfidf_match(topics, terms, entry.threshold)
        elif entry.method == "bm25":
            found = bm25_match(
                topics, terms, top_k=entry.top_k, threshold=entry.threshold
            )
        else:  # embedding
            if topic_vectors is None or not term_vectors or entry.ontology not in term_vectors:
                raise LakeError(
                    f"ontology {entry.ontology!r} routes to embeddings but no "
                    "vector file is available"
                )
            found = embed_nn_match(
                topic_vectors,
                term_vectors[entry.ontology],
                entry.ontology,
                threshold=entry.threshold,
                top_k=entry.top_k,
            )
        for mapping in found:
            key = (mapping.topic_id, mapping.term_id, mapping.ontology, mapping.method)
            kept = merged.get(key)
            if kept is None or mapping.similarity > kept.similarity:
                merged[key] = mapping

    final: list[Mapping] = []
    for mapping in merged.values():
        mapping.tier = assign_tier(mapping.similarity)
        if mapping.tier is not None:
            final.append(mapping)
    final.sort(key=lambda m: (m.topic_id, m.ontology, -m.similarity, m.term_id))
    return final


def term_label_rows(
    ontology: str, terms: Sequence[OntologyTerm]
) -> list[tuple[str, str, str, str]]:
    """(row_id, text, ontology, term_id) per matchable string.

    This is the row layout of the `align/labels_terms` table; the
    embedding exporter writes one vector per row_id, which is how
    synonym vectors stay attached to their terms.
    """
    rows = []
    for term in terms:
        if term.obsolete:
            continue
        strings = ([term.label] if term.label else []) + list(term.synonyms)
        for k, text in enumerate(strings):
            rows.append((f"{ontology}|{term.term_id}|{k}", text, ontology, term.term_id))
    return rows


def coverage_summary(mappings: Sequence[Mapping], n_topics: int) -> list[dict]:
    """Cumulative mapping and topic counts per quality tier."""
    rows = []
    for tier, minimum in TIER_THRESHOLDS:
        kept = [m for m in mappings if m.similarity >= minimum]
        topics_covered = len({m.topic_id for m in kept})
        rows.append(
            {
                "tier": tier,
                "min_similarity": minimum,
                "n_mappings": len(kept),
                "n_topics": topics_covered,
                "pct_topics": (topics_covered / n_topics) if n_topics else None,
            }
        )
    return rows


def mappings_to_table(mappings: Sequence[Mapping]) -> pa.Table:
    return pa.table(
        {
            "topic_id": pa.array([m.topic_id for m in mappings], pa.string()),
            "term_id": pa.array([m.term_id for m in mappings], pa.string()),
            "ontology": pa.array([m.ontology for m in mappings], pa.string()),
            "similarity": pa.array([m.similarity for m in mappings], pa.float64()),
            "method": pa.array([m.method for m in mappings], pa.string()),
            "tier": pa.array([m.tier for m in mappings], pa.string()),
            "matched_text": pa.array([m.matched_text for m in mappings], pa.string()),
        }
    )


def table_to_mappings(table: pa.Table) -> list[Mapping]:
    rows = table.to_pylist()
    return [
        Mapping(
            topic_id=r["topic_id"],
            term_id=r["term_id"],
            ontology=r["ontology"],
            similarity=r["similarity"],
            method=r.get("method", ""),
            matched_text=r.get("matched_text", "") or "",
            tier=r.get("tier"),
        )
        for r in rows
    ]
