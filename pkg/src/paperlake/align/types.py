"""Domain records for topic-to-ontology alignment."""

from __future__ import annotations

from dataclasses import dataclass

METHODS = ("exact", "jaro_winkler", "tfidf", "bm25", "embedding")


@dataclass(frozen=True)
class Topic:
    """Leaf topic of a four-level taxonomy (domain > field > subfield > topic)."""

    topic_id: str
    display_name: str
    subfield: str = ""
    field: str = ""
    domain: str = ""


@dataclass
class Mapping:
    topic_id: str
    term_id: str
    ontology: str
    similarity: float
    method: str
    matched_text: str = ""
    tier: str | None = None

    def __post_init__(self) -> None:
        # Guard against float drift: similarities are defined on [0, 1].
        self.similarity = min(1.0, max(0.0, self.similarity))

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.topic_id, self.term_id, self.ontology)


def assign_tier(similarity: float) -> str | None:
    """Quality tier for one similarity score; None means dropped."""
    if similarity >= 0.95:
        return "exact"
    if similarity >= 0.85:
        return "high"
    if similarity >= 0.65:
        return "all"
    return None
