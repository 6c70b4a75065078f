"""Shared record types for the ingestion layer."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ConversionReport:
    """Outcome of one dump-to-Parquet conversion.

    Invariant: rows_read == rows_written + rows_rejected.  Malformed
    input never aborts a conversion; it is counted here instead.
    """

    rows_read: int = 0
    rows_written: int = 0
    rows_rejected: int = 0
    reject_reasons: dict[str, int] = field(default_factory=dict)
    output_path: str = ""

    def reject(self, reason: str) -> None:
        self.rows_rejected += 1
        self.reject_reasons[reason] = self.reject_reasons.get(reason, 0) + 1

    def consistent(self) -> bool:
        return self.rows_read == self.rows_written + self.rows_rejected


@dataclass
class OntologyTerm:
    term_id: str
    ontology: str
    label: str
    synonyms: list[str] = field(default_factory=list)
    obsolete: bool = False


@dataclass(frozen=True)
class HierarchyEdge:
    child_id: str
    parent_id: str
    relation: str
