"""Parser for OBO 1.2 flat files.

Only the stanza keys the lake needs are handled: `id`, `name`,
`synonym`, `is_a`, `is_obsolete`, and optionally `xref`.  Non-Term
stanzas ([Typedef] etc.) are ignored; stanzas without an `id` are
rejected and counted, never fatal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .base import HierarchyEdge, OntologyTerm

_SYNONYM_RE = re.compile(r'^"((?:[^"\\]|\\.)*)"')


@dataclass
class OboResult:
    terms: list[OntologyTerm] = field(default_factory=list)
    edges: list[HierarchyEdge] = field(default_factory=list)
    xrefs: list[tuple[str, str]] = field(default_factory=list)  # (term_id, xref)
    rejected_stanzas: int = 0


def _unescape(text: str) -> str:
    return text.replace('\\"', '"').replace("\\\\", "\\")


def _strip_comment(value: str) -> str:
    return value.split("!", 1)[0].strip()


def parse_obo(path: str | Path, ontology: str) -> OboResult:
    result = OboResult()
    seen_ids: set[str] = set()
    stanza_type: str | None = None  # None = header section
    lines: list[str] = []

    def flush() -> None:
        if stanza_type != "Term":
            return
        term_id: str | None = None
        name = ""
        synonyms: list[str] = []
        obsolete = False
        parents: list[str] = []
        xrefs: list[str] = []
        for line in lines:
            key, _, value = line.partition(":")
            key = key.strip()
            value = value.strip()
            if key == "id" and term_id is None:
                term_id = _strip_comment(value)
            elif key == "name":
                name = _strip_comment(value)
            elif key == "synonym":
                match = _SYNONYM_RE.match(value)
                if match:
                    synonyms.append(_unescape(match.group(1)))
            elif key == "is_a":
                target = _strip_comment(value)
                if target:
                    parents.append(target.split()[0])
            elif key == "is_obsolete":
                obsolete = _strip_comment(value).lower() == "true"
            elif key == "xref":
                target = _strip_comment(value)
                if target:
                    xrefs.append(target.split()[0])
        if not term_id or term_id in seen_ids:
            result.rejected_stanzas += 1
            return
        seen_ids.add(term_id)
        result.terms.append(
            OntologyTerm(term_id, ontology, name, synonyms, obsolete)
        )
        for parent in parents:
            if parent != term_id:  # self-loops are never meaningful
                result.edges.append(HierarchyEdge(term_id, parent, "is_a"))
        result.xrefs.extend((term_id, x) for x in xrefs)

    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            stripped = line.strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                flush()
                stanza_type = stripped[1:-1]
                lines = []
            elif stanza_type is not None and stripped:
                lines.append(stripped)
        flush()
    return result
