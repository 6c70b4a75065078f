"""Exact-string and Jaro-Winkler alignment.

Exact matching is the precision-first route for very large ontologies;
Jaro-Winkler is the classic edit-style baseline.  Both treat a term's
label and synonyms as equally matchable strings and keep the best one.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..ingest import OntologyTerm
from .text import normalize_label
from .types import Mapping, Topic


def _term_strings(term: OntologyTerm) -> list[str]:
    strings = [term.label] if term.label else []
    strings.extend(term.synonyms)
    return strings


def exact_match(topics: Sequence[Topic], terms: Iterable[OntologyTerm]) -> list[Mapping]:
    """Mappings where the normalized topic name equals a term label or synonym."""
    index: dict[str, list[tuple[str, str, str]]] = {}
    for term in terms:
        for text in _term_strings(term):
            index.setdefault(normalize_label(text), []).append(
                (term.term_id, term.ontology, text)
            )
    mappings: list[Mapping] = []
    for topic in topics:
        hits = index.get(normalize_label(topic.display_name))
        if not hits:
            continue
        seen: set[str] = set()
        for term_id, ontology, text in hits:
            if term_id in seen:
                continue
            seen.add(term_id)
            mappings.append(Mapping(topic.topic_id, term_id, ontology, 1.0, "exact", text))
    return mappings


def jaro_winkler(a: str, b: str) -> float:
    """Jaro similarity with the Winkler common-prefix boost (p=0.1, max 4).

    Match window is floor(max(|a|,|b|)/2) - 1.  Symmetric; 1.0 iff the
    strings are equal (two empty strings count as equal by convention).
    """
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    la, lb = len(a), len(b)
    window = max(la, lb) // 2 - 1
    if window < 0:
        window = 0
    matched_a = [False] * la
    matched_b = [False] * lb
    matches = 0
    for i, ch in enumerate(a):
        lo = max(0, i - window)
        hi = min(lb, i + window + 1)
        for j in range(lo, hi):
            if not matched_b[j] and b[j] == ch:
                matched_a[i] = True
                matched_b[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    b_seq = [b[j] for j in range(lb) if matched_b[j]]
    k = half_transpositions = 0
    for i in range(la):
        if matched_a[i]:
            if a[i] != b_seq[k]:
                half_transpositions += 1
            k += 1
    transpositions = half_transpositions // 2
    jaro = (
        matches / la + matches / lb + (matches - transpositions) / matches
    ) / 3.0
    prefix = 0
    for ca, cb in zip(a, b):
        if ca != cb or prefix == 4:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


def jw_match(
    topics: Sequence[Topic],
    terms: Sequence[OntologyTerm],
    threshold: float = 0.90,
) -> list[Mapping]:
    """All (topic, term) pairs whose best Jaro-Winkler score reaches the threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    prepared = [
        (term, [(normalize_label(s), s) for s in _term_strings(term)]) for term in terms
    ]
    mappings: list[Mapping] = []
    for topic in topics:
        query = normalize_label(topic.display_name)
        for term, strings in prepared:
            best = -1.0
            best_text = ""
            for normalized, original in strings:
                score = jaro_winkler(query, normalized)
                if score > best:
                    best = score
                    best_text = original
            if best >= threshold:
                mappings.append(
                    Mapping(topic.topic_id, term.term_id, term.ontology, best,
                            "jaro_winkler", best_text)
                )
    return mappings
