"""Okapi BM25 alignment over whitespace-tokenized term strings.

Each term string (label or synonym) is one document.  Raw scores use
idf = ln(1 + (N-df+0.5)/(df+0.5)) with the standard saturation and
length normalization; per topic, the top-k terms are kept and their raw
scores min-max normalized to [0, 1] inside that result list.
"""

from __future__ import annotations

from collections import Counter
from math import log
from typing import Sequence

from ..ingest import OntologyTerm
from .text import normalize_label
from .types import Mapping, Topic


class Bm25Index:
    def __init__(self, terms: Sequence[OntologyTerm], k1: float = 1.2, b: float = 0.75):
        if k1 <= 0:
            raise ValueError("k1 must be positive")
        if not 0.0 <= b <= 1.0:
            raise ValueError("b must be in [0, 1]")
        self.k1 = k1
        self.b = b
        self.terms = list(terms)
        self.doc_owner: list[int] = []
        self.doc_text: list[str] = []
        self.doc_len: list[int] = []
        self.postings: dict[str, list[tuple[int, int]]] = {}  # token -> [(doc, tf)]
        for t_idx, term in enumerate(self.terms):
            for text in ([term.label] if term.label else []) + list(term.synonyms):
                tokens = normalize_label(text).split()
                if not tokens:
                    continue
                doc = len(self.doc_owner)
                self.doc_owner.append(t_idx)
                self.doc_text.append(text)
                self.doc_len.append(len(tokens))
                for token, tf in Counter(tokens).items():
                    self.postings.setdefault(token, []).append((doc, tf))
        self.n_docs = len(self.doc_owner)
        if self.n_docs == 0:
            raise ValueError("term corpus is empty")
        self.avg_len = sum(self.doc_len) / self.n_docs
        self.idf = {
            token: log(1.0 + (self.n_docs - len(plist) + 0.5) / (len(plist) + 0.5))
            for token, plist in self.postings.items()
        }

    def doc_scores(self, query_tokens: Sequence[str]) -> dict[int, float]:
        """Raw Okapi score per document sharing at least one query token.

        Repeated query tokens accumulate (multiset query semantics).
        """
        scores: dict[int, float] = {}
        for token in query_tokens:
            plist = self.postings.get(token)
            if not plist:
                continue
            idf = self.idf[token]
            for doc, tf in plist:
                denom = tf + self.k1 * (
                    1.0 - self.b + self.b * self.doc_len[doc] / self.avg_len
                )
                scores[doc] = scores.get(doc, 0.0) + idf * tf * (self.k1 + 1.0) / denom
        return scores

    def term_scores(self, query_tokens: Sequence[str]) -> dict[int, tuple[float, str]]:
        """Best raw score (and matching string) per term."""
        best: dict[int, tuple[float, str]] = {}
        for doc, score in self.doc_scores(query_tokens).items():
            owner = self.doc_owner[doc]
            if owner not in best or score > best[owner][0]:
                best[owner] = (score, self.doc_text[doc])
        return best


def bm25_match(
    topics: Sequence[Topic],
    terms: Sequence[OntologyTerm],
    *,
    k1: float = 1.2,
    b: float = 0.75,
    top_k: int = 20,
    threshold: float = 0.0,
) -> list[Mapping]:
    """Top-k BM25 mappings per topic, min-max normalized within each list.

    A single-entry list normalizes to 1.0; so does a degenerate list
    whose raw scores are all equal.
    """
    index = Bm25Index(terms, k1=k1, b=b)
    mappings: list[Mapping] = []
    for topic in topics:
        tokens = normalize_label(topic.display_name).split()
        per_term = index.term_scores(tokens)
        if not per_term:
            continue
        ranked = sorted(
            per_term.items(),
            key=lambda item: (-item[1][0], index.terms[item[0]].term_id),
        )[:top_k]
        raw = [score for _, (score, _) in ranked]
        lo, hi = min(raw), max(raw)
        span = hi - lo
        for owner, (score, text) in ranked:
            normalized = 1.0 if span == 0.0 else (score - lo) / span
            if normalized >= threshold:
                term = index.terms[owner]
                mappings.append(
                    Mapping(topic.topic_id, term.term_id, term.ontology,
                            normalized, "bm25", text)
                )
    return mappings
