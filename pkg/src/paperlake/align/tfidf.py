"""Character n-gram TF-IDF cosine alignment.

Features are 2-to-4-character n-grams taken inside word boundaries,
each word padded with one space per side.  Document frequencies come
from the term strings (labels and synonyms, one document each); topic
queries reuse the same vocabulary and idf.  Weights are
tf * (ln((1+N)/(1+df)) + 1), L2-normalized, scored by cosine.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

import numpy as np
from scipy import sparse

from ..ingest import OntologyTerm
from .text import normalize_label
from .types import Mapping, Topic


def char_wb_ngrams(text: str, n_min: int = 2, n_max: int = 4) -> list[str]:
    """Character n-grams within word boundaries of a normalized string.

    Each word is padded with one space on each side; an n-gram exists
    only when the padded word is at least n characters long.
    """
    grams: list[str] = []
    for word in text.split():
        padded = f" {word} "
        length = len(padded)
        for n in range(n_min, n_max + 1):
            if length < n:
                break
            for i in range(length - n + 1):
                grams.append(padded[i : i + n])
    return grams


class CharTfidfIndex:
    """Sparse TF-IDF index over one ontology's term strings."""

    def __init__(self, terms: Sequence[OntologyTerm]):
        self.doc_owner: list[int] = []  # doc index -> term index
        self.doc_text: list[str] = []  # original (unnormalized) string
        docs_grams: list[Counter] = []
        self.terms = list(terms)
        for t_idx, term in enumerate(self.terms):
            for text in ([term.label] if term.label else []) + list(term.synonyms):
                grams = char_wb_ngrams(normalize_label(text))
                if not grams:
                    continue
                self.doc_owner.append(t_idx)
                self.doc_text.append(text)
                docs_grams.append(Counter(grams))
        if not docs_grams:
            raise ValueError("term corpus is empty")
        vocab: dict[str, int] = {}
        df = Counter()
        for counts in docs_grams:
            for gram in counts:
                if gram not in vocab:
                    vocab[gram] = len(vocab)
                df[gram] += 1
        self.vocab = vocab
        n_docs = len(docs_grams)
        self.idf = np.zeros(len(vocab))
        for gram, col in vocab.items():
            self.idf[col] = math.log((1.0 + n_docs) / (1.0 + df[gram])) + 1.0

        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for counts in docs_grams:
            row = sorted((vocab[g], tf) for g, tf in counts.items())
            weights = np.array([tf * self.idf[col] for col, tf in row])
            norm = math.sqrt(float(np.dot(weights, weights)))
            indices.extend(col for col, _ in row)
            data.extend(weights / norm)
            indptr.append(len(indices))
        self.matrix = sparse.csr_matrix(
            (data, indices, indptr), shape=(n_docs, len(vocab))
        )

    def query_vector(self, text: str) -> np.ndarray | None:
        counts = Counter(char_wb_ngrams(normalize_label(text)))
        vec = np.zeros(len(self.vocab))
        for gram, tf in counts.items():
            col = self.vocab.get(gram)
            if col is not None:
                vec[col] = tf * self.idf[col]
        norm = math.sqrt(float(np.dot(vec, vec)))
        if norm == 0.0:
            return None
        return vec / norm

    def scores(self, text: str) -> np.ndarray | None:
        """Cosine of the query against every document; None on zero vector."""
        vec = self.query_vector(text)
        if vec is None:
            return None
        return self.matrix @ vec


def tfidf_match(
    topics: Sequence[Topic],
    terms: Sequence[OntologyTerm],
    threshold: float,
) -> list[Mapping]:
    """Mappings whose best per-term cosine reaches the threshold."""
    index = CharTfidfIndex(terms)
    mappings: list[Mapping] = []
    for topic in topics:
        doc_scores = index.scores(topic.display_name)
        if doc_scores is None:
            continue
        best: dict[int, tuple[float, str]] = {}
        for doc, score in enumerate(doc_scores):
            owner = index.doc_owner[doc]
            if owner not in best or score > best[owner][0]:
                best[owner] = (float(score), index.doc_text[doc])
        for owner in sorted(best):
            score, text = best[owner]
            if score >= threshold:
                term = index.terms[owner]
                mappings.append(
                    Mapping(topic.topic_id, term.term_id, term.ontology, score,
                            "tfidf", text)
                )
    return mappings
