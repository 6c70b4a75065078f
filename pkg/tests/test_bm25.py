"""Okapi BM25 against the hand-evaluated formula."""

import math

import pytest

from paperlake.align import bm25_match
from paperlake.align.bm25 import Bm25Index
from paperlake.align.types import Topic
from paperlake.ingest import OntologyTerm

K1 = 1.2
B = 0.75


def _terms(labels):
    return [OntologyTerm(f"X:{i}", "x", label) for i, label in enumerate(labels)]


def hand_idf(n_docs, df):
    return math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))


def hand_score(idf, tf, doc_len, avg_len, k1=K1, b=B):
    return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc_len / avg_len))


def test_single_token_query_hand_formula():
    # docs: ["machine learning", "deep learning systems", "soil"]
    # query "learning": df=2, N=3, avgdl = (2+3+1)/3 = 2
    labels = ["machine learning", "deep learning systems", "soil"]
    index = Bm25Index(_terms(labels))
    scores = index.doc_scores(["learning"])
    idf = hand_idf(3, 2)
    assert scores[0] == pytest.approx(hand_score(idf, 1, 2, 2.0), abs=1e-9)
    assert scores[1] == pytest.approx(hand_score(idf, 1, 3, 2.0), abs=1e-9)
    assert 2 not in scores
    assert scores[0] > scores[1]  # shorter doc ranks first


def test_exact_unique_token_ranks_first():
    # doc lengths 1, 2, 2 -> avgdl = 5/3; "soil" appears in one doc
    labels = ["soil", "machine learning", "gene expression"]
    index = Bm25Index(_terms(labels))
    scores = index.doc_scores(["soil"])
    assert list(scores) == [0]
    assert scores[0] == pytest.approx(
        hand_score(hand_idf(3, 1), 1, 1, 5.0 / 3.0), abs=1e-9
    )


def test_repeated_doc_token_saturates():
    labels = ["a a a a", "a b"]
    index = Bm25Index(_terms(labels))
    scores = index.doc_scores(["a"])
    idf = hand_idf(2, 2)
    assert scores[0] == pytest.approx(hand_score(idf, 4, 4, 3.0), abs=1e-9)
    assert scores[1] == pytest.approx(hand_score(idf, 1, 2, 3.0), abs=1e-9)


def test_minmax_normalization_bounds():
    # distinct document lengths give distinct raw scores
    labels = [
        "shared",
        "shared term",
        "shared term one",
        "shared term one two",
        "shared term one two three",
        "shared term one two three four",
        "unrelated words entirely",
    ]
    topics = [Topic("T1", "shared term")]
    found = bm25_match(topics, _terms(labels), top_k=5)
    by_topic = [m.similarity for m in found if m.topic_id == "T1"]
    assert len(by_topic) == 5
    assert max(by_topic) == 1.0
    assert min(by_topic) == 0.0


def test_single_result_normalizes_to_one():
    labels = ["unique", "other words", "more words"]
    found = bm25_match([Topic("T1", "unique")], _terms(labels), top_k=20)
    assert len(found) == 1
    assert found[0].similarity == 1.0


def test_no_token_overlap_yields_nothing():
    found = bm25_match([Topic("T1", "zebra")], _terms(["soil", "gene"]), top_k=5)
    assert found == []


def test_top_k_cut_is_deterministic():
    labels = [f"alpha {i}" for i in range(30)]
    found = bm25_match([Topic("T1", "alpha")], _terms(labels), top_k=7)
    assert len(found) == 7
    first = [(m.term_id, m.similarity) for m in found]
    again = bm25_match([Topic("T1", "alpha")], _terms(labels), top_k=7)
    assert [(m.term_id, m.similarity) for m in again] == first


def test_threshold_filters_normalized_scores():
    labels = ["soil chemistry", "soil physics deep", "soil"]
    all_out = bm25_match([Topic("T1", "soil")], _terms(labels), top_k=3, threshold=0.0)
    high_out = bm25_match([Topic("T1", "soil")], _terms(labels), top_k=3, threshold=0.9)
    assert {m.term_id for m in high_out} <= {m.term_id for m in all_out}
    assert all(m.similarity >= 0.9 for m in high_out)


def test_parameter_validation():
    with pytest.raises(ValueError):
        Bm25Index(_terms(["a"]), k1=0.0)
    with pytest.raises(ValueError):
        Bm25Index(_terms(["a"]), b=1.5)
