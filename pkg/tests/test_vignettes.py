"""Vignette analytics vs independent accumulation oracles."""

import numpy as np
import pyarrow as pa
import pytest

from paperlake.vignettes import (
    compute_counts,
    disruption_by_code,
    patent_impact,
    retraction_enrichment,
    summarize,
)


def _unified(rows):
    """rows: list of dicts with doi/cd5/has_pwc/has_retraction/has_patent/..."""
    n = len(rows)

    def col(name, typ, default=None):
        return pa.array([r.get(name, default) for r in rows], typ)

    return pa.table(
        {
            "doi": col("doi", pa.string()),
            "cd5": col("cd5", pa.float64()),
            "fwci": col("fwci", pa.float64()),
            "citations_openalex": col("citations_openalex", pa.int64()),
            "citations_s2ag": col("citations_s2ag", pa.int64()),
            "citations_sciscinet": col("citations_sciscinet", pa.int64()),
            "has_pwc": col("has_pwc", pa.bool_(), False),
            "has_retraction": col("has_retraction", pa.bool_(), False),
            "has_patent": col("has_patent", pa.bool_(), False),
        }
    )


def test_summarize_quantiles_linear_interpolation():
    s = summarize("g", [1.0, 2.0, 3.0, 4.0])
    assert s.median == 2.5
    assert s.p10 == pytest.approx(np.percentile([1, 2, 3, 4], 10))
    assert s.n == 4


def test_disruption_constant_groups():
    rows = []
    for i in range(10):
        rows.append({"doi": f"10.1/a{i}", "cd5": -0.1, "has_pwc": True})
    for i in range(10):
        rows.append({"doi": f"10.1/b{i}", "cd5": 0.1, "has_pwc": False})
    groups = disruption_by_code(_unified(rows))
    assert groups["with_code"].mean == pytest.approx(-0.1)
    assert groups["without_code"].mean == pytest.approx(0.1)
    assert groups["with_code"].n == 10


def test_disruption_identical_groups_equal_means():
    rows = []
    for i, flag in enumerate([True, False] * 20):
        rows.append({"doi": f"10.1/c{i}", "cd5": float(i % 5), "has_pwc": flag})
    groups = disruption_by_code(_unified(rows))
    assert groups["with_code"].mean == pytest.approx(groups["without_code"].mean)


def test_disruption_null_cd5_excluded_and_empty_group_omitted():
    rows = [
        {"doi": "10.1/a", "cd5": None, "has_pwc": True},
        {"doi": "10.1/b", "cd5": 0.5, "has_pwc": False},
    ]
    groups = disruption_by_code(_unified(rows))
    assert "with_code" not in groups
    assert groups["without_code"].n == 1


def test_disruption_random_fixture_matches_groupby_oracle():
    rng = np.random.default_rng(5)
    rows = []
    for i in range(1000):
        rows.append(
            {
                "doi": f"10.1/r{i}",
                "cd5": float(rng.normal()) if rng.random() > 0.1 else None,
                "has_pwc": bool(rng.random() < 0.3),
            }
        )
    groups = disruption_by_code(_unified(rows))
    # oracle: independent accumulation pass
    acc = {True: [], False: []}
    for r in rows:
        if r["cd5"] is not None:
            acc[r["has_pwc"]].append(r["cd5"])
    assert groups["with_code"].mean == pytest.approx(np.mean(acc[True]), abs=1e-12)
    assert groups["without_code"].mean == pytest.approx(np.mean(acc[False]), abs=1e-12)
    assert groups["with_code"].median == pytest.approx(np.median(acc[True]), abs=1e-12)


def _topic_map(entries):
    return pa.table(
        {
            "topic_id": pa.array([e[0] for e in entries], pa.string()),
            "ontology": pa.array([e[1] for e in entries], pa.string()),
        }
    )


def test_enrichment_whole_population_is_one():
    rows = [
        {"doi": f"10.1/p{i}", "has_retraction": i < 5} for i in range(100)
    ]
    unified = _unified(rows)
    paper_topics = [(f"10.1/p{i}", "T1") for i in range(100)]
    topic_map = _topic_map([("T1", "onto")])
    out, counts = retraction_enrichment(
        unified, paper_topics, topic_map, {"T1": "D"}, min_support=1
    )
    assert len(out) == 1
    assert out[0].enrichment == pytest.approx(1.0)
    assert counts == {"population": 100, "retracted": 5, "groups_emitted": 1}


def test_enrichment_planted_ratio():
    # group A: 50 papers, 10 retracted (rate 0.2); baseline: 1000 papers,
    # 10 retracted (rate 0.01) -> enrichment exactly 20.0
    rows = []
    paper_topics = []
    for i in range(1000):
        doi = f"10.1/q{i}"
        retracted = i < 10
        rows.append({"doi": doi, "has_retraction": retracted})
        if i < 50:
            paper_topics.append((doi, "TA"))
        paper_topics.append((doi, "TALL"))
    unified = _unified(rows)
    topic_map = _topic_map([("TA", "onto")])
    out, _ = retraction_enrichment(
        unified, paper_topics, topic_map, {"TA": "D", "TALL": "D"}, min_support=20
    )
    assert len(out) == 1
    assert out[0].enrichment == pytest.approx(20.0)
    assert (out[0].n_retracted, out[0].n_total) == (10, 50)


def test_enrichment_zero_baseline_gives_none():
    rows = [{"doi": f"10.1/z{i}"} for i in range(30)]
    paper_topics = [(f"10.1/z{i}", "T1") for i in range(30)]
    out, _ = retraction_enrichment(
        _unified(rows), paper_topics, _topic_map([("T1", "o")]), {"T1": "D"},
        min_support=1,
    )
    assert out[0].enrichment is None


def test_enrichment_min_support_suppresses_small_groups():
    rows = [{"doi": f"10.1/s{i}", "has_retraction": i == 0} for i in range(30)]
    paper_topics = [(f"10.1/s{i}", "T1") for i in range(30)]
    paper_topics += [(f"10.1/s{i}", "T2") for i in range(5)]
    topic_map = _topic_map([("T1", "o1"), ("T2", "o2")])
    out, _ = retraction_enrichment(
        _unified(rows), paper_topics, topic_map, {"T1": "D", "T2": "D"},
        min_support=20,
    )
    assert [r.group for r in out] == ["o1:D"]


def test_patent_impact_planted_ratio():
    rows = []
    for i in range(40):
        rows.append({"doi": f"10.1/t{i}", "citations_openalex": 50, "fwci": 2.0,
                     "has_patent": True})
    for i in range(60):
        rows.append({"doi": f"10.1/u{i}", "citations_openalex": 10, "fwci": 1.0,
                     "has_patent": False})
    impact = patent_impact(_unified(rows))
    by_metric = {r.metric: r for r in impact}
    assert by_metric["citations_openalex"].ratio_of_means == pytest.approx(5.0)
    assert by_metric["fwci"].ratio_of_means == pytest.approx(2.0)
    assert by_metric["citations_openalex"].n_flagged == 40


def test_patent_impact_ratio_recomputable_from_summaries():
    rng = np.random.default_rng(11)
    rows = []
    for i in range(500):
        rows.append(
            {
                "doi": f"10.1/v{i}",
                "citations_openalex": int(rng.integers(0, 300)),
                "fwci": float(rng.lognormal(0, 0.5)) if rng.random() > 0.2 else None,
                "has_patent": bool(rng.random() < 0.25),
            }
        )
    impact = patent_impact(_unified(rows))
    for row in impact:
        if row.mean_flagged is not None and row.mean_other:
            assert row.ratio_of_means == pytest.approx(
                row.mean_flagged / row.mean_other, abs=1e-12
            )
    # independent accumulation oracle for the citation metric
    flagged = [r["citations_openalex"] for r in rows if r["has_patent"]]
    other = [r["citations_openalex"] for r in rows if not r["has_patent"]]
    by_metric = {r.metric: r for r in impact}
    assert by_metric["citations_openalex"].mean_flagged == pytest.approx(
        np.mean(flagged), abs=1e-12
    )
    assert by_metric["citations_openalex"].median_other == pytest.approx(
        np.median(other), abs=1e-12
    )


def test_patent_impact_degenerate_partition():
    rows = [{"doi": f"10.1/w{i}", "citations_openalex": 5, "has_patent": True}
            for i in range(10)]
    impact = patent_impact(_unified(rows), metrics=("citations_openalex",))
    assert impact[0].mean_other is None
    assert impact[0].ratio_of_means is None


def test_compute_counts_headline_semantics():
    rows = [
        {"doi": "10.1/1", "cd5": 0.1, "has_pwc": True},             # v1
        {"doi": "10.1/2", "cd5": None, "has_pwc": True},            # not v1 (no cd5)
        {"doi": "10.1/3", "cd5": 0.2, "has_retraction": True},      # v2
        {"doi": "10.1/4", "has_patent": True},                      # v3
        {"doi": "10.1/5", "citations_openalex": 1, "citations_s2ag": 2,
         "citations_sciscinet": 3},                                 # v4
    ]
    counts = compute_counts(_unified(rows))
    assert counts == {"vignette_1": 1, "vignette_2": 1, "vignette_3": 1, "vignette_4": 1}
