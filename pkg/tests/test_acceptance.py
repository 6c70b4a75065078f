"""Acceptance gate: one test per criterion, each at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  Every tolerance is pinned here; nothing is deferred.
"""

import hashlib
import math
import random
import string
import time

import numpy as np
import pytest

from paperlake import cli
from paperlake.align import (
    EmbeddingSet,
    assign_tier,
    bm25_match,
    embed_nn_match,
    jaro_winkler,
)
from paperlake.align.bm25 import Bm25Index
from paperlake.align.tfidf import CharTfidfIndex, tfidf_match
from paperlake.align.types import Mapping, Topic
from paperlake.checks import bland_altman, pearson
from paperlake.evaluation import (
    DEFAULT_STRATA,
    GoldPair,
    apportion,
    pr_sweep,
    score_strict,
    stratified_sample,
    write_gold_csv,
)
from paperlake.ingest import OntologyTerm
from paperlake.linkage import normalize_doi


def _ok(name):
    print(f"ACCEPTANCE {name}: PASS")


# ---------------------------------------------------------------------------


def test_acceptance_doi_normalization():
    """Canonical-form table cases, fuzz idempotence, < 1 s runtime."""
    # prefix stripping (OpenAlex/SciSciNet style), lowercasing (Crossref
    # style), canonical passthrough (S2AG/PWC style)
    assert normalize_doi("https://doi.org/10.1038/NPHYS1170") == "10.1038/nphys1170"
    assert normalize_doi("https://doi.org/10.1038/nphys1170") == "10.1038/nphys1170"
    assert normalize_doi("10.1002/(SICI)1097-4628") == "10.1002/(sici)1097-4628"
    assert normalize_doi("10.1038/nphys1170") == "10.1038/nphys1170"

    rng = random.Random(2024)
    corpus = []
    for _ in range(10_000):
        prefix = rng.choice(["", "https://doi.org/", "doi:", "http://dx.doi.org/"])
        if rng.random() < 0.5:
            body = f"10.{rng.randint(1, 10**9)}/" + "".join(
                rng.choices(string.ascii_letters + string.digits + "./()-", k=rng.randint(1, 24))
            )
        else:
            body = "".join(rng.choices(string.printable, k=rng.randint(0, 32)))
        corpus.append(prefix + body)
    started = time.perf_counter()
    once = [normalize_doi(raw) for raw in corpus]
    twice = [normalize_doi(value) for value in once]
    elapsed = time.perf_counter() - started
    assert once == twice, "normalization must be idempotent"
    assert elapsed < 1.0, f"10k-string corpus took {elapsed:.3f}s"
    _ok("doi-normalization")


def test_acceptance_jaro_winkler():
    """martha/marhta oracle within 1e-9; symmetry+identity on 1,000 pairs."""
    jaro = (6 / 6 + 6 / 6 + (6 - 1) / 6) / 3
    expected = jaro + 3 * 0.1 * (1 - jaro)
    assert abs(jaro_winkler("martha", "marhta") - expected) < 1e-9
    rng = random.Random(77)
    for _ in range(1000):
        a = "".join(rng.choices(string.ascii_lowercase, k=rng.randint(0, 12)))
        b = "".join(rng.choices(string.ascii_lowercase, k=rng.randint(0, 12)))
        assert jaro_winkler(a, b) == jaro_winkler(b, a)
        assert jaro_winkler(a, a) == 1.0
        assert 0.0 <= jaro_winkler(a, b) <= 1.0
    _ok("jaro-winkler")


def test_acceptance_bm25():
    """Hand-evaluated Okapi scores within 1e-9; min-max bounds per topic."""
    labels = ["machine learning", "deep learning systems", "soil"]
    index = Bm25Index([OntologyTerm(f"X:{i}", "x", s) for i, s in enumerate(labels)])
    scores = index.doc_scores(["learning"])
    idf = math.log(1 + (3 - 2 + 0.5) / (2 + 0.5))

    def okapi(tf, dl, avg):
        return idf * tf * 2.2 / (tf + 1.2 * (1 - 0.75 + 0.75 * dl / avg))

    assert abs(scores[0] - okapi(1, 2, 2.0)) < 1e-9
    assert abs(scores[1] - okapi(1, 3, 2.0)) < 1e-9

    corpus = [
        "shared", "shared term", "shared term one", "shared term one two",
        "shared term one two three", "noise words only",
    ]
    terms = [OntologyTerm(f"Y:{i}", "y", s) for i, s in enumerate(corpus)]
    for top_k in (3, 5):
        found = bm25_match([Topic("T", "shared term")], terms, top_k=top_k)
        sims = [m.similarity for m in found]
        assert len(sims) >= 2
        assert max(sims) == 1.0 and min(sims) == 0.0
    _ok("bm25")


def test_acceptance_tfidf():
    """Identical strings score 1.0; 3-doc ranking matches dense oracle 1e-9."""
    from collections import Counter

    labels = ["soil chemistry", "machine learning", "gene ontology"]
    terms = [OntologyTerm(f"X:{i}", "x", s) for i, s in enumerate(labels)]
    same = tfidf_match([Topic("T", "soil chemistry")], terms, threshold=0.0)
    top = max(same, key=lambda m: m.similarity)
    assert top.term_id == "X:0" and abs(top.similarity - 1.0) < 1e-9

    def oracle_grams(text):
        grams = []
        for word in text.lower().split():
            w = f" {word} "
            for n in (2, 3, 4):
                if len(w) >= n:
                    grams.extend(w[i : i + n] for i in range(len(w) - n + 1))
        return grams

    docs = [Counter(oracle_grams(t)) for t in labels]
    df = Counter(g for d in docs for g in set(d))
    idf = {g: math.log((1 + 3) / (1 + df[g])) + 1 for g in df}

    def cosine(query):
        q = {g: tf * idf[g] for g, tf in Counter(oracle_grams(query)).items() if g in idf}
        qn = math.sqrt(sum(v * v for v in q.values()))
        out = []
        for d in docs:
            v = {g: tf * idf[g] for g, tf in d.items()}
            vn = math.sqrt(sum(x * x for x in v.values()))
            out.append(sum(q.get(g, 0) * v[g] for g in v) / (qn * vn) if qn else 0.0)
        return out

    expected = cosine("soil chemist")
    got = CharTfidfIndex(terms).scores("soil chemist")
    for g, e in zip(got, expected):
        assert abs(g - e) < 1e-9
    assert int(np.argmax(got)) == 0
    _ok("tfidf")


def test_acceptance_embedding_nn():
    """100x1,000 random unit vectors: oracle-identical pairs, 1e-6, < 10 s."""
    rng = np.random.default_rng(314)
    topics = rng.standard_normal((100, 64))
    terms = rng.standard_normal((1000, 64))
    topics /= np.linalg.norm(topics, axis=1, keepdims=True)
    terms /= np.linalg.norm(terms, axis=1, keepdims=True)
    topic_ids = [f"t{i:03d}" for i in range(100)]
    term_ids = [f"m{i:04d}" for i in range(1000)]
    started = time.perf_counter()
    found = embed_nn_match(
        EmbeddingSet(topic_ids, topics, 64),
        EmbeddingSet(term_ids, terms, 64),
        "x", threshold=0.2, top_k=20,
    )
    elapsed = time.perf_counter() - started
    got = {(m.topic_id, m.term_id): m.similarity for m in found}

    sims = topics @ terms.T
    expected = {}
    for i in range(100):
        order = np.argsort(-sims[i], kind="stable")[:20]
        for j in order:
            if sims[i, j] >= 0.2:
                expected[(topic_ids[i], term_ids[int(j)])] = float(sims[i, j])
    assert set(got) == set(expected)
    for key, value in expected.items():
        assert abs(got[key] - value) < 1e-6
    assert elapsed < 10.0, f"search took {elapsed:.2f}s"
    _ok("embedding-nn")


def test_acceptance_tier_assignment():
    """Worked-example anchors; cumulative tier counts monotone."""
    assert assign_tier(0.98) == "exact"
    assert assign_tier(0.87) == "high"
    assert assign_tier(0.68) == "all"
    assert assign_tier(0.64) is None
    rng = random.Random(5)
    sims = [rng.uniform(0.65, 1.0) for _ in range(500)]
    counts = [
        sum(1 for s in sims if s >= 0.95),
        sum(1 for s in sims if s >= 0.85),
        sum(1 for s in sims if s >= 0.65),
    ]
    assert counts == sorted(counts)
    _ok("tier-assignment")


def test_acceptance_strict_scoring():
    """2C/1P/1I fixture: P=0.5, R=1.0, F1=2/3; all-correct stratum: 1.00."""
    gold = [
        GoldPair("t1", "m1", "x", 0.9, "high", "correct"),
        GoldPair("t2", "m2", "x", 0.9, "high", "correct"),
        GoldPair("t3", "m3", "x", 0.9, "high", "partial"),
        GoldPair("t4", "m4", "x", 0.9, "high", "incorrect"),
    ]
    preds = [Mapping(g.topic_id, g.term_id, "x", 0.9, "embedding") for g in gold]
    result = score_strict(preds, gold)
    assert result.precision == 0.5
    assert result.recall == 1.0
    assert result.f1 == pytest.approx(2 / 3, abs=0)

    exact = [GoldPair(f"e{i}", f"m{i}", "x", 0.97, "exact", "correct") for i in range(50)]
    preds = [Mapping(g.topic_id, g.term_id, "x", 0.97, "embedding") for g in exact]
    assert score_strict(preds, exact).per_stratum_precision["exact"] == 1.00
    _ok("strict-scoring")


def test_acceptance_pr_sweep():
    """Recall monotone over 0.60-1.00; 10-pair hand table exact."""
    bands = [0.97, 0.95, 0.92, 0.88, 0.86, 0.80, 0.77, 0.72, 0.68, 0.66]
    labels = ["correct", "correct", "partial", "correct", "incorrect",
              "correct", "partial", "correct", "incorrect", "correct"]
    gold = [
        GoldPair(f"t{i}", "m", "x", s, "high", lab)
        for i, (s, lab) in enumerate(zip(bands, labels))
    ]
    preds = [Mapping(g.topic_id, "m", "x", g.similarity_at_annotation, "embedding")
             for g in gold]
    points = pr_sweep(preds, gold)
    recalls = [p.recall for p in points]
    assert all(a >= b for a, b in zip(recalls, recalls[1:]))
    by_threshold = {round(p.threshold, 2): p for p in points}
    assert by_threshold[0.60].precision == pytest.approx(6 / 10)
    assert by_threshold[0.60].recall == 1.0
    assert by_threshold[0.75].precision == pytest.approx(4 / 7)
    assert by_threshold[0.75].f1 == pytest.approx(8 / 13)
    assert by_threshold[0.85].f1 == pytest.approx(6 / 11)
    assert by_threshold[0.95].precision == 1.0
    assert by_threshold[1.00].precision is None
    assert by_threshold[1.00].n_predictions == 0
    _ok("pr-sweep")


def test_acceptance_stratified_sampler(tmp_path):
    """300 rows from default bands; seed-stable bytes; 75/25 -> 15/5."""
    rng = random.Random(8)
    pool = []
    for low, high, n in ((0.95, 1.0, 140), (0.85, 0.95, 260), (0.75, 0.85, 260), (0.65, 0.75, 140)):
        for i in range(n):
            pool.append(
                Mapping(f"t{low}{i}", f"m{i}", rng.choice(["o1", "o2", "o3"]),
                        rng.uniform(low, high - 1e-9), "embedding")
            )
    sample = stratified_sample(pool, DEFAULT_STRATA, seed=99)
    assert len(sample) == 300
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_gold_csv(a, sample)
    write_gold_csv(b, stratified_sample(pool, DEFAULT_STRATA, seed=99))
    assert a.read_bytes() == b.read_bytes()
    assert apportion({"A": 75, "B": 25}, 20) == {"A": 15, "B": 5}
    _ok("stratified-sampler")


def test_acceptance_pearson_bland_altman():
    """Hand 5-point fixtures within 1e-9; LoA coverage 94-96% at n=10,000."""
    assert abs(pearson([1, 2, 3, 4, 5], [2, 1, 4, 3, 6]) - 10 / math.sqrt(148)) < 1e-9
    x = [3.0, 1.0, 4.0, 1.0, 5.0]
    assert pearson(x, x) == pytest.approx(1.0, abs=1e-12)
    ba = bland_altman(x, x)
    assert ba.mean_diff == 0.0 and ba.outliers == []
    two = bland_altman([1.0, 0.0], [0.0, 1.0])
    assert abs(two.loa_high - 1.96 * math.sqrt(2)) < 1e-9

    rng = np.random.default_rng(2718)
    diffs = rng.normal(0, 1, size=10_000)
    result = bland_altman(diffs, np.zeros_like(diffs))
    coverage = np.mean((diffs >= result.loa_low) & (diffs <= result.loa_high))
    assert 0.94 <= coverage <= 0.96, coverage
    _ok("pearson-bland-altman")


def test_acceptance_sanity_harness(demo_workspace, lake_copy):
    """Clean mini-lake passes 10/10 in < 30 s; 5 seeded violations are surgical."""
    import pyarrow as pa

    from paperlake.checks import CheckRunner
    from paperlake.config import load_config
    from paperlake.tableio import read_table, write_table
    from paperlake.vignettes import compute_counts

    def run_checks(workspace):
        cfg = load_config(workspace / "config.yaml")
        runner = CheckRunner(
            cfg.lake_root, cfg.registry(), thresholds=cfg.checks,
            spot_checks=cfg.spot_checks, seed=cfg.seed,
        )
        return runner.run(
            recompute_counts=lambda: compute_counts(
                read_table(cfg.lake_root / "xref" / "unified_papers.parquet")
            )
        )

    started = time.perf_counter()
    results = run_checks(demo_workspace)
    elapsed = time.perf_counter() - started
    assert [r.check_id for r in results] == list(range(1, 11))
    assert all(r.passed for r in results), [r.detail for r in results if not r.passed]
    assert elapsed < 30.0, f"check run took {elapsed:.1f}s"

    lake = lake_copy / "lake"

    def reload(rel):
        return read_table(lake / rel)

    def rewrite(rel, table):
        write_table(table, lake / rel, source="xref")

    def set_col(table, name, values, typ):
        return table.set_column(table.column_names.index(name), name,
                                pa.array(values, typ))

    # 1: uppercase DOI (kept consistent in doi_map so only check 1 trips)
    unified = reload("xref/unified_papers.parquet")
    target = unified.column("doi").to_pylist()[3]
    for rel in ("xref/unified_papers.parquet", "xref/doi_map.parquet"):
        table = reload(rel)
        dois = [target.upper() if d == target else d for d in table.column("doi").to_pylist()]
        rewrite(rel, set_col(table, "doi", dois, pa.string()))
    # 2: flag mismatch on a metric-free row
    table = reload("xref/unified_papers.parquet")
    flags = table.column("has_sciscinet").to_pylist()
    cites = table.column("citations_sciscinet").to_pylist()
    idx = next(i for i, (f, c) in enumerate(zip(flags, cites)) if not f and c is None)
    flags[idx] = True
    rewrite("xref/unified_papers.parquet",
            set_col(table, "has_sciscinet", flags, pa.bool_()))
    # 3: duplicate DOI on a row that feeds no vignette count
    table = reload("xref/unified_papers.parquet")
    rows = table.to_pylist()
    quiet = next(
        r for r in rows
        if not r["has_pwc"] and not r["has_retraction"] and not r["has_patent"]
        and r["cd5"] is None
        and any(r[c] is None for c in r if c.startswith("citations_"))
    )
    rewrite("xref/unified_papers.parquet",
            pa.Table.from_pylist(rows + [quiet], schema=table.schema))
    # 4: bad native id
    table = reload("xref/doi_map.parquet")
    natives = table.column("native_id").to_pylist()
    srcs = table.column("source").to_pylist()
    natives[next(i for i, s in enumerate(srcs) if s == "openalex")] = "X999"
    rewrite("xref/doi_map.parquet", set_col(table, "native_id", natives, pa.string()))
    # 5: orphan topic id
    table = reload("xref/topic_ontology_map.parquet")
    rows = table.to_pylist()
    orphan = dict(rows[0])
    orphan["topic_id"] = "T99999"
    rewrite("xref/topic_ontology_map.parquet",
            pa.Table.from_pylist(rows + [orphan], schema=table.schema))

    results = run_checks(lake_copy)
    failed = {r.check_id for r in results if not r.passed}
    assert failed == {1, 2, 3, 4, 5}, failed
    _ok("sanity-harness")


def test_acceptance_end_to_end_determinism(lake_copy):
    """Two `all` runs produce identical checksums; combos partition the total."""

    def checksums(root):
        out = {}
        for path in sorted(root.rglob("*")):
            if path.is_file() and not path.name.startswith("."):
                out[path.relative_to(root)] = hashlib.sha256(path.read_bytes()).hexdigest()
        return out

    from paperlake.tableio import read_table

    config = str(lake_copy / "config.yaml")
    first = checksums(lake_copy / "lake")
    assert cli.main(["all", "--config", config]) == 0
    second = checksums(lake_copy / "lake")
    assert first == second

    unified = read_table(lake_copy / "lake" / "xref" / "unified_papers.parquet")
    combos = read_table(lake_copy / "lake" / "xref" / "intersection_counts.parquet")
    assert sum(combos.column("count").to_pylist()) == unified.num_rows
    assert all(label for label in combos.column("combination").to_pylist())
    _ok("end-to-end-determinism")
