"""Agreement statistics and the ten-check harness with seeded violations."""

import math

import numpy as np
import pyarrow as pa
import pytest

from paperlake.checks import (
    CheckRunner,
    bland_altman,
    checks_to_text,
    citation_agreement,
    pearson,
    relative_difference,
)
from paperlake.config import load_config
from paperlake.tableio import read_table, write_table
from paperlake.vignettes import compute_counts


# --- pearson -----------------------------------------------------------------


def test_pearson_identity_and_sign():
    x = [1.0, 2.0, 3.0, 4.0]
    assert pearson(x, x) == pytest.approx(1.0, abs=1e-12)
    assert pearson(x, [-v for v in x]) == pytest.approx(-1.0, abs=1e-12)


def test_pearson_five_point_hand_fixture():
    # x = (1..5), y = (2,1,4,3,6)
    # deviations: dx = (-2,-1,0,1,2); dy = (-1.2,-2.2,0.8,-0.2,2.8)
    # sum(dx*dy) = 10, sum(dx^2) = 10, sum(dy^2) = 14.8
    # r = 10 / sqrt(10 * 14.8) = 10 / sqrt(148)
    expected = 10.0 / math.sqrt(148.0)
    assert pearson([1, 2, 3, 4, 5], [2, 1, 4, 3, 6]) == pytest.approx(expected, abs=1e-9)


def test_pearson_null_pairs_dropped():
    r = pearson([1, 2, None, 3], [2, 4, 100, None])
    assert r == pytest.approx(1.0, abs=1e-12)  # survivors: (1,2), (2,4)


def test_pearson_degenerate_cases():
    assert pearson([1], [2]) is None
    assert pearson([1, 1, 1], [1, 2, 3]) is None  # zero variance
    assert pearson([None, None], [1, 2]) is None


def test_pearson_affine_invariance_and_symmetry():
    rng = np.random.default_rng(0)
    x = rng.normal(size=50).tolist()
    y = rng.normal(size=50).tolist()
    base = pearson(x, y)
    assert pearson(y, x) == pytest.approx(base, abs=1e-12)
    scaled = pearson([3.0 * v + 7.0 for v in x], y)
    assert scaled == pytest.approx(base, abs=1e-12)


# --- bland-altman --------------------------------------------------------------


def test_bland_altman_identical_series():
    result = bland_altman([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert result.mean_diff == 0.0
    assert (result.loa_low, result.loa_high) == (0.0, 0.0)
    assert result.outliers == []


def test_bland_altman_hand_fixture():
    # d = (1, -1): mean 0, sd (n-1) = sqrt(2), LoA = +/- 1.96*sqrt(2)
    result = bland_altman([1.0, 0.0], [0.0, 1.0])
    assert result.mean_diff == pytest.approx(0.0, abs=1e-12)
    assert result.loa_high == pytest.approx(1.96 * math.sqrt(2.0), abs=1e-9)
    assert result.loa_low == pytest.approx(-1.96 * math.sqrt(2.0), abs=1e-9)


def test_bland_altman_flags_extreme_pair():
    # enough stable pairs that one huge difference escapes the limits
    x = [10.0] * 30 + [510.0]
    y = [10.0] * 31
    ids = [f"p{i}" for i in range(30)] + ["extreme"]
    result = bland_altman(x, y, ids=ids)
    assert [key for key, _ in result.outliers] == ["extreme"]


def test_bland_altman_needs_two_pairs():
    with pytest.raises(ValueError):
        bland_altman([1.0], [2.0])


def test_loa_coverage_on_gaussian_fixture():
    rng = np.random.default_rng(1234)
    diffs = rng.normal(0.0, 1.0, size=10_000)
    x = diffs
    y = np.zeros_like(diffs)
    result = bland_altman(x, y)
    inside = np.sum((diffs >= result.loa_low) & (diffs <= result.loa_high))
    coverage = inside / len(diffs)
    assert 0.94 <= coverage <= 0.96


# --- citation agreement ---------------------------------------------------------


def _unified_with_citations(rows):
    n = len(rows)
    return pa.table(
        {
            "doi": pa.array([f"10.1/x{i}" for i in range(n)], pa.string()),
            "citations_s2ag": pa.array([r[0] for r in rows], pa.int64()),
            "citations_openalex": pa.array([r[1] for r in rows], pa.int64()),
            "citations_sciscinet": pa.array([r[2] for r in rows], pa.int64()),
        }
    )


def test_identical_columns_full_agreement():
    table = _unified_with_citations([(c, c, c) for c in (3, 9, 27, 81)])
    stats, _ = citation_agreement(table)
    assert len(stats) == 3
    for s in stats:
        assert s.pearson_r == pytest.approx(1.0, abs=1e-12)
        assert s.mean_abs_diff == 0.0


def test_constant_offsets_mad():
    table = _unified_with_citations([(c, c + 1, c + 2) for c in (5, 10, 20, 40)])
    stats, _ = citation_agreement(table)
    mads = {tuple(s.source_pair): s.mean_abs_diff for s in stats}
    assert mads[("citations_s2ag", "citations_openalex")] == 1.0
    assert mads[("citations_s2ag", "citations_sciscinet")] == 2.0
    assert mads[("citations_openalex", "citations_sciscinet")] == 1.0


def test_null_rows_excluded_and_two_pass_oracle():
    rng = np.random.default_rng(7)
    rows = []
    for _ in range(100):
        base = int(rng.integers(0, 200))
        rows.append((base, base + int(rng.integers(-3, 4)), base + int(rng.integers(-3, 4))))
    rows.append((None, 5, 5))
    table = _unified_with_citations(rows)
    stats, _ = citation_agreement(table)
    complete = [r for r in rows if all(v is not None for v in r)]
    a = np.array([r[0] for r in complete], dtype=float)
    b = np.array([r[1] for r in complete], dtype=float)
    # independent two-pass oracle
    oracle_mad = np.mean(np.abs(a - b))
    oracle_r = float(
        np.sum((a - a.mean()) * (b - b.mean()))
        / math.sqrt(np.sum((a - a.mean()) ** 2) * np.sum((b - b.mean()) ** 2))
    )
    pair = next(s for s in stats if s.source_pair == ("citations_s2ag", "citations_openalex"))
    assert pair.n == len(complete)
    assert pair.mean_abs_diff == pytest.approx(oracle_mad, abs=1e-9)
    assert pair.pearson_r == pytest.approx(oracle_r, abs=1e-9)


def test_relative_difference_definition_and_bins():
    assert relative_difference(10, 30) == pytest.approx(1.0)  # |10-30| / 20
    assert relative_difference(0, 0) == 0.0  # floor denominator at 1
    table = _unified_with_citations([(4, 6, 5), (40, 60, 50), (400, 600, 500)])
    _, binned = citation_agreement(table)
    pair_bins = {
        b["bin"]: b for b in binned if b["pair"] == "citations_s2ag|citations_openalex"
    }
    assert pair_bins["<10"]["n"] == 1  # mean 5
    assert pair_bins["10-100"]["n"] == 1  # mean 50
    assert pair_bins[">100"]["n"] == 1  # mean 500
    assert pair_bins["<10"]["mean_rel_diff"] == pytest.approx(2.0 / 5.0)


def test_fewer_than_two_rows_yields_empty():
    table = _unified_with_citations([(1, 1, 1)])
    stats, binned = citation_agreement(table)
    assert stats == [] and binned == []


# --- the ten-check harness -------------------------------------------------------


def _runner(workspace, cfg):
    return CheckRunner(
        cfg.lake_root,
        cfg.registry(),
        thresholds=cfg.checks,
        spot_checks=cfg.spot_checks,
        seed=cfg.seed,
        topics_table="openalex/topics.parquet",
        assignments_table="openalex/work_topics.parquet",
    )


def _recompute(cfg):
    def inner():
        return compute_counts(read_table(cfg.lake_root / "xref" / "unified_papers.parquet"))

    return inner


def _run(workspace):
    cfg = load_config(workspace / "config.yaml")
    runner = _runner(workspace, cfg)
    return runner.run(recompute_counts=_recompute(cfg))


def test_clean_lake_passes_all_ten(demo_workspace):
    results = _run(demo_workspace)
    assert len(results) == 10
    assert [r.check_id for r in results] == list(range(1, 11))
    failed = [r for r in results if not r.passed]
    assert failed == [], checks_to_text(results)


def _rewrite(path, table):
    write_table(table, path, source="xref")


def _flip_unified(workspace, mutate):
    path = workspace / "lake" / "xref" / "unified_papers.parquet"
    table = read_table(path)
    _rewrite(path, mutate(table))


def _expect_only(workspace, failing_id):
    results = _run(workspace)
    failed = {r.check_id for r in results if not r.passed}
    assert failed == {failing_id}, checks_to_text(results)


def test_seeded_uppercase_doi_fails_only_check_1(lake_copy):
    # uppercase the same DOI in unified and doi_map so membership still agrees
    unified_path = lake_copy / "lake" / "xref" / "unified_papers.parquet"
    unified = read_table(unified_path)
    target = unified.column("doi").to_pylist()[5]
    upper = target.upper()
    assert upper != target

    def bump(table, column="doi"):
        values = [upper if v == target else v for v in table.column(column).to_pylist()]
        idx = table.column_names.index(column)
        return table.set_column(idx, column, pa.array(values, pa.string()))

    _rewrite(unified_path, bump(unified))
    doi_map_path = lake_copy / "lake" / "xref" / "doi_map.parquet"
    _rewrite(doi_map_path, bump(read_table(doi_map_path)))
    results = _run(lake_copy)
    by_id = {r.check_id: r for r in results}
    assert by_id[1].violation_count == 1
    assert {r.check_id for r in results if not r.passed} == {1}


def test_seeded_flag_mismatch_fails_only_check_2(lake_copy):
    def mutate(table):
        flags = table.column("has_sciscinet").to_pylist()
        cites = table.column("citations_sciscinet").to_pylist()
        target = next(
            i for i, (f, c) in enumerate(zip(flags, cites)) if not f and c is None
        )
        flags[target] = True
        idx = table.column_names.index("has_sciscinet")
        return table.set_column(idx, "has_sciscinet", pa.array(flags, pa.bool_()))

    _flip_unified(lake_copy, mutate)
    _expect_only(lake_copy, 2)


def test_seeded_duplicate_doi_fails_only_check_3(lake_copy):
    def mutate(table):
        rows = table.to_pylist()
        quiet = next(
            r for r in rows
            if not r["has_pwc"] and not r["has_retraction"] and not r["has_patent"]
            and r["cd5"] is None
            and any(r[c] is None for c in r if c.startswith("citations_"))
        )
        return pa.Table.from_pylist(rows + [quiet], schema=table.schema)

    _flip_unified(lake_copy, mutate)
    _expect_only(lake_copy, 3)


def test_seeded_bad_native_id_fails_only_check_4(lake_copy):
    path = lake_copy / "lake" / "xref" / "doi_map.parquet"
    table = read_table(path)
    sources = table.column("source").to_pylist()
    natives = table.column("native_id").to_pylist()
    target = next(i for i, s in enumerate(sources) if s == "openalex")
    natives[target] = "X999"
    idx = table.column_names.index("native_id")
    _rewrite(path, table.set_column(idx, "native_id", pa.array(natives, pa.string())))
    _expect_only(lake_copy, 4)


def test_seeded_orphan_topic_fails_only_check_5(lake_copy):
    path = lake_copy / "lake" / "xref" / "topic_ontology_map.parquet"
    table = read_table(path)
    rows = table.to_pylist()
    orphan = dict(rows[0])
    orphan["topic_id"] = "T99999"
    _rewrite(path, pa.Table.from_pylist(rows + [orphan], schema=table.schema))
    _expect_only(lake_copy, 5)


def test_missing_table_fails_dependent_checks_only(lake_copy):
    (lake_copy / "lake" / "xref" / "topic_ontology_map.parquet").unlink()
    results = _run(lake_copy)
    by_id = {r.check_id: r for r in results}
    assert not by_id[5].passed
    assert "missing input" in by_id[5].detail
    # unrelated structural checks still pass
    for check_id in (1, 2, 3, 4, 6, 7, 8, 9, 10):
        assert by_id[check_id].passed, by_id[check_id].detail
