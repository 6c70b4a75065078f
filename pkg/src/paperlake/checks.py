"""Automated sanity checks and cross-source agreement statistics.

Ten checks cover identifier hygiene, flag/data consistency, referential
integrity, join plausibility, statistical agreement, year sanity,
spot-checked papers, and analytics reproducibility.  Each check is
independent: a missing input fails only the checks that need it.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
import random
import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np
import pyarrow as pa

from .linkage import SourceSpec, normalize_doi
from .tableio import read_table


@dataclass
class CheckResult:
    check_id: int
    name: str
    status: str  # "pass" | "fail"
    violation_count: int
    detail: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class AgreementStats:
    source_pair: tuple[str, str]
    pearson_r: float | None
    mean_abs_diff: float
    n: int
    bland_altman: tuple[float, float, float]  # (mean_diff, loa_low, loa_high)


@dataclass
class BlandAltman:
    mean_diff: float
    loa_low: float
    loa_high: float
    outliers: list[tuple[object, float]]  # (id, diff) outside the limits


def pearson(x: Sequence[float | None], y: Sequence[float | None]) -> float | None:
    """Product-moment correlation over pairs where both values are present.

    None when fewer than two pairs remain or either side has zero
    variance.
    """
    pairs = [(a, b) for a, b in zip(x, y) if a is not None and b is not None]
    if len(pairs) < 2:
        return None
    ax = np.array([p[0] for p in pairs], dtype=np.float64)
    ay = np.array([p[1] for p in pairs], dtype=np.float64)
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        return None
    return float(np.dot(dx, dy) / math.sqrt(sxx * syy))


def bland_altman(
    x: Sequence[float],
    y: Sequence[float],
    ids: Sequence[object] | None = None,
) -> BlandAltman:
    """Mean difference and 95% limits of agreement for paired series.

    Differences are x - y; the limits use the sample (n-1) standard
    deviation, and pairs outside them are reported with their ids.
    """
    if len(x) != len(y):
        raise ValueError("series lengths differ")
    if len(x) < 2:
        raise ValueError("need at least 2 pairs")
    diffs = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    mean_diff = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    low = mean_diff - 1.96 * sd
    high = mean_diff + 1.96 * sd
    keys = ids if ids is not None else range(len(diffs))
    outliers = [
        (key, float(d)) for key, d in zip(keys, diffs) if d < low or d > high
    ]
    return BlandAltman(mean_diff, low, high, outliers)


REL_DIFF_BINS = (("<10", 0.0, 10.0), ("10-100", 10.0, 100.0), (">100", 100.0, math.inf))


def relative_difference(a: float, b: float) -> float:
    """|a-b| scaled by the pair mean, floored at 1 to survive zero counts."""
    return abs(a - b) / max(1.0, (a + b) / 2.0)


def citation_agreement(
    unified: pa.Table,
    citation_columns: Sequence[str] = (
        "citations_s2ag",
        "citations_openalex",
        "citations_sciscinet",
    ),
) -> tuple[list[AgreementStats], list[dict]]:
    """Pairwise agreement restricted to rows where every count is present.

    Returns the per-pair statistics plus mean relative differences
    binned by pair-mean citation magnitude.
    """
    columns = [unified.column(c).to_pylist() for c in citation_columns]
    dois = unified.column("doi").to_pylist()
    rows = [
        (doi, *values)
        for doi, *values in zip(dois, *columns)
        if all(v is not None for v in values)
    ]
    if len(rows) < 2:
        return [], []
    kept_ids = [r[0] for r in rows]
    series = {
        name: np.array([r[i + 1] for r in rows], dtype=np.float64)
        for i, name in enumerate(citation_columns)
    }
    stats: list[AgreementStats] = []
    binned: list[dict] = []
    for left, right in combinations(citation_columns, 2):
        a, b = series[left], series[right]
        ba = bland_altman(a, b, ids=kept_ids)
        stats.append(
            AgreementStats(
                source_pair=(left, right),
                pearson_r=pearson(a.tolist(), b.tolist()),
                mean_abs_diff=float(np.mean(np.abs(a - b))),
                n=len(a),
                bland_altman=(ba.mean_diff, ba.loa_low, ba.loa_high),
            )
        )
        means = (a + b) / 2.0
        rel = np.abs(a - b) / np.maximum(1.0, means)
        for label, lo, hi in REL_DIFF_BINS:
            if hi is math.inf:
                mask = means > lo
            elif lo == 0.0:
                mask = means < hi
            else:
                mask = (means >= lo) & (means <= hi)
            n = int(mask.sum())
            binned.append(
                {
                    "pair": f"{left}|{right}",
                    "bin": label,
                    "n": n,
                    "mean_rel_diff": float(rel[mask].mean()) if n else None,
                }
            )
    return stats, binned


@dataclass
class SpotCheck:
    doi: str
    flags: dict[str, bool]


@dataclass
class CheckThresholds:
    min_citation_r: float = 0.5
    max_null_year_rate: float = 0.05
    max_invalid_year_rate: float = 0.001
    year_min: int = 1400
    ros_sample_size: int = 10_000
    ros_min_match_rate: float = 0.70
    flag_sources: tuple[str, ...] = ("openalex", "s2ag", "sciscinet")
    native_id_source: str = "openalex"
    default_id_pattern: str = r"W\d+"


CHECK_NAMES = {
    1: "doi_format",
    2: "coverage_flags",
    3: "doi_unique",
    4: "native_id_format",
    5: "ontology_orphans",
    6: "patent_join",
    7: "citation_correlation",
    8: "year_distribution",
    9: "spot_checks",
    10: "vignette_counts",
}


class CheckRunner:
    """Runs the ten checks against a materialized lake.

    Tables are loaded lazily and cached; a load failure marks only the
    dependent checks as failed with detail "missing input".
    """

    def __init__(
        self,
        lake_root: str | Path,
        registry: list[SourceSpec],
        *,
        thresholds: CheckThresholds | None = None,
        spot_checks: Sequence[SpotCheck] = (),
        seed: int = 0,
        topics_table: str = "openalex/topics.parquet",
        assignments_table: str = "openalex/work_topics.parquet",
        assignment_work_column: str = "work_id",
        counts_path: str = "reports/vignette_counts.json",
    ):
        self.lake = Path(lake_root)
        self.registry = registry
        self.cfg = thresholds or CheckThresholds()
        self.spot_checks = list(spot_checks)
        self.seed = seed
        self.topics_table = topics_table
        self.assignments_table = assignments_table
        self.assignment_work_column = assignment_work_column
        self.counts_path = counts_path
        self._cache: dict[str, pa.Table] = {}

    # -- helpers ---------------------------------------------------------

    def _table(self, rel: str) -> pa.Table:
        if rel not in self._cache:
            self._cache[rel] = read_table(self.lake / rel)
        return self._cache[rel]

    def _unified(self) -> pa.Table:
        return self._table("xref/unified_papers.parquet")

    def _doi_map(self) -> pa.Table:
        return self._table("xref/doi_map.parquet")

    def _source(self, name: str) -> SourceSpec | None:
        for source in self.registry:
            if source.name == name:
                return source
        return None

    # -- checks ----------------------------------------------------------

    def run(self, recompute_counts=None) -> list[CheckResult]:
        """Execute all ten checks.

        `recompute_counts` is a zero-argument callable returning the
        current vignette counts dict; check 10 compares it against the
        stored counts file.
        """
        checks = [
            (1, self.check_doi_format),
            (2, self.check_coverage_flags),
            (3, self.check_doi_unique),
            (4, self.check_native_ids),
            (5, self.check_ontology_orphans),
            (6, self.check_patent_join),
            (7, self.check_citation_correlation),
            (8, self.check_year_distribution),
            (9, self.check_spot_checks),
            (10, lambda: self.check_vignette_counts(recompute_counts)),
        ]
        results = []
        for check_id, check in checks:
            try:
                results.append(check())
            except Exception as exc:  # missing table/column, bad file, ...
                results.append(
                    CheckResult(
                        check_id, CHECK_NAMES[check_id], "fail", 0,
                        f"missing input: {exc}",
                    )
                )
        return results

    @staticmethod
    def _result(check_id: int, violations: int, detail: str, ok: bool | None = None) -> CheckResult:
        status = "pass" if (violations == 0 if ok is None else ok) else "fail"
        return CheckResult(check_id, CHECK_NAMES[check_id], status, violations, detail)

    def check_doi_format(self) -> CheckResult:
        # Canonical form means normalization is a no-op: lowercase,
        # prefix-free, and pattern-valid all at once.
        dois = self._unified().column("doi").to_pylist()
        bad = sum(1 for d in dois if d is None or normalize_doi(d) != d)
        return self._result(1, bad, f"{bad} violations / {len(dois)} rows")


    def check_coverage_flags(self) -> CheckResult:
        unified = self._unified()
        doi_map = self._doi_map()
        members: dict[str, set[str]] = {}
        for doi, src in zip(
            doi_map.column("doi").to_pylist(), doi_map.column("source").to_pylist()
        ):
            members.setdefault(src, set()).add(doi)
        dois = unified.column("doi").to_pylist()
        mismatches = 0
        checked = []
        for name in self.cfg.flag_sources:
            source = self._source(name)
            if source is None or not source.flag or source.flag not in unified.column_names:
                continue
            checked.append(name)
            flags = unified.column(source.flag).to_pylist()
            present = members.get(name, set())
            mismatches += sum(
                1 for doi, f in zip(dois, flags) if bool(f) != (doi in present)
            )
        return self._result(
            2, mismatches, f"{mismatches} mismatches ({', '.join(checked)})"
        )


    def check_doi_unique(self) -> CheckResult:
        dois = self._unified().column("doi").to_pylist()
        distinct = len(set(dois))
        dupes = len(dois) - distinct
        return self._result(3, dupes, f"{distinct} unique / {len(dois)} total")


    def check_native_ids(self) -> CheckResult:
        source = self._source(self.cfg.native_id_source)
        pattern = re.compile(
            (source.id_pattern if source and source.id_pattern else None)
            or self.cfg.default_id_pattern
        )
        doi_map = self._doi_map()
        ids = [
            native
            for native, src in zip(
                doi_map.column("native_id").to_pylist(),
                doi_map.column("source").to_pylist(),
            )
            if src == self.cfg.native_id_source and native is not None
        ]
        bad = sum(1 for native in ids if not pattern.fullmatch(native))
        join_detail = ""
        try:
            assigned = set(
                self._table(self.assignments_table)
                .column(self.assignment_work_column)
                .to_pylist()
            )
            distinct_ids = set(ids)
            if distinct_ids:
                rate = len(distinct_ids & assigned) / len(distinct_ids)
                join_detail = f"; topic join rate {rate:.1%} (informational)"
        except Exception:
            join_detail = "; topic join rate unavailable"
        return self._result(
            4, bad, f"{bad} format violations / {len(ids)} ids{join_detail}"
        )


    def check_ontology_orphans(self) -> CheckResult:
        mapped = set(
            self._table("xref/topic_ontology_map.parquet").column("topic_id").to_pylist()
        )
        known = set(self._table(self.topics_table).column("topic_id").to_pylist())
        orphans = len(mapped - known)
        return self._result(5, orphans, f"{orphans} orphan topic_ids / {len(mapped)} mapped")


    def check_patent_join(self) -> CheckResult:
        ros = self._source("ros")
        if ros is None:
            candidates = [s for s in self.registry if s.flag == "has_patent"]
            if not candidates:
                raise ValueError("no patent-pair source in the registry")
            ros = candidates[0]
        table = read_table(ros.table_path)
        raw = table.column(ros.doi_column).to_pylist()
        size = min(self.cfg.ros_sample_size, len(raw))
        rng = random.Random(self.seed)
        sample = raw if size == len(raw) else rng.sample(raw, size)
        unified_dois = set(self._unified().column("doi").to_pylist())
        hits = sum(
            1
            for value in sample
            if (normalize_doi(value if isinstance(value, str) else str(value)) or "")
            in unified_dois
        )
        rate = hits / size if size else 0.0
        ok = rate >= self.cfg.ros_min_match_rate
        return self._result(
            6,
            size - hits,
            f"{rate:.1%} match rate on {size} sampled pairs "
            f"(minimum {self.cfg.ros_min_match_rate:.0%})",
            ok=ok,
        )


    def check_citation_correlation(self) -> CheckResult:
        unified = self._unified()
        columns = [
            c for c in unified.column_names if c.startswith("citations_")
        ]
        if len(columns) < 2:
            raise ValueError("need at least two citation columns")
        failures = 0
        details = []
        for left, right in combinations(columns, 2):
            r = pearson(
                unified.column(left).to_pylist(), unified.column(right).to_pylist()
            )
            label = f"{left.removeprefix('citations_')}-{right.removeprefix('citations_')}"
            if r is None:
                failures += 1
                details.append(f"{label}: undefined")
            else:
                details.append(f"{label}: r={r:.3f}")
                if r < self.cfg.min_citation_r:
                    failures += 1
        return self._result(
            7, failures, "; ".join(details) + f" (minimum {self.cfg.min_citation_r})",
            ok=failures == 0,
        )


    def check_year_distribution(self) -> CheckResult:
        years = self._unified().column("year").to_pylist()
        total = len(years)
        year_max = datetime.date.today().year + 1
        nulls = sum(1 for y in years if y is None)
        invalid = sum(
            1 for y in years if y is not None and not (self.cfg.year_min <= y <= year_max)
        )
        null_rate = nulls / total if total else 0.0
        invalid_rate = invalid / total if total else 0.0
        ok = (
            null_rate <= self.cfg.max_null_year_rate
            and invalid_rate <= self.cfg.max_invalid_year_rate
        )
        return self._result(
            8,
            invalid,
            f"NULL {null_rate:.2%} (max {self.cfg.max_null_year_rate:.0%}), "
            f"invalid {invalid_rate:.3%} (max {self.cfg.max_invalid_year_rate:.1%})",
            ok=ok,
        )


    def check_spot_checks(self) -> CheckResult:
        if not self.spot_checks:
            return self._result(9, 0, "no spot checks configured")
        unified = self._unified()
        rows = {}
        flag_cols = [c for c in unified.column_names if c.startswith("has_")]
        dois = unified.column("doi").to_pylist()
        flag_data = {c: unified.column(c).to_pylist() for c in flag_cols}
        wanted = {normalize_doi(s.doi) for s in self.spot_checks}
        for i, doi in enumerate(dois):
            if doi in wanted:
                rows[doi] = {c: flag_data[c][i] for c in flag_cols}
        violations = 0
        details = []
        for spot in self.spot_checks:
            doi = normalize_doi(spot.doi)
            row = rows.get(doi)
            if row is None:
                violations += 1
                details.append(f"{spot.doi}: missing")
                continue
            wrong = [
                flag
                for flag, expected in spot.flags.items()
                if bool(row.get(flag)) != bool(expected)
            ]
            if wrong:
                violations += 1
                details.append(f"{spot.doi}: wrong {','.join(wrong)}")
        return self._result(
            9, violations, "; ".join(details) if details else f"{len(self.spot_checks)} papers verified"
        )


    def check_vignette_counts(self, recompute_counts) -> CheckResult:
        counts_file = self.lake / self.counts_path
        if not counts_file.is_file():
            return CheckResult(10, CHECK_NAMES[10], "fail", 0, "missing input: no stored counts")
        if recompute_counts is None:
            raise ValueError("no recompute callable provided")
        stored = json.loads(counts_file.read_text())
        current = recompute_counts()
        mismatches = []
        for vignette in sorted(set(stored) | set(current)):
            if stored.get(vignette) != current.get(vignette):
                mismatches.append(vignette)
        return self._result(
            10,
            len(mismatches),
            "all counts match" if not mismatches else f"mismatch in {', '.join(mismatches)}",
        )


def checks_to_csv(results: Sequence[CheckResult], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["check_id", "name", "status", "violation_count", "detail"])
        for r in results:
            writer.writerow([r.check_id, r.name, r.status, r.violation_count, r.detail])


def checks_to_text(results: Sequence[CheckResult]) -> str:
    lines = [f"{'#':>2}  {'check':<22} {'status':<6} {'violations':>10}  detail"]
    for r in results:
        lines.append(
            f"{r.check_id:>2}  {r.name:<22} {r.status.upper():<6} {r.violation_count:>10}  {r.detail}"
        )
    passed = sum(1 for r in results if r.passed)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
