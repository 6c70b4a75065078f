"""Cross-source batch analytics over the unified lake.

Four reusable computations: disruption by code availability,
retraction enrichment by ontology group, patent-citation impact, and
cross-source citation reliability.  Each emits a CSV and a JSON
summary; the combined counts file is what the check suite replays.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pyarrow as pa

from .checks import citation_agreement

log = logging.getLogger(__name__)


@dataclass
class GroupSummary:
    group_key: str
    n: int
    mean: float
    median: float
    p10: float
    p90: float


def summarize(group_key: str, values: Sequence[float]) -> GroupSummary:
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise ValueError(f"group {group_key!r} is empty")
    return GroupSummary(
        group_key=group_key,
        n=int(data.size),
        mean=float(data.mean()),
        median=float(np.median(data)),
        p10=float(np.percentile(data, 10)),  # linear interpolation
        p90=float(np.percentile(data, 90)),
    )


def disruption_by_code(
    unified: pa.Table, *, metric_column: str = "cd5", flag_column: str = "has_pwc"
) -> dict[str, GroupSummary]:
    """Disruption summaries for papers with vs without code, nulls excluded."""
    metric = unified.column(metric_column).to_pylist()
    flags = unified.column(flag_column).to_pylist()
    groups = {"with_code": [], "without_code": []}
    for value, flag in zip(metric, flags):
        if value is None:
            continue
        groups["with_code" if flag else "without_code"].append(value)
    out = {}
    for key, values in groups.items():
        if not values:
            log.warning("disruption_by_code: group %s has no rows, omitted", key)
            continue
        out[key] = summarize(key, values)
    return out


@dataclass
class EnrichmentRow:
    group: str
    enrichment: float | None
    n_retracted: int
    n_total: int


def retraction_enrichment(
    unified: pa.Table,
    paper_topics: Sequence[tuple[str, str]],  # (doi, topic_id)
    topic_map: pa.Table,
    topic_domains: dict[str, str],
    *,
    retraction_flag: str = "has_retraction",
    min_support: int = 20,
) -> tuple[list[EnrichmentRow], dict]:
    """Retraction-rate enrichment per (ontology, topic domain) group.

    The baseline rate is computed over every paper with at least one
    topic assignment; groups below `min_support` papers are suppressed.
    A zero baseline makes every enrichment undefined (None).
    """
    retracted = {
        doi
        for doi, flag in zip(
            unified.column("doi").to_pylist(),
            unified.column(retraction_flag).to_pylist(),
        )
        if flag
    }
    known_dois = set(unified.column("doi").to_pylist())

    topic_papers: dict[str, set[str]] = {}
    population: set[str] = set()
    for doi, topic_id in paper_topics:
        if doi not in known_dois:
            continue
        population.add(doi)
        topic_papers.setdefault(topic_id, set()).add(doi)

    baseline = (
        len(population & retracted) / len(population) if population else 0.0
    )

    group_topics: dict[str, set[str]] = {}
    for topic_id, ontology in zip(
        topic_map.column("topic_id").to_pylist(),
        topic_map.column("ontology").to_pylist(),
    ):
        domain = topic_domains.get(topic_id)
        if domain is None:  # topic outside the taxonomy: no group
            continue
        group_topics.setdefault(f"{ontology}:{domain}", set()).add(topic_id)

    rows: list[EnrichmentRow] = []
    for group in sorted(group_topics):
        papers: set[str] = set()
        for topic_id in group_topics[group]:
            papers |= topic_papers.get(topic_id, set())
        n_total = len(papers)
        if n_total < min_support:
            continue
        n_retracted = len(papers & retracted)
        rate = n_retracted / n_total
        enrichment = (rate / baseline) if baseline > 0 else None
        rows.append(EnrichmentRow(group, enrichment, n_retracted, n_total))
    rows.sort(key=lambda r: (-(r.enrichment if r.enrichment is not None else -1.0), r.group))
    counts = {
        "population": len(population),
        "retracted": len(population & retracted),
        "groups_emitted": len(rows),
    }
    return rows, counts


@dataclass
class ImpactRow:
    metric: str
    n_flagged: int
    mean_flagged: float | None
    median_flagged: float | None
    n_other: int
    mean_other: float | None
    median_other: float | None
    ratio_of_means: float | None


def patent_impact(
    unified: pa.Table,
    metrics: Sequence[str] = ("citations_openalex", "fwci"),
    *,
    flag_column: str = "has_patent",
) -> list[ImpactRow]:
    """Mean/median of each metric for patent-cited vs other papers."""
    flags = unified.column(flag_column).to_pylist()
    rows = []
    for metric in metrics:
        values = unified.column(metric).to_pylist()
        flagged = [v for v, f in zip(values, flags) if f and v is not None]
        other = [v for v, f in zip(values, flags) if not f and v is not None]
        if not flagged or not other:
            log.warning("patent_impact: %s has an empty group, ratios omitted", metric)
        mean_f = float(np.mean(flagged)) if flagged else None
        mean_o = float(np.mean(other)) if other else None
        ratio = (mean_f / mean_o) if mean_f is not None and mean_o else None
        rows.append(
            ImpactRow(
                metric=metric,
                n_flagged=len(flagged),
                mean_flagged=mean_f,
                median_flagged=float(np.median(flagged)) if flagged else None,
                n_other=len(other),
                mean_other=mean_o,
                median_other=float(np.median(other)) if other else None,
                ratio_of_means=ratio,
            )
        )
    return rows


def citation_reliability(unified: pa.Table):
    """Vignette wrapper over the validation module's agreement statistics."""
    return citation_agreement(unified)


# ---------------------------------------------------------------------------
# Report emission


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _dump_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def compute_counts(unified: pa.Table) -> dict:
    """One headline count per vignette, replayed by the reproducibility check.

    1. papers with code and a disruption score
    2. retracted papers with a disruption score
    3. patent-cited papers
    4. papers with citation counts in every large source
    """
    cd5 = unified.column("cd5").to_pylist()
    has_pwc = unified.column("has_pwc").to_pylist()
    has_retraction = unified.column("has_retraction").to_pylist()
    has_patent = unified.column("has_patent").to_pylist()

    with_code = sum(1 for v, f in zip(cd5, has_pwc) if f and v is not None)
    retracted_with_metrics = sum(
        1 for v, f in zip(cd5, has_retraction) if f and v is not None
    )
    patent_cited = sum(1 for f in has_patent if f)

    citation_cols = [c for c in unified.column_names if c.startswith("citations_")]
    all_sources = 0
    if citation_cols:
        data = [unified.column(c).to_pylist() for c in citation_cols]
        all_sources = sum(1 for values in zip(*data) if all(v is not None for v in values))

    return {
        "vignette_1": with_code,
        "vignette_2": retracted_with_metrics,
        "vignette_3": patent_cited,
        "vignette_4": all_sources,
    }


def run_all_vignettes(
    unified: pa.Table,
    paper_topics: Sequence[tuple[str, str]],
    topic_map: pa.Table,
    topic_domains: dict[str, str],
    reports_dir: str | Path,
) -> dict:
    """Run the four vignettes, write their reports, return the counts dict."""
    reports = Path(reports_dir)

    groups = disruption_by_code(unified)
    _write_csv(
        reports / "vignette_1" / "groups.csv",
        ["group", "n", "mean", "median", "p10", "p90"],
        [
            [g.group_key, g.n, f"{g.mean:.10g}", f"{g.median:.10g}",
             f"{g.p10:.10g}", f"{g.p90:.10g}"]
            for g in groups.values()
        ],
    )
    _dump_json(
        reports / "vignette_1" / "summary.json",
        {k: vars(v) for k, v in groups.items()},
    )

    enrichment, _ = retraction_enrichment(unified, paper_topics, topic_map, topic_domains)
    _write_csv(
        reports / "vignette_2" / "enrichment.csv",
        ["group", "enrichment", "n_retracted", "n_total"],
        [
            [r.group, "" if r.enrichment is None else f"{r.enrichment:.10g}",
             r.n_retracted, r.n_total]
            for r in enrichment
        ],
    )
    _dump_json(reports / "vignette_2" / "summary.json", [vars(r) for r in enrichment])

    impact = patent_impact(unified)
    _write_csv(
        reports / "vignette_3" / "impact.csv",
        ["metric", "n_flagged", "mean_flagged", "median_flagged",
         "n_other", "mean_other", "median_other", "ratio_of_means"],
        [
            [r.metric, r.n_flagged,
             "" if r.mean_flagged is None else f"{r.mean_flagged:.10g}",
             "" if r.median_flagged is None else f"{r.median_flagged:.10g}",
             r.n_other,
             "" if r.mean_other is None else f"{r.mean_other:.10g}",
             "" if r.median_other is None else f"{r.median_other:.10g}",
             "" if r.ratio_of_means is None else f"{r.ratio_of_means:.10g}"]
            for r in impact
        ],
    )
    _dump_json(reports / "vignette_3" / "summary.json", [vars(r) for r in impact])

    agreement, binned = citation_reliability(unified)
    _write_csv(
        reports / "vignette_4" / "agreement.csv",
        ["pair", "pearson_r", "mean_abs_diff", "n", "ba_mean_diff", "ba_loa_low", "ba_loa_high"],
        [
            ["|".join(s.source_pair),
             "" if s.pearson_r is None else f"{s.pearson_r:.10g}",
             f"{s.mean_abs_diff:.10g}", s.n,
             f"{s.bland_altman[0]:.10g}", f"{s.bland_altman[1]:.10g}",
             f"{s.bland_altman[2]:.10g}"]
            for s in agreement
        ],
    )
    _write_csv(
        reports / "vignette_4" / "binned.csv",
        ["pair", "bin", "n", "mean_rel_diff"],
        [
            [b["pair"], b["bin"], b["n"],
             "" if b["mean_rel_diff"] is None else f"{b['mean_rel_diff']:.10g}"]
            for b in binned
        ],
    )
    _dump_json(
        reports / "vignette_4" / "summary.json",
        {
            "agreement": [
                {
                    "pair": list(s.source_pair),
                    "pearson_r": s.pearson_r,
                    "mean_abs_diff": s.mean_abs_diff,
                    "n": s.n,
                    "bland_altman": list(s.bland_altman),
                }
                for s in agreement
            ],
            "binned": binned,
        },
    )

    counts = compute_counts(unified)
    _dump_json(reports / "vignette_counts.json", counts)
    return counts
