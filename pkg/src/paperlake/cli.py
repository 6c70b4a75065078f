"""Pipeline orchestration: the five build stages as subcommands.

Stages run in dependency order (`ingest` -> `link` -> `align` ->
analytics); each is idempotent, so rerunning over unchanged inputs
produces byte-identical outputs.  A lock file gives one run exclusive
ownership of the lake while analytic subcommands stay read-only.

Exit codes: 0 ok, 1 stage or check failure, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pyarrow as pa
from filelock import FileLock

from . import __version__, evaluation, vignettes
from .align.embedding import EmbeddingSet, read_vectors
from .align.hybrid import (
    coverage_summary,
    mappings_to_table,
    run_hybrid,
    table_to_mappings,
    term_label_rows,
)
from .align.types import Topic
from .checks import CheckRunner, checks_to_csv, checks_to_text
from .config import PipelineConfig, load_config
from .ddl import write_view_ddl
from .errors import ConfigError, LakeError
from .ingest import (
    OntologyTerm,
    convert_csv,
    convert_jsonl,
    parse_obo,
    parse_ontology_csv,
    parse_skos_ntriples,
    write_ontology_tables,
)
from .linkage import (
    LinkReport,
    build_doi_map,
    compute_temporal_flags,
    intersection_counts,
    materialize_unified,
    source_coverage,
)
from .schema_report import build_report, render_json, render_text
from .tableio import read_table, write_table

log = logging.getLogger("paperlake")

STAGES = ("ingest", "link", "align", "eval", "validate", "stats", "schema-report", "all")


# ---------------------------------------------------------------------------
# shared loading helpers


def _load_topics(cfg: PipelineConfig) -> list[Topic]:
    if cfg.topics is None:
        raise LakeError("config has no topics entry")
    table = read_table(cfg.topics.table_path(cfg.lake_root))
    spec = cfg.topics

    def col(name: str) -> list:
        if name in table.column_names:
            return table.column(name).to_pylist()
        return [""] * table.num_rows

    return [
        Topic(topic_id=str(t), display_name=str(d or ""), subfield=str(s or ""),
              field=str(f or ""), domain=str(m or ""))
        for t, d, s, f, m in zip(
            col(spec.id_column), col(spec.display_name_column),
            col(spec.subfield_column), col(spec.field_column),
            col(spec.domain_column),
        )
    ]


def _load_ontology_terms(cfg: PipelineConfig) -> dict[str, list[OntologyTerm]]:
    out: dict[str, list[OntologyTerm]] = {}
    for entry in cfg.ontologies:
        table = read_table(cfg.lake_root / entry.name / "terms.parquet")
        out[entry.name] = [
            OntologyTerm(
                term_id=row["term_id"], ontology=row["ontology"],
                label=row["label"] or "", synonyms=list(row["synonyms"] or []),
                obsolete=bool(row["obsolete"]),
            )
            for row in table.to_pylist()
        ]
    return out


def _paper_topics(cfg: PipelineConfig, doi_map: pa.Table) -> list[tuple[str, str]]:
    """(doi, topic_id) pairs: topic assignments joined through native ids."""
    if cfg.assignments is None or cfg.topics is None:
        return []
    native_source = cfg.checks.native_id_source
    native_to_doi: dict[str, str] = {}
    for doi, src, native in zip(
        doi_map.column("doi").to_pylist(),
        doi_map.column("source").to_pylist(),
        doi_map.column("native_id").to_pylist(),
    ):
        if src == native_source and native is not None:
            native_to_doi.setdefault(native, doi)
    table = read_table(cfg.assignments.table_path(cfg.lake_root))
    pairs = []
    for work, topic in zip(
        table.column(cfg.assignments.work_column).to_pylist(),
        table.column(cfg.assignments.topic_column).to_pylist(),
    ):
        doi = native_to_doi.get(str(work))
        if doi is not None:
            pairs.append((doi, str(topic)))
    return pairs


def _topic_domains(cfg: PipelineConfig) -> dict[str, str]:
    if cfg.topics is None:
        return {}
    table = read_table(cfg.topics.table_path(cfg.lake_root))
    return {
        str(t): str(d or "")
        for t, d in zip(
            table.column(cfg.topics.id_column).to_pylist(),
            table.column(cfg.topics.domain_column).to_pylist(),
        )
    }


def _counts_recompute(cfg: PipelineConfig):
    def recompute() -> dict:
        unified = read_table(cfg.lake_root / "xref" / "unified_papers.parquet")
        return vignettes.compute_counts(unified)

    return recompute


# ---------------------------------------------------------------------------
# stages


def stage_ingest(cfg: PipelineConfig) -> None:
    tasks = []
    for source in cfg.sources:
        out = source.table_path(cfg.lake_root)
        if source.format == "jsonl":
            tasks.append((source.name, lambda s=source, o=out: convert_jsonl(
                s.input_path, o, source=s.name)))
        else:
            tasks.append((source.name, lambda s=source, o=out: convert_csv(
                s.input_path, o, has_header=s.csv_has_header,
                delimiter=s.csv_delimiter, source=s.name)))
    if cfg.topics is not None:
        tasks.append(("topics", lambda: convert_jsonl(
            cfg.topics.input_path, cfg.topics.table_path(cfg.lake_root), source="topics")
            if cfg.topics.format == "jsonl"
            else convert_csv(cfg.topics.input_path, cfg.topics.table_path(cfg.lake_root),
                             source="topics")))
    if cfg.assignments is not None:
        tasks.append(("assignments", lambda: convert_csv(
            cfg.assignments.input_path, cfg.assignments.table_path(cfg.lake_root),
            source="assignments")
            if cfg.assignments.format == "csv"
            else convert_jsonl(cfg.assignments.input_path,
                               cfg.assignments.table_path(cfg.lake_root),
                               source="assignments")))

    def run_task(item):
        name, fn = item
        started = time.perf_counter()
        report = fn()
        log.info(
            "stage=ingest source=%s rows_read=%d rows_written=%d rows_rejected=%d secs=%.2f",
            name, report.rows_read, report.rows_written, report.rows_rejected,
            time.perf_counter() - started,
        )
        return report

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            list(pool.map(run_task, tasks))
    else:
        for item in tasks:
            run_task(item)

    for entry in cfg.ontologies:
        started = time.perf_counter()
        if entry.format == "obo":
            result = parse_obo(entry.input_path, entry.name)
        elif entry.format == "skos_nt":
            result = parse_skos_ntriples(entry.input_path, entry.name)
        else:
            result = parse_ontology_csv(entry.input_path, entry.name)
        counts = write_ontology_tables(result, cfg.lake_root / entry.name, entry.name)
        log.info(
            "stage=ingest ontology=%s terms=%d edges=%d secs=%.2f",
            entry.name, counts["terms"], counts["hierarchy"],
            time.perf_counter() - started,
        )
    write_view_ddl(cfg.lake_root)


def stage_link(cfg: PipelineConfig) -> None:
    started = time.perf_counter()
    registry = cfg.registry()
    report = LinkReport()
    doi_map = build_doi_map(registry, report)
    write_table(doi_map, cfg.lake_root / "xref" / "doi_map.parquet", source="xref")

    unified = materialize_unified(
        doi_map, registry, year_precedence=cfg.year_precedence, report=report
    )
    write_table(unified, cfg.lake_root / "xref" / "unified_papers.parquet", source="xref")

    flags = compute_temporal_flags(
        unified, sciscinet_year=cfg.sciscinet_year, ros_year=cfg.ros_year
    )
    write_table(flags, cfg.lake_root / "xref" / "paper_temporal_flags.parquet", source="xref")

    combos = intersection_counts(unified, registry)
    write_table(combos, cfg.lake_root / "xref" / "intersection_counts.parquet", source="xref")

    coverage = source_coverage(unified, registry)
    cov_path = cfg.lake_root / "reports" / "source_coverage.csv"
    cov_path.parent.mkdir(parents=True, exist_ok=True)
    with open(cov_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["row_source", "col_source", "n_both", "pct_of_col", "pct_of_all"])
        for row in coverage:
            writer.writerow(
                [row["row_source"], row["col_source"], row["n_both"],
                 "" if row["pct_of_col"] is None else f"{row['pct_of_col']:.6f}",
                 "" if row["pct_of_all"] is None else f"{row['pct_of_all']:.6f}"]
            )

    link_report = {
        "excluded_rows": report.excluded_rows,
        "duplicate_rows": report.duplicate_rows,
        "unified_rows": unified.num_rows,
    }
    (cfg.lake_root / "reports" / "link_report.json").write_text(
        json.dumps(link_report, indent=2, sort_keys=True) + "\n"
    )
    write_view_ddl(cfg.lake_root)
    log.info(
        "stage=link unified_rows=%d doi_map_rows=%d secs=%.2f",
        unified.num_rows, doi_map.num_rows, time.perf_counter() - started,
    )


def _write_labels(cfg: PipelineConfig, topics, ontology_terms) -> list[tuple[str, str, str, str]]:
    topics_table = pa.table(
        {
            "id": pa.array([t.topic_id for t in topics], pa.string()),
            "text": pa.array([t.display_name for t in topics], pa.string()),
        }
    )
    write_table(topics_table, cfg.lake_root / "align" / "labels_topics.parquet", source="align")
    rows: list[tuple[str, str, str, str]] = []
    embedding_ontologies = [o.name for o in cfg.ontologies if o.method == "embedding"]
    for name in embedding_ontologies:
        rows.extend(term_label_rows(name, ontology_terms.get(name, [])))
    terms_table = pa.table(
        {
            "id": pa.array([r[0] for r in rows], pa.string()),
            "text": pa.array([r[1] for r in rows], pa.string()),
            "ontology": pa.array([r[2] for r in rows], pa.string()),
            "term_id": pa.array([r[3] for r in rows], pa.string()),
        }
    )
    write_table(terms_table, cfg.lake_root / "align" / "labels_terms.parquet", source="align")
    return rows


def stage_align(cfg: PipelineConfig) -> None:
    started = time.perf_counter()
    topics = _load_topics(cfg)
    ontology_terms = _load_ontology_terms(cfg)
    label_rows = _write_labels(cfg, topics, ontology_terms)

    topic_vectors = None
    term_vectors: dict[str, EmbeddingSet] = {}
    needs_vectors = any(o.method == "embedding" for o in cfg.ontologies)
    if needs_vectors:
        # Label tables are written above *before* this hard stop so the
        # exporter has its input on the first run.
        if cfg.vector_topics is None or not Path(cfg.vector_topics).is_file():
            raise LakeError(
                f"embedding alignment needs topic vectors at {cfg.vector_topics}; "
                "run the embedding exporter over align/labels_topics.parquet first"
            )
        if cfg.vector_terms is None or not Path(cfg.vector_terms).is_file():
            raise LakeError(
                f"embedding alignment needs term vectors at {cfg.vector_terms}; "
                "run the embedding exporter over align/labels_terms.parquet first"
            )
        topic_vectors = read_vectors(cfg.vector_topics)
        all_terms = read_vectors(cfg.vector_terms)
        row_info = {row_id: (ont, term_id, text) for row_id, text, ont, term_id in label_rows}
        by_ontology: dict[str, tuple[list[str], list[int], list[str]]] = {}
        for idx, row_id in enumerate(all_terms.ids):
            info = row_info.get(row_id)
            if info is None:
                raise LakeError(
                    f"vector file {cfg.vector_terms} has unknown label id {row_id!r}"
                )
            ont, term_id, text = info
            owners, indices, texts = by_ontology.setdefault(ont, ([], [], []))
            owners.append(term_id)
            indices.append(idx)
            texts.append(text)
        for ont, (owners, indices, texts) in by_ontology.items():
            term_vectors[ont] = EmbeddingSet(
                ids=owners,
                vectors=all_terms.vectors[indices],
                dimension=all_terms.dimension,
                texts=texts,
            )

    mappings = run_hybrid(
        topics, ontology_terms, cfg.method_registry(),
        topic_vectors=topic_vectors, term_vectors=term_vectors,
    )
    write_table(
        mappings_to_table(mappings),
        cfg.lake_root / "xref" / "topic_ontology_map.parquet",
        source="xref",
    )
    summary = coverage_summary(mappings, n_topics=len(topics))
    cov_path = cfg.lake_root / "reports" / "alignment_coverage.csv"
    cov_path.parent.mkdir(parents=True, exist_ok=True)
    with open(cov_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["tier", "min_similarity", "n_mappings", "n_topics", "pct_topics"])
        for row in summary:
            writer.writerow(
                [row["tier"], row["min_similarity"], row["n_mappings"], row["n_topics"],
                 "" if row["pct_topics"] is None else f"{row['pct_topics']:.6f}"]
            )
    write_view_ddl(cfg.lake_root)
    log.info(
        "stage=align mappings=%d topics=%d secs=%.2f",
        len(mappings), len(topics), time.perf_counter() - started,
    )


def stage_eval(cfg: PipelineConfig) -> None:
    started = time.perf_counter()
    table = read_table(cfg.lake_root / "xref" / "topic_ontology_map.parquet")
    mappings = table_to_mappings(table)
    out_dir = cfg.lake_root / "reports" / "eval"
    strata = [
        evaluation.StratumSpec(s.name, s.low, s.high, s.size) for s in cfg.eval.strata
    ]
    gold_file = cfg.eval.gold_file
    if gold_file is None or not Path(gold_file).is_file():
        template = evaluation.stratified_sample(mappings, strata, seed=cfg.seed)
        evaluation.write_gold_csv(out_dir / "gold_template.csv", template)
        log.info(
            "stage=eval template_rows=%d secs=%.2f (no labelled gold file; "
            "annotate the template and set eval.gold_file)",
            len(template), time.perf_counter() - started,
        )
        return
    gold = [g for g in evaluation.read_gold_csv(gold_file) if g.label]
    if not gold:
        raise LakeError(f"gold file {gold_file} has no labelled rows")
    operating = [m for m in mappings if m.similarity >= cfg.eval.operating_threshold]
    result = evaluation.score_strict(operating, gold)
    thresholds = evaluation.default_thresholds(
        cfg.eval.sweep_low, cfg.eval.sweep_high, cfg.eval.sweep_step
    )
    points = evaluation.pr_sweep(mappings, gold, thresholds)
    evaluation.write_sweep_csv(out_dir / "sweep.csv", points)
    payload = {
        "operating_threshold": cfg.eval.operating_threshold,
        "precision": result.precision,
        "recall": result.recall,
        "f1": result.f1,
        "tp": result.tp,
        "fp": result.fp,
        "fn": result.fn,
        "per_stratum_precision": result.per_stratum_precision,
        "fn_pairs": [list(k) for k in result.fn_pairs],
        "n_gold": len(gold),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "scores.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    log.info(
        "stage=eval gold=%d P=%s R=%s F1=%s secs=%.2f",
        len(gold), result.precision, result.recall, result.f1,
        time.perf_counter() - started,
    )


def stage_stats(cfg: PipelineConfig) -> None:
    started = time.perf_counter()
    unified = read_table(cfg.lake_root / "xref" / "unified_papers.parquet")
    doi_map = read_table(cfg.lake_root / "xref" / "doi_map.parquet")
    topic_map = read_table(cfg.lake_root / "xref" / "topic_ontology_map.parquet")
    counts = vignettes.run_all_vignettes(
        unified,
        _paper_topics(cfg, doi_map),
        topic_map,
        _topic_domains(cfg),
        cfg.lake_root / "reports",
    )
    log.info(
        "stage=stats counts=%s secs=%.2f",
        json.dumps(counts, sort_keys=True), time.perf_counter() - started,
    )


def stage_validate(cfg: PipelineConfig, report_format: str = "text") -> bool:
    started = time.perf_counter()
    runner = CheckRunner(
        cfg.lake_root,
        cfg.registry(),
        thresholds=cfg.checks,
        spot_checks=cfg.spot_checks,
        seed=cfg.seed,
        topics_table=(
            str(cfg.topics.table_path(cfg.lake_root).relative_to(cfg.lake_root))
            if cfg.topics else "openalex/topics.parquet"
        ),
        assignments_table=(
            str(cfg.assignments.table_path(cfg.lake_root).relative_to(cfg.lake_root))
            if cfg.assignments else "openalex/work_topics.parquet"
        ),
        assignment_work_column=(
            cfg.assignments.work_column if cfg.assignments else "work_id"
        ),
    )
    results = runner.run(recompute_counts=_counts_recompute(cfg))
    checks_to_csv(results, cfg.lake_root / "reports" / "checks.csv")
    text = checks_to_text(results)
    (cfg.lake_root / "reports" / "checks.txt").write_text(text + "\n")
    if report_format == "json":
        print(json.dumps([vars(r) for r in results], indent=2, sort_keys=True))
    else:
        print(text)
    ok = all(r.passed for r in results)
    log.info(
        "stage=validate passed=%d/%d secs=%.2f",
        sum(r.passed for r in results), len(results), time.perf_counter() - started,
    )
    return ok


def stage_schema_report(cfg: PipelineConfig, report_format: str = "text") -> None:
    report = build_report(cfg.lake_root)
    print(render_json(report) if report_format == "json" else render_text(report), end="")


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paperlake",
        description="Build and validate a multi-source scholarly data lake.",
    )
    parser.add_argument("--version", action="version", version=f"paperlake {__version__}")
    sub = parser.add_subparsers(dest="stage", required=True)
    for stage in STAGES:
        p = sub.add_parser(stage, help=f"run the {stage} stage")
        p.add_argument("--config", required=True, help="pipeline config file (YAML)")
        p.add_argument("--lake", help="override the lake root directory")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--threads", type=int, help="override the configured thread count")
        p.add_argument("--format", choices=("text", "json"), default="text",
                       help="report format for validate/schema-report")
    return parser


def _apply_overrides(cfg: PipelineConfig, args: argparse.Namespace) -> PipelineConfig:
    # the env-var default is consulted inside load_config; the flag wins
    if args.lake:
        cfg.lake_root = Path(args.lake)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = max(1, args.threads)
    return cfg


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    read_only = args.stage in ("validate", "stats", "eval", "schema-report")
    cfg.lake_root.mkdir(parents=True, exist_ok=True)
    lock = FileLock(cfg.lake_root / ".lock")
    try:
        if read_only:
            return _dispatch(cfg, args)
        with lock.acquire(timeout=60):
            return _dispatch(cfg, args)
    except (LakeError, ValueError, OSError) as exc:
        log.error("stage %s failed: %s", args.stage, exc)
        return 1


def _dispatch(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    stage = args.stage
    if stage == "ingest":
        stage_ingest(cfg)
    elif stage == "link":
        stage_link(cfg)
    elif stage == "align":
        stage_align(cfg)
    elif stage == "eval":
        stage_eval(cfg)
    elif stage == "stats":
        stage_stats(cfg)
    elif stage == "validate":
        return 0 if stage_validate(cfg, args.format) else 1
    elif stage == "schema-report":
        stage_schema_report(cfg, args.format)
    elif stage == "all":
        stage_ingest(cfg)
        stage_link(cfg)
        stage_align(cfg)
        stage_stats(cfg)  # before validate: check 10 replays the stored counts
        stage_eval(cfg)
        return 0 if stage_validate(cfg, args.format) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
