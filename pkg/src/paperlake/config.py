"""Pipeline configuration: one YAML file describing sources, ontologies,
method routing, thresholds, and seeds.

Unknown keys are rejected so typos surface as config errors (exit code
2) before any work starts.  Relative paths resolve against the config
file's directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .align.hybrid import MethodEntry
from .checks import CheckThresholds, SpotCheck
from .errors import ConfigError
from .linkage import SourceSpec

LAKE_ENV_VAR = "PAPERLAKE_LAKE_ROOT"

SOURCE_FORMATS = ("jsonl", "csv")
ONTOLOGY_FORMATS = ("obo", "skos_nt", "csv")


def _take(mapping: dict, allowed: set[str], context: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"{context}: unknown keys {unknown}")


@dataclass
class SourceEntry:
    name: str
    input_path: Path
    format: str
    table: str
    doi_column: str
    id_column: str | None = None
    id_pattern: str | None = None
    year_column: str | None = None
    citation_column: str | None = None
    extra_columns: tuple[str, ...] = ()
    flag: str | None = None
    csv_has_header: bool = True
    csv_delimiter: str = ","

    def table_path(self, lake_root: Path) -> Path:
        return lake_root / self.name / f"{self.table}.parquet"

    def to_spec(self, lake_root: Path) -> SourceSpec:
        return SourceSpec(
            name=self.name,
            table_path=str(self.table_path(lake_root)),
            doi_column=self.doi_column,
            id_column=self.id_column,
            id_pattern=self.id_pattern,
            year_column=self.year_column,
            citation_column=self.citation_column,
            extra_columns=self.extra_columns,
            flag=self.flag,
        )


@dataclass
class OntologyEntry:
    name: str
    input_path: Path
    format: str
    method: str
    threshold: float
    top_k: int = 20

    def to_method_entry(self) -> MethodEntry:
        return MethodEntry(self.name, self.method, self.threshold, self.top_k)


@dataclass
class TopicsEntry:
    input_path: Path
    format: str = "jsonl"
    schema_dir: str = "openalex"
    table: str = "topics"
    id_column: str = "topic_id"
    display_name_column: str = "display_name"
    subfield_column: str = "subfield"
    field_column: str = "field"
    domain_column: str = "domain"

    def table_path(self, lake_root: Path) -> Path:
        return lake_root / self.schema_dir / f"{self.table}.parquet"


@dataclass
class AssignmentsEntry:
    input_path: Path
    format: str = "csv"
    schema_dir: str = "openalex"
    table: str = "work_topics"
    work_column: str = "work_id"
    topic_column: str = "topic_id"

    def table_path(self, lake_root: Path) -> Path:
        return lake_root / self.schema_dir / f"{self.table}.parquet"


@dataclass
class StratumEntry:
    name: str
    low: float
    high: float | None
    size: int


@dataclass
class EvalSettings:
    gold_file: Path | None = None
    operating_threshold: float = 0.85
    strata: tuple[StratumEntry, ...] = (
        StratumEntry("exact", 0.95, None, 50),
        StratumEntry("high", 0.85, 0.95, 100),
        StratumEntry("mid", 0.75, 0.85, 100),
        StratumEntry("borderline", 0.65, 0.75, 50),
    )
    sweep_low: float = 0.60
    sweep_high: float = 1.00
    sweep_step: float = 0.01


@dataclass
class PipelineConfig:
    lake_root: Path
    sources: list[SourceEntry]
    ontologies: list[OntologyEntry]
    topics: TopicsEntry | None = None
    assignments: AssignmentsEntry | None = None
    vector_topics: Path | None = None
    vector_terms: Path | None = None
    sciscinet_year: int = 2022
    ros_year: int = 2023
    year_precedence: tuple[str, ...] = ("openalex", "s2ag", "sciscinet")
    checks: CheckThresholds = field(default_factory=CheckThresholds)
    spot_checks: list[SpotCheck] = field(default_factory=list)
    eval: EvalSettings = field(default_factory=EvalSettings)
    seed: int = 42
    threads: int = 1

    def registry(self) -> list[SourceSpec]:
        return [s.to_spec(self.lake_root) for s in self.sources]

    def method_registry(self) -> list[MethodEntry]:
        return [o.to_method_entry() for o in self.ontologies]


def _as_path(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else base / path


def _parse_source(raw: dict, base: Path) -> SourceEntry:
    _take(
        raw,
        {
            "name", "input", "format", "table", "doi_column", "id_column",
            "id_pattern", "year_column", "citation_column", "extra_columns",
            "flag", "csv_has_header", "csv_delimiter",
        },
        f"source {raw.get('name', '?')!r}",
    )
    for key in ("name", "input", "format", "doi_column"):
        if key not in raw:
            raise ConfigError(f"source entry missing required key {key!r}")
    if raw["format"] not in SOURCE_FORMATS:
        raise ConfigError(f"source {raw['name']!r}: format must be one of {SOURCE_FORMATS}")
    return SourceEntry(
        name=raw["name"],
        input_path=_as_path(base, raw["input"]),
        format=raw["format"],
        table=raw.get("table", raw["name"]),
        doi_column=raw["doi_column"],
        id_column=raw.get("id_column"),
        id_pattern=raw.get("id_pattern"),
        year_column=raw.get("year_column"),
        citation_column=raw.get("citation_column"),
        extra_columns=tuple(raw.get("extra_columns", []) or []),
        flag=raw.get("flag", f"has_{raw['name']}"),
        csv_has_header=bool(raw.get("csv_has_header", True)),
        csv_delimiter=raw.get("csv_delimiter", ","),
    )


def _parse_ontology(raw: dict, base: Path) -> OntologyEntry:
    _take(
        raw,
        {"name", "input", "format", "method", "threshold", "top_k"},
        f"ontology {raw.get('name', '?')!r}",
    )
    for key in ("name", "input", "format", "method"):
        if key not in raw:
            raise ConfigError(f"ontology entry missing required key {key!r}")
    if raw["format"] not in ONTOLOGY_FORMATS:
        raise ConfigError(
            f"ontology {raw['name']!r}: format must be one of {ONTOLOGY_FORMATS}"
        )
    return OntologyEntry(
        name=raw["name"],
        input_path=_as_path(base, raw["input"]),
        format=raw["format"],
        method=raw["method"],
        threshold=float(raw.get("threshold", 0.65)),
        top_k=int(raw.get("top_k", 20)),
    )


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    base = path.parent

    _take(
        raw,
        {
            "lake_root", "seed", "threads", "year_precedence", "sources",
            "ontologies", "topics", "assignments", "vectors", "cutoffs",
            "checks", "eval",
        },
        "config",
    )

    lake_value = raw.get("lake_root") or os.environ.get(LAKE_ENV_VAR)
    if not lake_value:
        raise ConfigError(
            f"no lake root: set lake_root in the config, pass --lake, "
            f"or export {LAKE_ENV_VAR}"
        )
    lake_root = _as_path(base, str(lake_value))

    sources = [_parse_source(s, base) for s in raw.get("sources", [])]
    names = [s.name for s in sources]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate source names: {names}")

    ontologies = [_parse_ontology(o, base) for o in raw.get("ontologies", [])]
    onames = [o.name for o in ontologies]
    if len(set(onames)) != len(onames):
        raise ConfigError(f"duplicate ontology names: {onames}")

    topics = None
    if "topics" in raw:
        t = dict(raw["topics"])
        _take(
            t,
            {"input", "format", "schema_dir", "table", "id_column",
             "display_name_column", "subfield_column", "field_column",
             "domain_column"},
            "topics",
        )
        if "input" not in t:
            raise ConfigError("topics entry missing required key 'input'")
        t["input_path"] = _as_path(base, t.pop("input"))
        topics = TopicsEntry(**t)

    assignments = None
    if "assignments" in raw:
        a = dict(raw["assignments"])
        _take(
            a,
            {"input", "format", "schema_dir", "table", "work_column", "topic_column"},
            "assignments",
        )
        if "input" not in a:
            raise ConfigError("assignments entry missing required key 'input'")
        a["input_path"] = _as_path(base, a.pop("input"))
        assignments = AssignmentsEntry(**a)

    vectors = raw.get("vectors") or {}
    _take(dict(vectors), {"topics", "terms"}, "vectors")

    cutoffs = raw.get("cutoffs") or {}
    _take(dict(cutoffs), {"sciscinet_year", "ros_year"}, "cutoffs")

    checks_raw = dict(raw.get("checks") or {})
    spot_raw = checks_raw.pop("spot_checks", [])
    _take(
        checks_raw,
        {"min_citation_r", "max_null_year_rate", "max_invalid_year_rate",
         "year_min", "ros_sample_size", "ros_min_match_rate", "flag_sources",
         "native_id_source"},
        "checks",
    )
    if "flag_sources" in checks_raw:
        checks_raw["flag_sources"] = tuple(checks_raw["flag_sources"])
    thresholds = CheckThresholds(**checks_raw)
    spot_checks = []
    for entry in spot_raw:
        _take(dict(entry), {"doi", "flags"}, "spot_check")
        spot_checks.append(SpotCheck(doi=entry["doi"], flags=dict(entry.get("flags", {}))))

    eval_raw = dict(raw.get("eval") or {})
    _take(
        eval_raw,
        {"gold_file", "operating_threshold", "strata", "sweep"},
        "eval",
    )
    eval_settings = EvalSettings()
    if "gold_file" in eval_raw:
        eval_settings.gold_file = _as_path(base, eval_raw["gold_file"])
    if "operating_threshold" in eval_raw:
        eval_settings.operating_threshold = float(eval_raw["operating_threshold"])
    if "strata" in eval_raw:
        strata = []
        for entry in eval_raw["strata"]:
            _take(dict(entry), {"name", "low", "high", "size"}, "eval stratum")
            strata.append(
                StratumEntry(
                    name=entry["name"],
                    low=float(entry["low"]),
                    high=None if entry.get("high") is None else float(entry["high"]),
                    size=int(entry["size"]),
                )
            )
        eval_settings.strata = tuple(strata)
    if "sweep" in eval_raw:
        sweep = dict(eval_raw["sweep"])
        _take(sweep, {"low", "high", "step"}, "eval sweep")
        eval_settings.sweep_low = float(sweep.get("low", 0.60))
        eval_settings.sweep_high = float(sweep.get("high", 1.00))
        eval_settings.sweep_step = float(sweep.get("step", 0.01))

    config = PipelineConfig(
        lake_root=lake_root,
        sources=sources,
        ontologies=ontologies,
        topics=topics,
        assignments=assignments,
        vector_topics=_as_path(base, vectors["topics"]) if "topics" in vectors else None,
        vector_terms=_as_path(base, vectors["terms"]) if "terms" in vectors else None,
        sciscinet_year=int(cutoffs.get("sciscinet_year", 2022)),
        ros_year=int(cutoffs.get("ros_year", 2023)),
        year_precedence=tuple(raw.get("year_precedence", ("openalex", "s2ag", "sciscinet"))),
        checks=thresholds,
        spot_checks=spot_checks,
        eval=eval_settings,
        seed=int(raw.get("seed", 42)),
        threads=int(raw.get("threads", 1)),
    )
    if config.sciscinet_year <= 0 or config.ros_year <= 0:
        raise ConfigError("cutoff years must be positive")
    # Method registry must route every configured ontology exactly once;
    # dup names were already rejected above.
    for entry in config.method_registry():
        if entry.method == "embedding" and (
            config.vector_topics is None or config.vector_terms is None
        ):
            raise ConfigError(
                f"ontology {entry.ontology!r} routes to embeddings but the "
                "config has no vectors.topics / vectors.terms paths"
            )
    return config
