"""Deterministic synthetic mini-lake for demos and acceptance tests.

Generates six source dumps (~1,000 papers), three small ontologies in
three different native formats, a topic taxonomy with planted exact and
near matches, synthetic embedding vectors, and a ready-to-run pipeline
config.  Everything is a pure function of the seed.
"""

from __future__ import annotations

import hashlib
import json
import random
from pathlib import Path

import numpy as np
import yaml

from .align.embedding import write_vectors
from .align.hybrid import term_label_rows
from .align.text import normalize_label
from .ingest.obo import parse_obo

VECTOR_DIM = 64

_DOMAINS = ("Physical Sciences", "Life Sciences", "Health Sciences", "Social Sciences")

# (display_name, domain); names are planted against the ontologies below.
_TOPICS = [
    ("Machine Learning", "Physical Sciences"),
    ("Graph Theory", "Physical Sciences"),
    ("Optimization", "Physical Sciences"),
    ("Game Theory", "Social Sciences"),
    ("Probability Theory", "Physical Sciences"),
    ("Numerical Analysis", "Physical Sciences"),
    ("Gene Expression", "Life Sciences"),
    ("Protein Folding", "Life Sciences"),
    ("DNA Repair", "Life Sciences"),
    ("Immune Response", "Health Sciences"),
    ("Signal Transduction", "Life Sciences"),
    ("Cell Division", "Life Sciences"),
    ("Soil Chemistry Analysis", "Life Sciences"),
    ("Plant Genetic Resources", "Life Sciences"),
    ("Irrigation System Design", "Physical Sciences"),
    ("Crop Rotation Strategies", "Life Sciences"),
    ("Forest Ecosystem Management", "Life Sciences"),
    ("Soil Erosion Control", "Life Sciences"),
    ("Climate Change Adaptation", "Social Sciences"),
    ("Pesticide Residue Detection", "Health Sciences"),
    ("Apoptosis Regulation", "Life Sciences"),
    ("Metabolic Process Modeling", "Life Sciences"),
    ("Photosynthesis Efficiency", "Life Sciences"),
    ("Neural Development", "Life Sciences"),
    ("Medieval History", "Social Sciences"),
    ("Corporate Finance", "Social Sciences"),
    ("Urban Planning", "Social Sciences"),
    ("Quantum Computing", "Physical Sciences"),
    ("Fluid Dynamics", "Physical Sciences"),
    ("Particle Physics", "Physical Sciences"),
    ("Organic Synthesis", "Physical Sciences"),
    ("Catalysis Research", "Physical Sciences"),
    ("Epidemiology Methods", "Health Sciences"),
    ("Clinical Trial Design", "Health Sciences"),
    ("Public Health Policy", "Health Sciences"),
    ("Medical Imaging", "Health Sciences"),
    ("Labor Economics", "Social Sciences"),
    ("Educational Psychology", "Social Sciences"),
    ("Number Theory", "Physical Sciences"),
    ("Control Theory", "Physical Sciences"),
    ("Aquaculture Systems", "Life Sciences"),
    ("Organic Farming Practice", "Life Sciences"),
    ("Water Quality Assessment", "Life Sciences"),
    ("Forestry Management Planning", "Life Sciences"),
    ("Cell Signaling Networks", "Life Sciences"),
    ("Radiation Response", "Life Sciences"),
    ("Cell Proliferation Studies", "Life Sciences"),
    ("Programmed Cell Death", "Life Sciences"),
    ("Soil Chemical Properties Survey", "Life Sciences"),
    ("Statistical Inference Methods", "Physical Sciences"),
    ("Irrigation Networks", "Physical Sciences"),
    ("Pesticide Exposure", "Health Sciences"),
    ("Aquacultural Systems", "Life Sciences"),
    ("Forest Inventory", "Life Sciences"),
    ("Immune Signaling", "Life Sciences"),
    ("Folding Intermediates of Protein", "Life Sciences"),
]

_MSC_TERMS = [
    ("MSC68T05", "machine learning", ["statistical learning"]),
    ("MSC05C99", "graph theory", []),
    ("MSC90C26", "optimization", ["mathematical optimization"]),
    ("MSC91A05", "game theory", []),
    ("MSC60A05", "probability theory", ["probability"]),
    ("MSC65D99", "numerical analysis", []),
    ("MSC11A01", "number theory", []),
    ("MSC93C05", "control theory", ["control systems"]),
    ("MSC55P99", "topology", []),
    ("MSC37B02", "dynamical systems", []),
    ("MSC62F10", "statistics", ["statistical inference"]),
    ("MSC14A10", "algebraic geometry", []),
]

_GO_TERMS = [
    ("GO:0010468", "gene expression", ["expression of genes"]),
    ("GO:0006457", "protein folding", ["protein refolding"]),
    ("GO:0006281", "dna repair", []),
    ("GO:0006955", "immune response", ["immunity"]),
    ("GO:0007165", "signal transduction", ["cell signaling"]),
    ("GO:0051301", "cell division", []),
    ("GO:0006915", "apoptosis", ["programmed cell death", "apoptotic process"]),
    ("GO:0008152", "metabolic process", ["metabolism"]),
    ("GO:0015979", "photosynthesis", []),
    ("GO:0048666", "neuron development", ["neural development"]),
    ("GO:0009314", "response to radiation", []),
    ("GO:0008283", "cell population proliferation", ["cell proliferation"]),
]

_AGRO_TERMS = [
    ("c_7156", "soil chemistry", ["soil chemical properties"]),
    ("c_7163", "soil physics", []),
    ("c_5956", "plant genetics", ["plant genetic processes"]),
    ("c_1955", "crop rotation", []),
    ("c_3954", "irrigation systems", ["irrigation equipment"]),
    ("c_3055", "forestry", ["forest management"]),
    ("c_541", "aquaculture", []),
    ("c_7135", "soil erosion", []),
    ("c_16140", "climate change", ["climatic change"]),
    ("c_5723", "pesticide residues", []),
    ("c_26708", "organic agriculture", ["organic farming"]),
    ("c_8309", "water quality", []),
]


def hash_embedding(text: str, dim: int = VECTOR_DIM) -> np.ndarray:
    """Deterministic character-trigram hashing vector for one string.

    Identical strings map to identical vectors, overlapping strings to
    nearby ones, which is all the pipeline needs from a stand-in for a
    real sentence-embedding model.
    """
    vec = np.zeros(dim, dtype=np.float64)
    padded = f" {normalize_label(text)} "
    for i in range(len(padded) - 2):
        digest = hashlib.blake2b(padded[i : i + 3].encode(), digest_size=8).digest()
        index = int.from_bytes(digest[:4], "little") % dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vec[index] += sign
    if not vec.any():
        vec[0] = 1.0
    return vec


def _write_obo(path: Path) -> None:
    lines = ["format-version: 1.2", "ontology: demo-go", ""]
    for term_id, label, synonyms in _GO_TERMS:
        lines.append("[Term]")
        lines.append(f"id: {term_id}")
        lines.append(f"name: {label}")
        for synonym in synonyms:
            lines.append(f'synonym: "{synonym}" EXACT []')
        if term_id != _GO_TERMS[0][0]:
            lines.append(f"is_a: {_GO_TERMS[0][0]} ! {_GO_TERMS[0][1]}")
        lines.append("")
    lines += [
        "[Term]",
        "id: GO:0000001",
        "is_obsolete: true",
        "",
        "[Typedef]",
        "id: part_of",
        "name: part of",
        "",
    ]
    path.write_text("\n".join(lines))


def _write_skos_nt(path: Path) -> None:
    base = "http://demo.example/agrovoc/"
    skos = "http://www.w3.org/2004/02/skos/core#"
    lines = []
    for i, (term_id, label, synonyms) in enumerate(_AGRO_TERMS):
        subject = f"<{base}{term_id}>"
        lines.append(f'{subject} <{skos}prefLabel> "{label}"@en .')
        lines.append(f'{subject} <{skos}prefLabel> "{label} (fr)"@fr .')
        for synonym in synonyms:
            lines.append(f'{subject} <{skos}altLabel> "{synonym}"@en .')
        if i > 0:
            parent = f"<{base}{_AGRO_TERMS[0][0]}>"
            lines.append(f"{subject} <{skos}broader> {parent} .")
        # unrecognized predicate, ignored by the parser
        lines.append(f'{subject} <http://purl.org/dc/terms/created> "2020-01-01" .')
    path.write_text("\n".join(lines) + "\n")


def _write_msc_csv(path: Path) -> None:
    rows = ["term_id,label,synonyms,parent_id"]
    for term_id, label, synonyms in _MSC_TERMS:
        rows.append(f"{term_id},{label},{'|'.join(synonyms)},")
    path.write_text("\n".join(rows) + "\n")


def write_demo_inputs(root: str | Path, seed: int = 7, n_papers: int = 1000) -> Path:
    """Generate dumps, vectors, and config under `root`; returns the config path."""
    root = Path(root)
    dumps = root / "dumps"
    dumps.mkdir(parents=True, exist_ok=True)
    (root / "vectors").mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    dois = [f"10.{5000 + i % 7}/demo.{i:05d}" for i in range(n_papers)]
    years: list[int | None] = []
    for i in range(n_papers):
        if i % 67 == 0:  # ~1.5% missing everywhere
            years.append(None)
        elif i % 23 == 0:
            years.append(rng.randint(2023, 2025))  # recent: temporal guardrails
        else:
            years.append(rng.randint(1985, 2022))
    base_citations = [max(0, int(rng.lognormvariate(2.0, 1.2))) for _ in range(n_papers)]

    def jitter(value: int) -> int:
        return max(0, value + rng.randint(-2, 2))

    in_s2ag = [rng.random() < 0.55 for _ in range(n_papers)]
    in_openalex = [rng.random() < 0.98 for _ in range(n_papers)]
    in_sciscinet = [rng.random() < 0.50 for _ in range(n_papers)]
    in_pwc = [rng.random() < 0.06 for _ in range(n_papers)]
    in_retwatch = [rng.random() < 0.03 for _ in range(n_papers)]
    in_ros = [rng.random() < 0.08 for _ in range(n_papers)]
    for i in range(n_papers):  # nobody may be sourceless
        if not (in_s2ag[i] or in_openalex[i]):
            in_openalex[i] = True
    # two spot-check papers with pinned membership
    in_s2ag[0], in_openalex[0], in_sciscinet[0] = True, True, True
    in_pwc[0] = in_retwatch[0] = in_ros[0] = False
    for flags in (in_s2ag, in_openalex, in_sciscinet, in_pwc, in_retwatch, in_ros):
        flags[1] = True

    with open(dumps / "s2ag_papers.jsonl", "w", encoding="utf-8") as handle:
        for i in range(n_papers):
            if not in_s2ag[i]:
                continue
            record = {
                "corpusid": 10_000 + i,
                "doi": dois[i],
                "year": years[i],
                "citationcount": jitter(base_citations[i]),
                "influentialcitationcount": base_citations[i] // 10,
                "isopenaccess": rng.random() < 0.4,
                "title": f"Demo paper {i}",
            }
            if rng.random() < 0.3:
                record["externalids"] = {"MAG": str(20_000 + i)}
            handle.write(json.dumps(record) + "\n")
        # stragglers: malformed lines and junk DOIs are part of real dumps
        handle.write("{this is not json}\n")
        handle.write('{"corpusid": 1, "doi": "", "year": 2000, "citationcount": 0}\n')
        handle.write('{"corpusid": 2, "doi": "not-a-doi", "year": 2000, "citationcount": 0}\n')

    with open(dumps / "openalex_works.jsonl", "w", encoding="utf-8") as handle:
        for i in range(n_papers):
            if not in_openalex[i]:
                continue
            record = {
                "id": f"W{2000 + i}",
                "doi": f"https://doi.org/{dois[i]}",
                "display_name": f"Demo paper {i}",
                "publication_year": years[i],
                "cited_by_count": jitter(base_citations[i]),
                "fwci": round(rng.lognormvariate(0.0, 0.5), 4),
                "type": rng.choice(["article", "preprint", "book-chapter"]),
                "language": "en",
            }
            handle.write(json.dumps(record) + "\n")
            if i in (10, 20, 30):  # duplicate rows: first occurrence must win
                handle.write(json.dumps(record) + "\n")

    with open(dumps / "sciscinet_metrics.jsonl", "w", encoding="utf-8") as handle:
        for i in range(n_papers):
            if not in_sciscinet[i]:
                continue
            record = {
                "paper_id": f"SSN{3000 + i}",
                "doi": f"https://doi.org/{dois[i]}",
                "year": years[i],
                "citation_count": jitter(base_citations[i]),
                "cd5": round(rng.gauss(0.0, 0.05), 6),
                "atypicality": round(rng.gauss(0.0, 1.0), 4),
            }
            handle.write(json.dumps(record) + "\n")

    with open(dumps / "pwc_papers.jsonl", "w", encoding="utf-8") as handle:
        for i in range(n_papers):
            if not in_pwc[i]:
                continue
            record = {
                "doi": dois[i],
                "repo_url": f"https://github.com/demo/repo{i}",
                "framework": rng.choice(["pytorch", "tf", "jax", "none"]),
                "title": f"Demo paper {i}",
            }
            handle.write(json.dumps(record) + "\n")

    with open(dumps / "retwatch.csv", "w", encoding="utf-8", newline="") as handle:
        handle.write("OriginalPaperDOI,RetractionReason,RetractionYear\n")
        for i in range(n_papers):
            if not in_retwatch[i]:
                continue
            # mixed case exercises lowercasing during normalization
            handle.write(f"{dois[i].upper()},Error in data,{(years[i] or 2020) + 1}\n")

    with open(dumps / "ros_pairs.csv", "w", encoding="utf-8", newline="") as handle:
        handle.write("patent_id,paper_doi,confidence\n")
        patent = 7_000_000
        for i in range(n_papers):
            if not in_ros[i]:
                continue
            for _ in range(rng.randint(1, 3)):
                patent += 1
                handle.write(
                    f"US{patent},https://dx.doi.org/{dois[i]},{round(rng.uniform(0.5, 1.0), 2)}\n"
                )

    topics = [
        {
            "topic_id": f"T{10_000 + i}",
            "display_name": name,
            "subfield": f"Subfield {i % 10}",
            "field": f"Field {i % 6}",
            "domain": domain,
        }
        for i, (name, domain) in enumerate(_TOPICS)
    ]
    with open(dumps / "topics.jsonl", "w", encoding="utf-8") as handle:
        for topic in topics:
            handle.write(json.dumps(topic) + "\n")

    with open(dumps / "work_topics.csv", "w", encoding="utf-8", newline="") as handle:
        handle.write("work_id,topic_id,score\n")
        for i in range(n_papers):
            if not in_openalex[i] or rng.random() >= 0.69:
                continue
            for topic in rng.sample(topics, rng.randint(1, 3)):
                handle.write(f"W{2000 + i},{topic['topic_id']},{round(rng.uniform(0.3, 1.0), 3)}\n")

    _write_obo(dumps / "mini_go.obo")
    _write_skos_nt(dumps / "mini_agrovoc.nt")
    _write_msc_csv(dumps / "mini_msc.csv")

    # Synthetic vectors for the embedding-routed ontology, written in the
    # same label-row layout the align stage will emit.
    topic_ids = [t["topic_id"] for t in topics]
    topic_matrix = np.vstack([hash_embedding(t["display_name"]) for t in topics])
    write_vectors(root / "vectors" / "topics.parquet", topic_ids, topic_matrix)

    go_terms = parse_obo(dumps / "mini_go.obo", "go").terms
    rows = term_label_rows("go", [t for t in go_terms if not t.obsolete])
    term_matrix = np.vstack([hash_embedding(text) for _, text, _, _ in rows])
    write_vectors(root / "vectors" / "terms.parquet", [r[0] for r in rows], term_matrix)

    spot_0 = {
        "has_s2ag": True, "has_openalex": True, "has_sciscinet": True,
        "has_pwc": False, "has_retraction": False, "has_patent": False,
    }
    spot_1 = {flag: True for flag in spot_0}
    config = {
        "lake_root": "lake",
        "seed": seed,
        "sources": [
            {
                "name": "s2ag", "input": "dumps/s2ag_papers.jsonl", "format": "jsonl",
                "table": "papers", "doi_column": "doi", "id_column": "corpusid",
                "year_column": "year", "citation_column": "citationcount",
                "flag": "has_s2ag",
            },
            {
                "name": "openalex", "input": "dumps/openalex_works.jsonl",
                "format": "jsonl", "table": "works", "doi_column": "doi",
                "id_column": "id", "id_pattern": "W\\d+",
                "year_column": "publication_year", "citation_column": "cited_by_count",
                "extra_columns": ["fwci"], "flag": "has_openalex",
            },
            {
                "name": "sciscinet", "input": "dumps/sciscinet_metrics.jsonl",
                "format": "jsonl", "table": "paper_metrics", "doi_column": "doi",
                "id_column": "paper_id", "year_column": "year",
                "citation_column": "citation_count",
                "extra_columns": ["cd5", "atypicality"], "flag": "has_sciscinet",
            },
            {
                "name": "pwc", "input": "dumps/pwc_papers.jsonl", "format": "jsonl",
                "table": "papers", "doi_column": "doi", "flag": "has_pwc",
            },
            {
                "name": "retwatch", "input": "dumps/retwatch.csv", "format": "csv",
                "table": "retracted_papers", "doi_column": "OriginalPaperDOI",
                "flag": "has_retraction",
            },
            {
                "name": "ros", "input": "dumps/ros_pairs.csv", "format": "csv",
                "table": "patent_paper_pairs", "doi_column": "paper_doi",
                "id_column": "patent_id", "flag": "has_patent",
            },
        ],
        "topics": {"input": "dumps/topics.jsonl"},
        "assignments": {"input": "dumps/work_topics.csv"},
        "ontologies": [
            {"name": "msc", "input": "dumps/mini_msc.csv", "format": "csv",
             "method": "exact", "threshold": 1.0},
            {"name": "agrovoc", "input": "dumps/mini_agrovoc.nt", "format": "skos_nt",
             "method": "tfidf", "threshold": 0.3},
            {"name": "go", "input": "dumps/mini_go.obo", "format": "obo",
             "method": "embedding", "threshold": 0.3, "top_k": 20},
        ],
        "vectors": {"topics": "vectors/topics.parquet", "terms": "vectors/terms.parquet"},
        "cutoffs": {"sciscinet_year": 2022, "ros_year": 2023},
        "checks": {
            "spot_checks": [
                {"doi": dois[0], "flags": spot_0},
                {"doi": dois[1], "flags": spot_1},
            ],
        },
        "eval": {
            "strata": [
                {"name": "exact", "low": 0.95, "high": None, "size": 5},
                {"name": "high", "low": 0.85, "high": 0.95, "size": 5},
                {"name": "mid", "low": 0.75, "high": 0.85, "size": 5},
                {"name": "borderline", "low": 0.65, "high": 0.75, "size": 3},
            ],
        },
    }
    config_path = root / "config.yaml"
    config_path.write_text(yaml.safe_dump(config, sort_keys=False))
    return config_path
