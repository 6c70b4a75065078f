"""Gold-standard sampling and strict precision/recall scoring.

The gold set is a stratified sample over similarity bands with
proportional ontology representation; scoring is strict (only a
`correct` label counts as a true positive, `partial` is a false
positive) and restricted to the gold universe, so predictions the
annotators never saw are ignored.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .align.types import Mapping

LABELS = ("correct", "partial", "incorrect")

Key = tuple[str, str, str]  # (topic_id, term_id, ontology)


@dataclass(frozen=True)
class StratumSpec:
    name: str
    low: float
    high: float | None  # None = closed top band
    size: int

    def contains(self, similarity: float) -> bool:
        if self.high is None:
            return similarity >= self.low
        return self.low <= similarity < self.high


DEFAULT_STRATA = (
    StratumSpec("exact", 0.95, None, 50),
    StratumSpec("high", 0.85, 0.95, 100),
    StratumSpec("mid", 0.75, 0.85, 100),
    StratumSpec("borderline", 0.65, 0.75, 50),
)


@dataclass(frozen=True)
class GoldPair:
    topic_id: str
    term_id: str
    ontology: str
    similarity_at_annotation: float
    stratum: str
    label: str = ""  # empty in templates

    @property
    def key(self) -> Key:
        return (self.topic_id, self.term_id, self.ontology)


@dataclass
class EvalResult:
    precision: float | None
    recall: float | None
    f1: float | None
    tp: int
    fp: int
    fn: int
    per_stratum_precision: dict[str, float | None] = field(default_factory=dict)
    fn_pairs: tuple[Key, ...] = ()  # provenance for missed correct pairs


def apportion(pool_sizes: dict[str, int], total: int) -> dict[str, int]:
    """Largest-remainder seats per ontology, capped by pool size.

    Every ontology with a non-empty pool gets at least one slot when
    `total` allows.  Fully deterministic: ties break on larger pool,
    then name.
    """
    names = sorted(n for n in pool_sizes if pool_sizes[n] > 0)
    population = sum(pool_sizes[n] for n in names)
    if population == 0 or total == 0:
        return {n: 0 for n in pool_sizes}
    quotas = {n: total * pool_sizes[n] / population for n in names}
    alloc = {n: min(math.floor(quotas[n]), pool_sizes[n]) for n in names}
    remainder_order = sorted(
        names,
        key=lambda n: (-(quotas[n] - math.floor(quotas[n])), -pool_sizes[n], n),
    )
    remaining = total - sum(alloc.values())
    while remaining > 0:
        progressed = False
        for name in remainder_order:
            if remaining == 0:
                break
            if alloc[name] < pool_sizes[name]:
                alloc[name] += 1
                remaining -= 1
                progressed = True
        if not progressed:
            break  # every pool exhausted
    if len(names) <= total:
        for name in names:
            if alloc[name] > 0:
                continue
            donors = sorted(
                (d for d in names if alloc[d] > 1), key=lambda d: (-alloc[d], d)
            )
            if donors:
                alloc[donors[0]] -= 1
                alloc[name] += 1
    for name in pool_sizes:
        alloc.setdefault(name, 0)
    return alloc


def stratified_sample(
    mappings: Sequence[Mapping],
    strata: Sequence[StratumSpec] = DEFAULT_STRATA,
    seed: int = 0,
) -> list[GoldPair]:
    """Draw an unlabelled gold template, without replacement.

    Deterministic given the seed; stratum sizes and the per-ontology
    apportionment depend only on the pools, not on the seed.
    """
    rng = random.Random(seed)
    sample: list[GoldPair] = []
    for stratum in strata:
        pool = [m for m in mappings if stratum.contains(m.similarity)]
        if len(pool) < stratum.size:
            raise ValueError(
                f"stratum {stratum.name!r}: pool has {len(pool)} mappings, "
                f"{stratum.size} requested"
            )
        by_ontology: dict[str, list[Mapping]] = {}
        for mapping in pool:
            by_ontology.setdefault(mapping.ontology, []).append(mapping)
        alloc = apportion({o: len(ms) for o, ms in by_ontology.items()}, stratum.size)
        for ontology in sorted(by_ontology):
            want = alloc.get(ontology, 0)
            if want == 0:
                continue
            candidates = sorted(by_ontology[ontology], key=lambda m: m.key)
            chosen = rng.sample(candidates, want)
            chosen.sort(key=lambda m: m.key)
            sample.extend(
                GoldPair(m.topic_id, m.term_id, m.ontology, m.similarity, stratum.name)
                for m in chosen
            )
    return sample


def score_strict(
    predictions: Iterable[Mapping | Key],
    gold: Sequence[GoldPair],
) -> EvalResult:
    """Strict scoring inside the gold universe.

    Invariant to prediction duplicates and ordering.  Precision is None
    when nothing was predicted; recall is None when the gold set has no
    correct labels at all.
    """
    if not gold:
        raise ValueError("gold set is empty")
    predicted: set[Key] = set()
    for p in predictions:
        predicted.add(p.key if isinstance(p, Mapping) else tuple(p))

    tp = fp = 0
    fn_pairs: list[Key] = []
    stratum_counts: dict[str, list[int]] = {}  # stratum -> [correct_pred, total_pred]
    for pair in gold:
        if pair.label not in LABELS:
            raise ValueError(f"gold pair {pair.key} has bad label {pair.label!r}")
        hit = pair.key in predicted
        if pair.label == "correct":
            if hit:
                tp += 1
            else:
                fn_pairs.append(pair.key)
        elif hit:
            fp += 1
        if hit:
            bucket = stratum_counts.setdefault(pair.stratum, [0, 0])
            bucket[1] += 1
            if pair.label == "correct":
                bucket[0] += 1

    fn = len(fn_pairs)
    precision = tp / (tp + fp) if (tp + fp) > 0 else None
    n_correct = tp + fn
    recall = tp / n_correct if n_correct > 0 else None
    if precision is None or recall is None:
        f1 = None
    elif precision + recall == 0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    per_stratum = {
        stratum: (counts[0] / counts[1] if counts[1] else None)
        for stratum, counts in sorted(stratum_counts.items())
    }
    return EvalResult(precision, recall, f1, tp, fp, fn, per_stratum, tuple(fn_pairs))


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    precision: float | None
    recall: float | None
    f1: float | None
    n_predictions: int


def default_thresholds(low: float = 0.60, high: float = 1.00, step: float = 0.01) -> list[float]:
    count = round((high - low) / step)
    return [round(low + i * step, 10) for i in range(count + 1)]


def pr_sweep(
    mappings: Sequence[Mapping],
    gold: Sequence[GoldPair],
    thresholds: Sequence[float] | None = None,
) -> list[SweepPoint]:
    """Score the mapping set at every threshold.

    Predictions at threshold t are the mappings with similarity >= t,
    so recall is non-increasing in t by construction.
    """
    if thresholds is None:
        thresholds = default_thresholds()
    points = []
    for threshold in thresholds:
        kept = [m for m in mappings if m.similarity >= threshold]
        result = score_strict(kept, gold)
        points.append(
            SweepPoint(threshold, result.precision, result.recall, result.f1, len(kept))
        )
    return points


GOLD_HEADER = ["topic_id", "term_id", "ontology", "similarity", "stratum", "label"]


def write_gold_csv(path: str | Path, pairs: Sequence[GoldPair]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(GOLD_HEADER)
        for p in pairs:
            writer.writerow(
                [p.topic_id, p.term_id, p.ontology,
                 f"{p.similarity_at_annotation:.6f}", p.stratum, p.label]
            )


def read_gold_csv(path: str | Path) -> list[GoldPair]:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        pairs = [
            GoldPair(
                topic_id=row["topic_id"],
                term_id=row["term_id"],
                ontology=row["ontology"],
                similarity_at_annotation=float(row["similarity"]),
                stratum=row["stratum"],
                label=(row.get("label") or "").strip(),
            )
            for row in reader
        ]
    return pairs


def write_sweep_csv(path: str | Path, points: Sequence[SweepPoint]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    def fmt(value: float | None) -> str:
        return "" if value is None else f"{value:.6f}"

    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["threshold", "precision", "recall", "f1", "n_predictions"])
        for p in points:
            writer.writerow(
                [f"{p.threshold:.2f}", fmt(p.precision), fmt(p.recall), fmt(p.f1),
                 p.n_predictions]
            )
