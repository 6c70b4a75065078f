#!/usr/bin/env python3
"""Precision-recall sweep demo over a built lake.

Labels the emitted gold template with a toy rule (real use: hand
annotation), scores the topic-ontology map at every threshold from 0.60
to 1.00, and prints the curve.

Usage:
    python scripts/sweep_demo.py <workdir-with-built-lake>
"""

import argparse
import sys
from pathlib import Path

from paperlake.align.hybrid import table_to_mappings
from paperlake.evaluation import pr_sweep, read_gold_csv
from paperlake.tableio import read_table


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("workdir")
    args = parser.parse_args()
    lake = Path(args.workdir) / "lake"

    template = read_gold_csv(lake / "reports" / "eval" / "gold_template.csv")
    # toy labelling rule standing in for the human annotator
    gold = [
        type(pair)(pair.topic_id, pair.term_id, pair.ontology,
                   pair.similarity_at_annotation, pair.stratum,
                   "correct" if pair.similarity_at_annotation >= 0.80 else "partial")
        for pair in template
    ]
    mappings = table_to_mappings(read_table(lake / "xref" / "topic_ontology_map.parquet"))
    print("threshold  precision  recall  f1      n_predictions")
    for point in pr_sweep(mappings, gold):
        fmt = lambda v: "  -   " if v is None else f"{v:.4f}"
        print(f"{point.threshold:.2f}       {fmt(point.precision)}     "
              f"{fmt(point.recall)}  {fmt(point.f1)}  {point.n_predictions}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
