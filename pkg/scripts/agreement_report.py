#!/usr/bin/env python3
"""Print cross-source citation agreement for a built lake.

Pairwise Pearson r, mean absolute difference, Bland-Altman limits, and
relative disagreement binned by citation magnitude.

Usage:
    python scripts/agreement_report.py <workdir-with-built-lake>
"""

import argparse
import sys
from pathlib import Path

from paperlake.checks import citation_agreement
from paperlake.tableio import read_table


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("workdir")
    args = parser.parse_args()
    unified = read_table(Path(args.workdir) / "lake" / "xref" / "unified_papers.parquet")
    stats, binned = citation_agreement(unified)
    if not stats:
        print("fewer than two complete rows; nothing to report")
        return 1
    for s in stats:
        mean_diff, low, high = s.bland_altman
        r = "undefined" if s.pearson_r is None else f"{s.pearson_r:.4f}"
        print(f"{s.source_pair[0]} vs {s.source_pair[1]} (n={s.n})")
        print(f"  pearson r      {r}")
        print(f"  mean |diff|    {s.mean_abs_diff:.3f}")
        print(f"  bland-altman   mean {mean_diff:+.3f}, LoA [{low:+.3f}, {high:+.3f}]")
    print("\nmean relative difference by citation magnitude:")
    for b in binned:
        value = "-" if b["mean_rel_diff"] is None else f"{b['mean_rel_diff']:.4f}"
        print(f"  {b['pair']:<45} {b['bin']:>7}  n={b['n']:<6} {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
