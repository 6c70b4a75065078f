#!/usr/bin/env python3
"""Generate the synthetic demo corpus and build the full lake from it.

Usage:
    python scripts/make_demo_lake.py [workdir] [--seed N] [--papers N]

Leaves dumps/, vectors/, config.yaml and a fully built lake/ under the
workdir, then prints the check report.
"""

import argparse
import sys
from pathlib import Path

from paperlake import cli
from paperlake.demo import write_demo_inputs


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("workdir", nargs="?", default="demo_lake")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--papers", type=int, default=1000)
    args = parser.parse_args()

    workdir = Path(args.workdir)
    config = write_demo_inputs(workdir, seed=args.seed, n_papers=args.papers)
    print(f"demo inputs written under {workdir}/")
    return cli.main(["all", "--config", str(config)])


if __name__ == "__main__":
    sys.exit(main())
