"""Command line entry point.

    embed-export --labels lake/align/labels_terms.parquet \
                 --out vectors/terms.parquet \
                 [--model BAAI/bge-large-en-v1.5] [--batch-size 32]
"""

from __future__ import annotations

import argparse
import sys

from .exporter import export_embeddings
from .models import DEFAULT_MODEL, ModelLoadError, load_model


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Compute sentence embeddings for a labels table and write "
                    "the vector file the lake alignment stage consumes.",
    )
    parser.add_argument("--labels", required=True, help="labels Parquet file (id, text)")
    parser.add_argument("--out", required=True, help="output vector Parquet file")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help=f"model name (default {DEFAULT_MODEL}); "
                             "use hashing:<dim> for a deterministic offline model")
    parser.add_argument("--batch-size", type=int, default=32)
    args = parser.parse_args(argv)

    try:
        model = load_model(args.model)
    except ModelLoadError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 2
    try:
        manifest = export_embeddings(args.labels, args.out, model, args.batch_size)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"export error: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {manifest.n_ids} vectors (dim {manifest.dimension}, "
        f"model {manifest.model_name}) to {args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
