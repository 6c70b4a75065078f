"""Batch sentence-embedding exporter for the data-lake alignment stage.

Reads a columnar labels table (columns `id`, `text`), computes one
vector per row with a configurable model, and writes the vector-file
format the alignment stage consumes, plus a JSON manifest sidecar.
"""

__version__ = "0.1.0"

from .exporter import ExportManifest, export_embeddings

__all__ = ["ExportManifest", "export_embeddings", "__version__"]
