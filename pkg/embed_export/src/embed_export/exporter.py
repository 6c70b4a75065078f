"""Label-table to vector-file export.

The vector-file format (shared contract with the lake alignment stage):
a Parquet file with columns `id: string` and `vector: fixed-size list
of float32`, file metadata key `paperlake:dimension` carrying the
width.  Vectors are stored unnormalized; the consumer normalizes.
"""

from __future__ import annotations

import dataclasses
import datetime
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq


@dataclass
class ExportManifest:
    model_name: str
    dimension: int
    n_ids: int
    input_checksum: str
    created_at: str

    def write(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"
        )


def read_labels(path: str | Path) -> tuple[list[str], list[str]]:
    table = pq.read_table(path, columns=["id", "text"])
    ids = [str(v) for v in table.column("id").to_pylist()]
    texts = ["" if v is None else str(v) for v in table.column("text").to_pylist()]
    if not ids:
        raise ValueError(f"labels file {path} is empty")
    if len(set(ids)) != len(ids):
        raise ValueError(f"labels file {path} has duplicate ids")
    return ids, texts


def write_vector_file(path: str | Path, ids: list[str], matrix: np.ndarray) -> None:
    matrix = np.asarray(matrix, dtype=np.float32)
    dimension = matrix.shape[1]
    flat = pa.array(matrix.reshape(-1), type=pa.float32())
    table = pa.table(
        {
            "id": pa.array(ids, pa.string()),
            "vector": pa.FixedSizeListArray.from_arrays(flat, dimension),
        }
    )
    schema = table.schema.with_metadata(
        {b"paperlake:source": b"embed-export",
         b"paperlake:dimension": str(dimension).encode()}
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pq.write_table(table.replace_schema_metadata(schema.metadata), path,
                   compression="zstd")


def export_embeddings(
    labels_path: str | Path,
    out_path: str | Path,
    model,
    batch_size: int = 32,
) -> ExportManifest:
    """One vector per labels row, order preserved; manifest sidecar alongside."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    labels_path = Path(labels_path)
    ids, texts = read_labels(labels_path)

    chunks = []
    for start in range(0, len(texts), batch_size):
        chunks.append(model.encode(texts[start : start + batch_size], batch_size))
    matrix = np.vstack(chunks)
    if matrix.shape != (len(ids), model.dimension):
        raise RuntimeError(
            f"model emitted shape {matrix.shape}, expected ({len(ids)}, {model.dimension})"
        )

    write_vector_file(out_path, ids, matrix)
    manifest = ExportManifest(
        model_name=model.name,
        dimension=model.dimension,
        n_ids=len(ids),
        input_checksum=hashlib.sha256(labels_path.read_bytes()).hexdigest(),
        created_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    manifest.write(Path(out_path).with_suffix(".manifest.json"))
    return manifest
