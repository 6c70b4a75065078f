"""Exact nearest-neighbour search over precomputed sentence embeddings.

Vectors arrive in columnar files produced outside this package; search
is exhaustive cosine over L2-normalized vectors, which at topic-by-term
scale fits desk compute and keeps acceptance tests free of
approximation error.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pyarrow as pa

from ..errors import LakeError
from ..tableio import read_table, write_table
from .types import Mapping

DEFAULT_DIMENSION = 1024


@dataclass
class EmbeddingSet:
    """Ids with row-aligned vectors.

    Ids may repeat: a term contributes one row per matchable string
    (label and synonyms); `texts`, when present, carries those strings.
    """

    ids: list[str]
    vectors: np.ndarray
    dimension: int = DEFAULT_DIMENSION
    texts: list[str] | None = None

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2-d matrix")
        if len(self.ids) != self.vectors.shape[0]:
            raise ValueError("ids and vector rows disagree")
        if self.vectors.shape[1] != self.dimension:
            raise ValueError(
                f"declared dimension {self.dimension} != matrix width {self.vectors.shape[1]}"
            )
        if self.texts is not None and len(self.texts) != len(self.ids):
            raise ValueError("texts and ids disagree")
        if not np.all(np.isfinite(self.vectors)):
            bad = int(np.where(~np.isfinite(self.vectors).all(axis=1))[0][0])
            raise ValueError(f"non-finite vector for id {self.ids[bad]!r}")

    def normalized(self) -> np.ndarray:
        norms = np.linalg.norm(self.vectors, axis=1)
        zero = np.where(norms == 0.0)[0]
        if zero.size:
            raise LakeError(f"zero-norm vector for id {self.ids[int(zero[0])]!r}")
        return self.vectors / norms[:, None]


def write_vectors(path: str | Path, ids: list[str], vectors: np.ndarray) -> None:
    """Write the columnar vector-file format: (id, fixed-size float32 list)."""
    matrix = np.asarray(vectors, dtype=np.float32)
    dim = matrix.shape[1]
    flat = pa.array(matrix.reshape(-1), type=pa.float32())
    table = pa.table(
        {
            "id": pa.array(ids, pa.string()),
            "vector": pa.FixedSizeListArray.from_arrays(flat, dim),
        }
    )
    write_table(table, path, source="vectors", extra_metadata={"dimension": str(dim)})


def read_vectors(path: str | Path) -> EmbeddingSet:
    table = read_table(path)
    ids = table.column("id").to_pylist()
    vector_col = table.column("vector").combine_chunks()
    dim = vector_col.type.list_size
    matrix = np.asarray(vector_col.flatten(), dtype=np.float64).reshape(len(ids), dim)
    return EmbeddingSet(ids=ids, vectors=matrix, dimension=dim)


def embed_nn_match(
    topic_vecs: EmbeddingSet,
    term_vecs: EmbeddingSet,
    ontology: str,
    *,
    threshold: float = 0.65,
    top_k: int = 20,
    chunk_rows: int = 1024,
) -> list[Mapping]:
    """Exhaustive cosine top-k per topic, thresholded.

    A term's similarity is the maximum over its rows (label plus
    synonyms).  Ties break by ascending term id, so output is fully
    deterministic.
    """
    if topic_vecs.dimension != term_vecs.dimension:
        raise ValueError(
            f"dimension mismatch: topics {topic_vecs.dimension} vs terms {term_vecs.dimension}"
        )
    topics = topic_vecs.normalized()
    terms = term_vecs.normalized()

    owners = sorted(set(term_vecs.ids))
    owner_rows = {owner: [] for owner in owners}
    for row, owner in enumerate(term_vecs.ids):
        owner_rows[owner].append(row)
    groups = [(owner, np.array(rows)) for owner, rows in owner_rows.items()]

    mappings: list[Mapping] = []
    for start in range(0, topics.shape[0], chunk_rows):
        sims = topics[start : start + chunk_rows] @ terms.T
        for local, row in enumerate(sims):
            topic_id = topic_vecs.ids[start + local]
            scored = []
            for owner, rows in groups:
                segment = row[rows]
                best = int(np.argmax(segment))
                scored.append((float(segment[best]), owner, int(rows[best])))
            scored.sort(key=lambda item: (-item[0], item[1]))
            for sim, owner, best_row in scored[:top_k]:
                if sim < threshold:
                    continue
                text = term_vecs.texts[best_row] if term_vecs.texts else ""
                mappings.append(
                    Mapping(topic_id, owner, ontology, sim, "embedding", text)
                )
    return mappings
