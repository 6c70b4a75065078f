"""Embedding model backends.

Two kinds: sentence-transformer checkpoints (the documented default is
BAAI/bge-large-en-v1.5) and a dependency-free deterministic hashing
model (`hashing:<dim>`) for offline runs and tests.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_MODEL = "BAAI/bge-large-en-v1.5"


class ModelLoadError(Exception):
    pass


class HashingModel:
    """Character-trigram feature hashing; a pure function of the text."""

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ModelLoadError(f"hashing model dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self.name = f"hashing:{dimension}"

    def _one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float32)
        padded = f" {' '.join(text.lower().split())} "
        for i in range(len(padded) - 2):
            digest = hashlib.blake2b(padded[i : i + 3].encode(), digest_size=8).digest()
            index = int.from_bytes(digest[:4], "little") % self.dimension
            vec[index] += 1.0 if digest[4] % 2 == 0 else -1.0
        if not vec.any():
            vec[0] = 1.0
        return vec

    def encode(self, texts: list[str], batch_size: int = 32) -> np.ndarray:
        return np.vstack([self._one(t) for t in texts])


class TransformerModel:
    """Thin wrapper over a sentence-transformers checkpoint."""

    def __init__(self, model_name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelLoadError(
                f"sentence-transformers is not installed; cannot load {model_name!r} "
                "(install the 'transformers' extra, or use a hashing:<dim> model)"
            ) from exc
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:
            raise ModelLoadError(f"cannot load model {model_name!r}: {exc}") from exc
        self.name = model_name
        self.dimension = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str], batch_size: int = 32) -> np.ndarray:
        return np.asarray(
            self._model.encode(
                texts, batch_size=batch_size, show_progress_bar=False,
                convert_to_numpy=True, normalize_embeddings=False,
            ),
            dtype=np.float32,
        )


def load_model(model_name: str):
    if model_name.startswith("hashing:"):
        try:
            dimension = int(model_name.split(":", 1)[1])
        except ValueError:
            raise ModelLoadError(f"bad hashing model spec {model_name!r}")
        return HashingModel(dimension)
    return TransformerModel(model_name)
