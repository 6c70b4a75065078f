"""Topic-to-ontology alignment: lexical and embedding methods, tiers, routing."""

from .bm25 import Bm25Index, bm25_match
from .embedding import (
    EmbeddingSet,
    embed_nn_match,
    read_vectors,
    write_vectors,
)
from .hybrid import (
    MethodEntry,
    coverage_summary,
    mappings_to_table,
    run_hybrid,
    table_to_mappings,
    term_label_rows,
)
from .lexical import exact_match, jaro_winkler, jw_match
from .text import normalize_label
from .tfidf import CharTfidfIndex, char_wb_ngrams, tfidf_match
from .types import Mapping, Topic, assign_tier

__all__ = [
    "Bm25Index",
    "CharTfidfIndex",
    "EmbeddingSet",
    "Mapping",
    "MethodEntry",
    "Topic",
    "assign_tier",
    "bm25_match",
    "char_wb_ngrams",
    "coverage_summary",
    "embed_nn_match",
    "exact_match",
    "jaro_winkler",
    "jw_match",
    "mappings_to_table",
    "normalize_label",
    "read_vectors",
    "run_hybrid",
    "table_to_mappings",
    "term_label_rows",
    "tfidf_match",
    "write_vectors",
]
