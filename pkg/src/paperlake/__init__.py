"""paperlake: build and validate a multi-source scholarly data lake.

The toolkit converts heterogeneous source dumps (JSON Lines, CSV, OBO,
SKOS N-Triples) into Parquet tables, links records across sources by
normalized DOI, aligns a flat topic taxonomy to scientific ontologies
with lexical and embedding similarity, and validates the result with a
check suite, agreement statistics, and batch analytics.
"""

__version__ = "0.1.0"
