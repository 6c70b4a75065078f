"""Shared matching-key normalization for all alignment methods."""

from __future__ import annotations

import re
import unicodedata

_WS = re.compile(r"\s+")


def normalize_label(text: str) -> str:
    """Unicode NFC, lowercase, whitespace collapsed to single spaces, trimmed."""
    return _WS.sub(" ", unicodedata.normalize("NFC", text).lower()).strip()
