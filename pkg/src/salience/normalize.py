"""Term normalization shared by annotation, graph merging and evaluation.

All term keys in the package come from normalize_term so that the gold
side and the prediction side can only match when they agree after the
same normalization.
"""
from __future__ import annotations

from typing import Iterable, Sequence

ARTICLES = frozenset({"a", "an", "the"})

# Marker for a span that normalizes to nothing (articles/punctuation only).
# It never matches anything: consumers drop it before comparing.
EMPTY_KEY = ""


def is_punctuation_token(token: str) -> bool:
    """True when the token carries no alphanumeric character at all."""
    return not any(ch.isalnum() for ch in token)


def normalize_term(tokens: Sequence[str]) -> str:
    """Lowercase tokens, drop articles and punctuation-only tokens, join.

    Returns EMPTY_KEY when nothing survives the filter; an empty key never
    matches any other key.
    """
    kept = []
    for tok in tokens:
        low = tok.lower()
        if low in ARTICLES or is_punctuation_token(tok):
            continue
        kept.append(low)
    return " ".join(kept)


def dedup_keys(keys: Iterable) -> list:
    """Order-preserving dedup that also drops empty-key markers."""
    seen = set()
    out = []
    for key in keys:
        if key == EMPTY_KEY:
            continue
        if key in seen:
            continue
        seen.add(key)
        out.append(key)
    return out
