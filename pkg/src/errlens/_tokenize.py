"""Shared tokenizer: whitespace split, punctuation strip, lowercase.

Every part of the engine that looks at text (n-gram features, attribution
position checks, document length, highlight spans) goes through this module
so that "token" means exactly one thing everywhere.
"""

from __future__ import annotations

import re
import unicodedata
from functools import lru_cache

_WORD_RE = re.compile(r"\S+")


@lru_cache(maxsize=4096)
def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Split on Unicode whitespace, strip edge punctuation, lowercase.

    Returns (token, start, end) triples where text[start:end] is the raw
    (unlowercased) span the token was extracted from. Tokens that are empty
    after stripping are dropped.
    """
    out = []
    for m in _WORD_RE.finditer(text):
        start, end = m.start(), m.end()
        while start < end and _is_punct(text[start]):
            start += 1
        while end > start and _is_punct(text[end - 1]):
            end -= 1
        if end > start:
            out.append((text[start:end].lower(), start, end))
    return out


def tokenize(text: str) -> list[str]:
    return [tok for tok, _, _ in tokenize_with_spans(text)]


def extract_ngrams(text: str, n_max: int = 3) -> set[tuple[str, ...]]:
    """All contiguous 1..n_max-grams of the tokenized text, as tuples."""
    if n_max not in (1, 2, 3):
        raise ValueError(f"n_max must be 1, 2 or 3, got {n_max}")
    tokens = tokenize(text)
    grams: set[tuple[str, ...]] = set()
    for n in range(1, n_max + 1):
        for i in range(len(tokens) - n + 1):
            grams.add(tuple(tokens[i : i + n]))
    return grams


def ngrams_of_tokens(tokens: list[str], n_max: int = 3) -> set[tuple[str, ...]]:
    grams: set[tuple[str, ...]] = set()
    for n in range(1, n_max + 1):
        for i in range(len(tokens) - n + 1):
            grams.add(tuple(tokens[i : i + n]))
    return grams


def contains_tuple(tokens: list[str], gram: tuple[str, ...]) -> bool:
    """True if `gram` occurs as a contiguous run in `tokens`."""
    n = len(gram)
    if n == 0 or n > len(tokens):
        return False
    first = gram[0]
    for i in range(len(tokens) - n + 1):
        if tokens[i] == first and tuple(tokens[i : i + n]) == gram:
            return True
    return False


def find_tuple_spans(text: str, gram: tuple[str, ...]) -> list[tuple[int, int]]:
    """Character spans of every contiguous occurrence of `gram` in `text`.

    A span runs from the start of the first matched token to the end of the
    last one, in raw-text coordinates, so slicing the text with it and
    re-tokenizing yields the gram back.
    """
    spans = tokenize_with_spans(text)
    tokens = [t for t, _, _ in spans]
    n = len(gram)
    hits = []
    for i in range(len(tokens) - n + 1):
        if tuple(tokens[i : i + n]) == gram:
            hits.append((spans[i][1], spans[i + n - 1][2]))
    return hits
