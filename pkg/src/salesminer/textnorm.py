"""Text normalization shared by ingestion, scoring and keyword matching."""

from __future__ import annotations

import re
import unicodedata

_WHITESPACE_RUN = re.compile(r"\s+")

# Unihan blocks plus kana; enough for the CJK chatlogs this tool targets.
_CJK_RANGES = (
    (0x3040, 0x30FF),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
)


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def contains_cjk(text: str) -> bool:
    return any(is_cjk(ch) for ch in text)


def normalize_text(text: str) -> str:
    """Trim and collapse whitespace runs to single spaces; CJK untouched."""
    return _WHITESPACE_RUN.sub(" ", text).strip()


def normalize_for_match(text: str) -> str:
    """Key form used for lexicon lookups, dedup keys and embeddings.

    Casefolds, collapses whitespace and strips leading/trailing punctuation
    so that e.g. "Hi!" matches a lexicon entry "hi" and trailing question
    marks do not split dedup groups. Interior punctuation is kept.
    """
    s = normalize_text(text).casefold()
    start, end = 0, len(s)
    while start < end and unicodedata.category(s[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(s[end - 1]).startswith("P"):
        end -= 1
    return s[start:end].strip()
