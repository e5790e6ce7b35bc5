"""Text normalization shared by keyword triggers and story validation."""

from __future__ import annotations

import re
import unicodedata


def normalize(text: str) -> list[str]:
    """Normalize an utterance into tokens.

    Unicode-lowercase, drop punctuation characters, split on whitespace.
    Numerals are kept; empty tokens are dropped. The result is stable under
    re-normalization: normalize(" ".join(normalize(t))) == normalize(t).
    """
    folded = text.casefold()
    cleaned = "".join(
        ch for ch in folded if not unicodedata.category(ch).startswith("P")
    )
    return [tok for tok in cleaned.split() if tok]


def slugify(title: str) -> str:
    """Derive an opaque story id from a title ("Goodnight Moon" -> "goodnight_moon")."""
    slug = re.sub(r"[^a-z0-9]+", "_", title.casefold()).strip("_")
    return slug or "story"
