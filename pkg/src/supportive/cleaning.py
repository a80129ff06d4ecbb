"""Tweet text normalization.

A cleaned tweet is the body text with hashtags, mentions, urls, emoji, and
punctuation removed, lowercased, whitespace-collapsed, and tokenized by
whitespace. Cleaning is idempotent.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass


@dataclass(frozen=True)
class CleanText:
    text: str
    tokens: tuple[str, ...]
    token_count: int


_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#\w+")

# Pictographs, dingbats, arrows, flags etc. carry Unicode categories S*;
# dropping S* together with P* strips emoji and punctuation in one pass
# while keeping letters, digits, and combining accents.
_DROP_SILENTLY = {"Cf", "Co", "Cn", "Cs"}
# Variation selectors and the keycap combiner are marks, not symbols.
_EMOJI_MARKS = frozenset(
    [chr(cp) for cp in range(0xFE00, 0xFE10)] + ["⃣"]
)

_REGIONAL_INDICATOR_BASE = 0x1F1E6


def _strip_chars(text: str) -> str:
    out = []
    for ch in text:
        if ch.isspace():
            out.append(" ")
            continue
        cat = unicodedata.category(ch)
        if cat[0] in "PS":
            out.append(" ")
        elif cat in _DROP_SILENTLY or ch in _EMOJI_MARKS:
            pass
        elif cat == "Cc":
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def clean(raw_text: str) -> CleanText:
    """Normalize a raw tweet body.

    Removal order matters: urls first (they contain punctuation), then
    mentions and hashtag tokens, then the emoji/punctuation character pass.
    The empty result is valid and has token_count 0.
    """
    text = _URL_RE.sub(" ", raw_text)
    text = _MENTION_RE.sub(" ", text)
    text = _HASHTAG_RE.sub(" ", text)
    text = _strip_chars(text)
    tokens = tuple(text.lower().split())
    return CleanText(text=" ".join(tokens), tokens=tokens, token_count=len(tokens))


def passes_length_filter(ct: CleanText, min_tokens: int = 10) -> bool:
    if min_tokens < 0:
        raise ValueError("min_tokens must be >= 0")
    return ct.token_count >= min_tokens


def extract_flag_codes(text: str) -> list[str]:
    """Country codes for every flag emoji in `text`.

    Flags are consecutive regional-indicator pairs; pairing is greedy and
    non-overlapping, duplicates are dropped while preserving first-seen order.
    """
    codes = []
    pending = None
    for ch in text:
        cp = ord(ch)
        if 0x1F1E6 <= cp <= 0x1F1FF:
            if pending is None:
                pending = cp
            else:
                code = chr(pending - _REGIONAL_INDICATOR_BASE + ord("A")) + chr(
                    cp - _REGIONAL_INDICATOR_BASE + ord("A")
                )
                if code not in codes:
                    codes.append(code)
                pending = None
        else:
            pending = None
    return codes
