"""Corpus ingestion, country inference, and hashtag partitioning.

The corpus file is line-delimited: one JSON object per line with fields
id, text, hashtags[], mentions[], urls[], like_count, retweet_count,
geo_country (optional), profile_flags[], timestamp (ISO-8601 UTC).
Malformed lines are skipped and counted, never fatal.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional

from .cleaning import extract_flag_codes
from .errors import ConfigError, DataError

SUPPORTIVE = "supportive"
NOT_SUPPORTIVE = "not-supportive"

_COUNTRY_BY_CODE = {"IN": "India", "PK": "Pakistan"}


@dataclass(frozen=True)
class TweetRecord:
    id: str
    raw_text: str
    hashtags: tuple[str, ...]
    mentions: tuple[str, ...]
    urls: tuple[str, ...]
    like_count: int
    retweet_count: int
    geo_country: Optional[str]
    profile_flags: tuple[str, ...]
    timestamp: datetime


@dataclass(frozen=True)
class CountryLabel:
    value: str  # India | Pakistan | Other | Unknown
    source: Optional[str]  # geo | emoji | both | None when no evidence
    consistent: bool = True


@dataclass(frozen=True)
class HashtagGroup:
    group_id: str
    variants: frozenset[str]  # lowercased spellings, without '#'
    polarity: str  # supportive | not-supportive
    display_variants: tuple[str, ...] = ()  # original casing, for reports

    def __post_init__(self):
        if self.polarity not in (SUPPORTIVE, NOT_SUPPORTIVE):
            raise ConfigError(
                f"group {self.group_id!r}: polarity must be "
                f"'{SUPPORTIVE}' or '{NOT_SUPPORTIVE}', got {self.polarity!r}"
            )


@dataclass(frozen=True)
class CorpusPartition:
    supportive: frozenset[str]
    not_supportive: frozenset[str]
    discarded: frozenset[str]
    unmatched: frozenset[str]

    def restricted(self, ids: Iterable[str]) -> "CorpusPartition":
        """The same partition limited to `ids` (e.g. length-filtered tweets)."""
        keep = frozenset(ids)
        return CorpusPartition(
            supportive=self.supportive & keep,
            not_supportive=self.not_supportive & keep,
            discarded=self.discarded & keep,
            unmatched=self.unmatched & keep,
        )


@dataclass
class Corpus:
    records: dict[str, TweetRecord] = field(default_factory=dict)
    skipped: int = 0
    source: str = ""

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records.values())

    def fingerprint(self) -> str:
        """Content hash over (id, raw_text) pairs, order-independent."""
        h = hashlib.sha256()
        for tid in sorted(self.records):
            h.update(tid.encode("utf-8"))
            h.update(b"\x00")
            h.update(self.records[tid].raw_text.encode("utf-8"))
            h.update(b"\x01")
        return h.hexdigest()


def _parse_record(obj: dict, schema: Optional[dict[str, str]]) -> TweetRecord:
    def get(name, default=None):
        key = schema.get(name, name) if schema else name
        return obj.get(key, default)

    tid = get("id")
    text = get("text")
    if not isinstance(tid, str) or not tid or not isinstance(text, str):
        raise ValueError("missing id or text")
    like = int(get("like_count", 0))
    retweet = int(get("retweet_count", 0))
    if like < 0 or retweet < 0:
        raise ValueError("negative engagement count")
    hashtags = tuple(str(h).lstrip("#") for h in get("hashtags", []) or [])
    ts_raw = get("timestamp")
    if not ts_raw:
        raise ValueError("missing timestamp")
    ts = datetime.fromisoformat(str(ts_raw).replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    geo = get("geo_country")
    return TweetRecord(
        id=tid,
        raw_text=text,
        hashtags=hashtags,
        mentions=tuple(get("mentions", []) or []),
        urls=tuple(get("urls", []) or []),
        like_count=like,
        retweet_count=retweet,
        geo_country=str(geo) if geo else None,
        profile_flags=_normalize_flags(get("profile_flags", []) or []),
        timestamp=ts.astimezone(timezone.utc),
    )


def _normalize_flags(raw) -> tuple[str, ...]:
    """Country codes from the profile-flag field.

    Accepts a list of two-letter codes, a list of flag emoji, or (via a
    schema mapping) the whole author handle/display name; flag emoji are
    decoded from their regional-indicator pairs.
    """
    entries = [raw] if isinstance(raw, str) else list(raw)
    codes: list[str] = []
    for entry in entries:
        text = str(entry)
        found = extract_flag_codes(text)
        if not found and len(text) == 2 and text.isascii() and text.isalpha():
            found = [text.upper()]
        for code in found:
            if code not in codes:
                codes.append(code)
    return tuple(codes)


def load_corpus(path, schema: Optional[dict[str, str]] = None) -> Corpus:
    """Read a line-delimited corpus file.

    Malformed lines (bad JSON, missing id/text/timestamp, negative counts,
    duplicate ids) are skipped and counted. Zero well-formed records is an
    error; an unreadable path raises the underlying I/O error.
    """
    corpus = Corpus(source=str(path))
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                rec = _parse_record(obj, schema)
                if rec.id in corpus.records:
                    raise ValueError("duplicate id")
            except (ValueError, TypeError, KeyError):
                corpus.skipped += 1
                continue
            corpus.records[rec.id] = rec
    if not corpus.records:
        raise DataError(f"no well-formed records in {path}")
    return corpus


def infer_country(record: TweetRecord) -> CountryLabel:
    """Country evidence resolution: platform geo wins over flag emoji.

    Flag evidence is the set of India/Pakistan flags in the author profile;
    both flags with no geo is treated as no usable signal. `consistent` is
    False only when geo and flag evidence are both present and disagree.
    """
    geo = record.geo_country.upper() if record.geo_country else None
    flag_codes = {f.upper() for f in record.profile_flags} & {"IN", "PK"}

    if geo is not None:
        value = _COUNTRY_BY_CODE.get(geo, "Other")
        if not flag_codes:
            return CountryLabel(value=value, source="geo")
        consistent = flag_codes == {geo}
        return CountryLabel(value=value, source="both", consistent=consistent)

    if len(flag_codes) == 1:
        code = next(iter(flag_codes))
        return CountryLabel(value=_COUNTRY_BY_CODE[code], source="emoji")
    if len(flag_codes) > 1:
        return CountryLabel(value="Unknown", source="emoji")
    return CountryLabel(value="Unknown", source=None)


def _check_disjoint_variants(groups: list[HashtagGroup]):
    seen: dict[str, str] = {}
    for g in groups:
        for v in g.variants:
            if v in seen and seen[v] != g.group_id:
                raise ConfigError(
                    f"hashtag variant {v!r} appears in groups "
                    f"{seen[v]!r} and {g.group_id!r}"
                )
            seen[v] = g.group_id


def partition(corpus: Corpus, groups: list[HashtagGroup]) -> CorpusPartition:
    """Split the corpus by hashtag polarity.

    Matching is case-insensitive exact-string against configured variants.
    Tweets matching both polarities are discarded; tweets matching neither
    are unmatched. The four sets are disjoint and exhaustive.
    """
    if not groups:
        raise ConfigError("at least one hashtag group is required")
    _check_disjoint_variants(groups)
    variant_polarity = {
        v: g.polarity for g in groups for v in g.variants
    }
    sup, not_sup, disc, unm = set(), set(), set(), set()
    for rec in corpus:
        polarities = {
            variant_polarity[h.lower()]
            for h in rec.hashtags
            if h.lower() in variant_polarity
        }
        if polarities == {SUPPORTIVE}:
            sup.add(rec.id)
        elif polarities == {NOT_SUPPORTIVE}:
            not_sup.add(rec.id)
        elif polarities:
            disc.add(rec.id)
        else:
            unm.add(rec.id)
    return CorpusPartition(
        supportive=frozenset(sup),
        not_supportive=frozenset(not_sup),
        discarded=frozenset(disc),
        unmatched=frozenset(unm),
    )


def group_id_sets(corpus: Corpus, groups: list[HashtagGroup]) -> dict[str, set[str]]:
    """Tweet-id set per hashtag group (sets may overlap across groups)."""
    by_variant: dict[str, str] = {v: g.group_id for g in groups for v in g.variants}
    out: dict[str, set[str]] = {g.group_id: set() for g in groups}
    for rec in corpus:
        for h in rec.hashtags:
            gid = by_variant.get(h.lower())
            if gid is not None:
                out[gid].add(rec.id)
    return out


def jaccard(a: set[str], b: set[str]) -> float:
    """|a ∩ b| / |a ∪ b|; undefined (error) when both sets are empty."""
    union = len(a | b)
    if union == 0:
        raise DataError("jaccard undefined for two empty sets")
    return len(a & b) / union


def load_hashtag_groups(path) -> list[HashtagGroup]:
    """Parse the plain-text group config.

    One group per line: ``group_id polarity variant [variant ...]``;
    blank lines and ``#``-prefixed comment lines are ignored.
    """
    groups = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ConfigError(
                    f"{path}:{lineno}: expected 'group_id polarity variant...'"
                )
            gid, polarity, *variants = parts
            groups.append(
                HashtagGroup(
                    group_id=gid,
                    variants=frozenset(v.lstrip("#").lower() for v in variants),
                    polarity=polarity,
                    display_variants=tuple(v.lstrip("#") for v in variants),
                )
            )
    if not groups:
        raise ConfigError(f"no hashtag groups defined in {path}")
    _check_disjoint_variants(groups)
    return groups
