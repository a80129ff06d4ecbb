"""Seeded synthetic corpus with known ground truth.

The generator plants a vocabulary signal: supportive-spirit tweets draw from
hopeful/empathetic word pools, not-supportive ones from hostile pools, with
a small "hijack" rate where a tweet's text style contradicts its true label.
Hashtag buckets carry the label-noise rates measured on the real crawl
(44.4% true positives under supportive hashtags, 14.7% under not-supportive
ones), so hashtag-only weak labels are noisy while scorer-top ranks are
nearly pure. Everything is a deterministic function of the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import NOT_SUPPORTIVE, SUPPORTIVE
from .provenance import canonical_json

HOPE_TERMS = (
    "peace prayers pray hope unity together brothers neighbours solidarity "
    "stand support love heal strength blessings humanity kindness courage "
    "friendship harmony".split()
)
EMPATHY_TERMS = (
    "heartbreaking suffering pain tears feel sorrow tragedy families grief "
    "hospitals oxygen breathe care compassion mourn shortage patients "
    "doctors exhausted fragile".split()
)
NEGATIVE_TERMS = (
    "karma deserve apologize revenge enemy war blame shame liar propaganda "
    "occupation boycott hate traitor slaves bitter mock gloat insult "
    "hostile".split()
)
TRUE_POS_MARKERS = "recover ameen wishes mercy healing goodwill".split()
TRUE_NEG_MARKERS = "grudge spite payback scorn taunt vendetta".split()
NEUTRAL_TERMS = (
    "today people country news world time government media twitter trending "
    "situation report day week city case number update story video watch "
    "share read life think know said make take come see look want give use "
    "find tell ask work call new first last long great little own other old "
    "right big high small early young important few public bad same able "
    "state never become between".split()
)

EMOJIS = ["\U0001f64f", "❤️", "\U0001f622", "✨", "\U0001f494", "\U0001f60a"]
FLAG_IN = "\U0001f1ee\U0001f1f3"
FLAG_PK = "\U0001f1f5\U0001f1f0"

GROUPS_TEXT = """\
# group_id polarity variants...
india_needs_oxygen supportive IndiaNeedsOxygen IndiaNeedOxygen
pakistan_stands_with_india supportive PakistanStandsWithIndia PakistanStandWithIndia
india_say_sorry_to_kashmir not-supportive EndiaSaySorryToKashmir IndiaSaySorryToKashmir
"""

SUPPORTIVE_VARIANTS = (
    "IndiaNeedsOxygen",
    "IndiaNeedOxygen",
    "PakistanStandsWithIndia",
    "PakistanStandWithIndia",
)
NOT_SUPPORTIVE_VARIANTS = ("EndiaSaySorryToKashmir", "IndiaSaySorryToKashmir")
UNTRACKED_HASHTAGS = ("COVID19", "cricket", "Monday", "BreakingNews")

# (bucket share of corpus, true-positive rate within bucket)
BUCKETS = {
    "supportive": (0.56, 0.444),
    "not_supportive": (0.29, 0.147),
    "mixed": (0.03, 0.30),
    "unmatched": (0.12, 0.35),
}
STYLE_FLIP_RATE = 0.07
DUPLICATE_RATE = 0.015
SHORT_RATE = 0.12


@dataclass
class FixtureTweet:
    id: str
    raw_text: str
    hashtags: list[str]
    mentions: list[str]
    urls: list[str]
    like_count: int
    retweet_count: int
    geo_country: str | None
    profile_flags: list[str]
    timestamp: str
    true_label: str  # supportive | not-supportive
    bucket: str


def _body_tokens(rng: np.random.Generator, positive_style: bool, truth_positive: bool,
                 n_tokens: int, theta_hope: float) -> list[str]:
    tokens = []
    n_markers = int(rng.binomial(3, 0.5))
    marker_pool = TRUE_POS_MARKERS if truth_positive else TRUE_NEG_MARKERS
    for _ in range(n_tokens):
        roll = rng.random()
        if roll < 0.40:
            if positive_style:
                pool = HOPE_TERMS if rng.random() < theta_hope else EMPATHY_TERMS
            else:
                pool = NEGATIVE_TERMS
        else:
            pool = NEUTRAL_TERMS
        tokens.append(pool[int(rng.integers(len(pool)))])
    for _ in range(n_markers):
        pos = int(rng.integers(len(tokens) + 1))
        tokens.insert(pos, marker_pool[int(rng.integers(len(marker_pool)))])
    return tokens


def _decorate(rng: np.random.Generator, tokens: list[str], hashtags: list[str]) -> str:
    words = []
    for tok in tokens:
        word = tok
        if rng.random() < 0.12:
            word = word.capitalize()
        if rng.random() < 0.18:
            word += rng.choice([",", ".", "!", "!!", "...", "?"])
        words.append(word)
    if rng.random() < 0.30:
        words.insert(0, f"@user{int(rng.integers(1000))}")
    if rng.random() < 0.40:
        words.append(rng.choice(EMOJIS))
    for tag in hashtags:
        words.append("#" + tag)
    if rng.random() < 0.25:
        suffix = "".join(
            rng.choice(list("abcdefghij0123456789"), size=8)
        )
        words.append(f"https://t.co/{suffix}")
    return " ".join(words)


def _pick_hashtags(rng: np.random.Generator, bucket: str) -> list[str]:
    if bucket == "supportive":
        k = 1 + int(rng.random() < 0.25)
        return list(rng.choice(SUPPORTIVE_VARIANTS, size=k, replace=False))
    if bucket == "not_supportive":
        k = 1 + int(rng.random() < 0.15)
        return list(rng.choice(NOT_SUPPORTIVE_VARIANTS, size=k, replace=False))
    if bucket == "mixed":
        return [
            str(rng.choice(SUPPORTIVE_VARIANTS)),
            str(rng.choice(NOT_SUPPORTIVE_VARIANTS)),
        ]
    if rng.random() < 0.5:
        return [str(rng.choice(UNTRACKED_HASHTAGS))]
    return []


def _country_evidence(rng: np.random.Generator):
    roll = rng.random()
    pak_leaning = rng.random() < 0.55
    code = "PK" if pak_leaning else ("IN" if rng.random() < 0.75 else "US")
    flag = {"PK": FLAG_PK, "IN": FLAG_IN}.get(code)
    if roll < 0.35:
        return code, []
    if roll < 0.60 and flag:
        return None, [code]
    if roll < 0.68 and flag:
        if rng.random() < 0.04:  # contradictory evidence, exercises consistent=False
            other = "IN" if code == "PK" else "PK"
            return code, [other]
        return code, [code]
    return None, []


def generate_tweets(n: int = 5000, seed: int = 7) -> list[FixtureTweet]:
    rng = np.random.default_rng(seed)
    assignments: list[tuple[str, bool]] = []
    remaining = n
    bucket_items = list(BUCKETS.items())
    for i, (bucket, (share, pos_rate)) in enumerate(bucket_items):
        size = remaining if i == len(bucket_items) - 1 else round(share * n)
        remaining -= size
        n_pos = round(pos_rate * size)
        assignments += [(bucket, True)] * n_pos + [(bucket, False)] * (size - n_pos)
    order = rng.permutation(len(assignments))
    assignments = [assignments[i] for i in order]

    tweets: list[FixtureTweet] = []
    last_in_group: dict[tuple[str, bool], int] = {}
    for i, (bucket, truth_pos) in enumerate(assignments):
        flipped = rng.random() < STYLE_FLIP_RATE
        positive_style = truth_pos != flipped
        if rng.random() < SHORT_RATE:
            n_tokens = int(rng.integers(3, 9))
        else:
            n_tokens = 10 + int(rng.poisson(5))
        theta_hope = float(rng.uniform(0.1, 0.9))
        tokens = _body_tokens(rng, positive_style, truth_pos, n_tokens, theta_hope)

        key = (bucket, truth_pos)
        if key in last_in_group and rng.random() < DUPLICATE_RATE:
            tokens = list(tweets[last_in_group[key]].raw_tokens)  # type: ignore[attr-defined]
        hashtags = _pick_hashtags(rng, bucket)
        geo, flags = _country_evidence(rng)
        raw_text = _decorate(rng, tokens, hashtags)
        base_like = 6.0 if (truth_pos and geo == "PK") else 2.0
        like = int(rng.poisson(base_like))
        retweet = int(rng.poisson(base_like * 3))
        minutes = int(rng.integers(0, 60 * 24 * 13))
        hh, mm = divmod(minutes % (60 * 24), 60)
        day = 21 + minutes // (60 * 24)
        stamp = f"2021-04-{day:02d}T{hh:02d}:{mm:02d}:00+00:00" if day <= 30 else (
            f"2021-05-{day - 30:02d}T{hh:02d}:{mm:02d}:00+00:00"
        )
        tweet = FixtureTweet(
            id=f"t{i:05d}",
            raw_text=raw_text,
            hashtags=list(hashtags),
            mentions=[w[1:] for w in raw_text.split() if w.startswith("@")],
            urls=[w for w in raw_text.split() if w.startswith("https://")],
            like_count=like,
            retweet_count=retweet,
            geo_country=geo,
            profile_flags=list(flags),
            timestamp=stamp,
            true_label=SUPPORTIVE if truth_pos else NOT_SUPPORTIVE,
            bucket=bucket,
        )
        tweet.raw_tokens = tokens  # type: ignore[attr-defined]
        tweets.append(tweet)
        last_in_group[key] = i
    return tweets


def _seed_example(rng, positive: bool, theta_range: tuple[float, float],
                  neutral_only: bool = False) -> dict:
    n_tokens = 10 + int(rng.poisson(4))
    if neutral_only:
        tokens = [
            NEUTRAL_TERMS[int(rng.integers(len(NEUTRAL_TERMS)))] for _ in range(n_tokens)
        ]
    else:
        theta = float(rng.uniform(*theta_range))
        tokens = _body_tokens(rng, positive, positive, n_tokens, theta)
    return {"text": " ".join(tokens), "label": 1 if positive else 0}


def generate_scorer_seed(
    scorer: str, n_pos: int = 700, n_neg: int = 700, seed: int = 7
) -> list[dict]:
    """Training file for a builtin stand-in scorer.

    The hope-flavored seed leans on the hopeful word pool, the empathy one on
    the empathetic pool, so the two trained scorers rank differently.
    """
    rng = np.random.default_rng([seed, sum(map(ord, scorer))])
    theta = (0.6, 0.95) if scorer == "hope" else (0.05, 0.4)
    rows = [_seed_example(rng, True, theta) for _ in range(n_pos)]
    for i in range(n_neg):
        neutral = scorer != "hope" and i % 2 == 1
        rows.append(_seed_example(rng, False, theta, neutral_only=neutral))
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]


def generate_empathy_distress_file(path, seed: int = 7, n_pos: int = 916, n_neg: int = 905):
    """Synthetic stand-in with the empathy-distress corpus shape
    (916 positive / 905 negative responses)."""
    rng = np.random.default_rng([seed, 3721])
    rows = [_seed_example(rng, True, (0.05, 0.4)) for _ in range(n_pos)]
    rows += [_seed_example(rng, False, (0.05, 0.4)) for _ in range(n_neg)]
    order = rng.permutation(len(rows))
    with open(path, "w", encoding="utf-8") as fh:
        for i in order:
            fh.write(canonical_json(rows[i]) + "\n")


def write_fixture(outdir, n: int = 5000, seed: int = 7) -> dict:
    """Materialize the full fixture: corpus, hashtag groups, scorer seeds,
    ground truth, and a ready-to-run pipeline config with relative paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tweets = generate_tweets(n=n, seed=seed)
    with open(outdir / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for t in tweets:
            fh.write(
                canonical_json(
                    {
                        "id": t.id,
                        "text": t.raw_text,
                        "hashtags": t.hashtags,
                        "mentions": t.mentions,
                        "urls": t.urls,
                        "like_count": t.like_count,
                        "retweet_count": t.retweet_count,
                        "geo_country": t.geo_country,
                        "profile_flags": t.profile_flags,
                        "timestamp": t.timestamp,
                    }
                )
                + "\n"
            )
    (outdir / "groups.txt").write_text(GROUPS_TEXT, encoding="utf-8")
    with open(outdir / "truth.jsonl", "w", encoding="utf-8") as fh:
        for t in tweets:
            fh.write(canonical_json({"id": t.id, "label": t.true_label}) + "\n")
    for scorer in ("hope", "empathy"):
        with open(outdir / f"{scorer}_seed.jsonl", "w", encoding="utf-8") as fh:
            for row in generate_scorer_seed(scorer, seed=seed):
                fh.write(canonical_json(row) + "\n")
    config = f"""\
corpus: corpus.jsonl
groups: groups.txt
output_dir: out
seed: {seed}
min_tokens: 10
top_k: 400
neg_per_list: 250
bottom_frac: 0.8
n_pairs: 100000
runs: 5
eval_n: 1000
scorers:
  hope:
    kind: builtin
    train_data: hope_seed.jsonl
  empathy:
    kind: builtin
    train_data: empathy_seed.jsonl
"""
    (outdir / "config.yaml").write_text(config, encoding="utf-8")
    n_sup_pos = sum(
        1 for t in tweets if t.bucket == "supportive" and t.true_label == SUPPORTIVE
    )
    n_sup = sum(1 for t in tweets if t.bucket == "supportive")
    return {
        "n": n,
        "seed": seed,
        "supportive_bucket": n_sup,
        "supportive_bucket_positives": n_sup_pos,
    }


def load_truth(path) -> dict[str, str]:
    truth = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                truth[obj["id"]] = obj["label"]
    return truth


def fill_annotation_sheet(
    sheet_in, sheet_out, truth: dict[str, str], flip_prob: float = 0.08, seed: int = 7
):
    """Simulate annotators on a blank sheet: each annotator reports the true
    label flipped independently with `flip_prob`."""
    rng = np.random.default_rng([seed, 911])
    with open(sheet_in, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        annotators = header[2:]
        lines = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    with open(sheet_out, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for cells in lines:
            item_id, text = cells[0], cells[1]
            gold = truth[item_id]
            other = NOT_SUPPORTIVE if gold == SUPPORTIVE else SUPPORTIVE
            labels = [
                other if rng.random() < flip_prob else gold for _ in annotators
            ]
            fh.write("\t".join([item_id, text] + labels) + "\n")
