import numpy as np
import pytest

from supportive.cleaning import clean, extract_flag_codes, passes_length_filter

MESSY = [
    "Prayers for India #IndiaNeedsOxygen @user https://t.co/x",
    "Get well soon, India!!!",
    "",
    "RT @someone: stay strong \U0001f64f\U0001f64f #PakistanStandsWithIndia",
    "visit www.example.com/page?x=1 NOW!!!",
    "mixed #Tags and @Mentions and ❤️ emoji...",
    "don't stop believing",
    "numbers 123 and COVID19 survive",
    "\U0001f1ee\U0001f1f3\U0001f1f5\U0001f1f0 flags only",
    "tabs\tand\nnewlines  collapse",
]


def test_spec_examples():
    ct = clean("Prayers for India #IndiaNeedsOxygen @user https://t.co/x")
    assert ct.text == "prayers for india"
    assert ct.token_count == 3

    ct = clean("")
    assert ct.text == "" and ct.token_count == 0

    ct = clean("Get well soon, India!!!")
    assert ct.text == "get well soon india"
    assert ct.token_count == 4


def test_no_forbidden_substrings():
    for raw in MESSY:
        text = clean(raw).text
        assert "#" not in text and "@" not in text
        assert "http" not in text and "www." not in text
        for ch in text:
            assert ord(ch) < 0x2190, f"symbol {ch!r} survived in {text!r}"


def test_idempotent():
    for raw in MESSY:
        once = clean(raw)
        twice = clean(once.text)
        assert twice.text == once.text
        assert twice.tokens == once.tokens


def test_token_count_matches_tokens():
    rng = np.random.default_rng(0)
    words = ["alpha", "beta!", "#tag", "@m", "x,y", "https://t.co/q"]
    for _ in range(50):
        raw = " ".join(rng.choice(words, size=rng.integers(0, 12)))
        ct = clean(raw)
        assert ct.token_count == len(ct.tokens)
        assert ct.text == " ".join(ct.tokens)


def test_length_filter():
    ten = clean(" ".join(["w"] * 10))
    nine = clean(" ".join(["w"] * 9))
    assert passes_length_filter(ten, 10) is True
    assert passes_length_filter(nine, 10) is False
    assert passes_length_filter(clean(""), 0) is True
    with pytest.raises(ValueError):
        passes_length_filter(ten, -1)


def test_flag_codes():
    assert extract_flag_codes("\U0001f1ee\U0001f1f3") == ["IN"]
    assert extract_flag_codes("a \U0001f1f5\U0001f1f0 b \U0001f1ee\U0001f1f3") == ["PK", "IN"]
    assert extract_flag_codes("\U0001f1f5\U0001f1f0\U0001f1f5\U0001f1f0") == ["PK"]
    assert extract_flag_codes("no flags") == []
