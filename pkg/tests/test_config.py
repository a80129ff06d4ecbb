import pytest

from supportive.config import PipelineConfig, ScorerSpec
from supportive.errors import ConfigError

VALID = """\
corpus: corpus.jsonl
groups: groups.txt
output_dir: out
seed: 7
top_k: 400
scorers:
  hope:
    kind: builtin
    train_data: hope_seed.jsonl
  ext:
    kind: external
    command: [python3, -m, scorer]
"""


def write(tmp_path, text):
    p = tmp_path / "config.yaml"
    p.write_text(text)
    return p


def test_load_valid(tmp_path):
    cfg = PipelineConfig.load(write(tmp_path, VALID))
    assert cfg.top_k == 400
    assert cfg.scorers["hope"].kind == "builtin"
    assert cfg.scorers["ext"].command == ["python3", "-m", "scorer"]
    assert cfg.split == [0.9, 0.1]


def test_unknown_field(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig.load(write(tmp_path, "corpus: a\nwat: 1\n"))


def test_bottom_frac_bounds(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig.load(write(tmp_path, "bottom_frac: 1.5\n"))


def test_split_must_sum_to_one(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig.load(write(tmp_path, "split: [0.8, 0.1]\n"))


def test_scorer_spec_requirements():
    with pytest.raises(ConfigError):
        ScorerSpec(name="x", kind="builtin").validate()
    with pytest.raises(ConfigError):
        ScorerSpec(name="x", kind="external").validate()
    with pytest.raises(ConfigError):
        ScorerSpec(name="x", kind="weird").validate()


def test_negative_values_rejected(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig.load(write(tmp_path, "top_k: 0\n"))
    with pytest.raises(ConfigError):
        PipelineConfig.load(write(tmp_path, "learning_rate: -1\n"))


def test_fingerprint_ignores_output_dir(tmp_path):
    c1 = PipelineConfig.load(write(tmp_path, VALID))
    c2 = PipelineConfig.load(write(tmp_path, VALID.replace("output_dir: out", "output_dir: elsewhere")))
    assert c1.fingerprint() == c2.fingerprint()
    c3 = PipelineConfig.load(write(tmp_path, VALID.replace("top_k: 400", "top_k: 500")))
    assert c1.fingerprint() != c3.fingerprint()


def test_overrides_recorded(tmp_path):
    cfg = PipelineConfig.load(write(tmp_path, VALID))
    applied = cfg.apply_overrides({"seed": 9, "runs": None})
    assert applied == {"seed": 9}
    assert cfg.seed == 9
    with pytest.raises(ConfigError):
        cfg.apply_overrides({"nonsense": 1})


def test_bad_yaml(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig.load(write(tmp_path, "corpus: [unclosed\n"))
    with pytest.raises(ConfigError):
        PipelineConfig.load(write(tmp_path, "- just\n- a list\n"))


def test_unknown_scorer_spec_field(tmp_path):
    bad = VALID + "    bogus_field: 1\n"
    with pytest.raises(ConfigError, match="bogus_field"):
        PipelineConfig.load(write(tmp_path, bad))
