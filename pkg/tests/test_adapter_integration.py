"""Secondary-component acceptance: the TypeScript adapter must pass the
hub's protocol conformance suite unmodified, beat the majority baseline
after a 1-epoch fine-tune, and plug into `score` and `build-informed`.

Skipped when the adapter has not been built (adapter/dist/cli.js absent)
or node is unavailable; the primary suite stays green without it.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import run_cli
from supportive import fixtures
from supportive.provenance import read_jsonl
from supportive.scorers import ScoreTable, check_protocol_conformance
from supportive.weaklabel import WeakDataset

REPO = Path(__file__).resolve().parent.parent
ADAPTER_CLI = REPO / "adapter" / "dist" / "cli.js"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not ADAPTER_CLI.exists(),
    reason="secondary adapter not built (run `npm run build` in adapter/)",
)


def finetune(data, out, name, epochs=1, seed=3):
    result = subprocess.run(
        [
            "node", str(ADAPTER_CLI), "finetune",
            "--data", str(data), "--out", str(out),
            "--name", name, "--epochs", str(epochs), "--seed", str(seed),
        ],
        capture_output=True, text=True, timeout=300,
    )
    assert result.returncode == 0, result.stderr
    return json.loads(result.stdout)


def serve_command(model, name):
    return ["node", str(ADAPTER_CLI), "serve", "--model", str(model), "--name", name]


def test_finetune_smoke_beats_majority(tmp_path):
    data = tmp_path / "seed.jsonl"
    rows = []
    for i in range(25):
        rows.append({"text": f"hope peace unity together sample {i}", "label": 1})
        rows.append({"text": f"war anger blame hostile sample {i}", "label": 0})
    data.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    summary = finetune(data, tmp_path / "m.json", "hope", epochs=1)
    # balanced 50-example fixture: majority baseline can't exceed the larger
    # held-out class share; with a 10% holdout of 5 that is at most 4/5
    assert summary["held_out_accuracy"] > 0.8
    print(f"[PASS] adapter-finetune: 1 epoch on a 50-example separable fixture, "
          f"held-out accuracy {summary['held_out_accuracy']:.3f} > majority")


def test_hub_conformance_suite_unmodified(tmp_path):
    data = tmp_path / "seed.jsonl"
    rows = [{"text": f"hope peace {i}", "label": 1} for i in range(20)]
    rows += [{"text": f"war anger {i}", "label": 0} for i in range(20)]
    data.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    finetune(data, tmp_path / "m.json", "hope")
    report = check_protocol_conformance(
        serve_command(tmp_path / "m.json", "hope"), n_requests=10
    )
    assert report["name"] == "hope"
    assert len(report["scores"]) == 10
    assert all(0.0 <= p <= 1.0 for p in report["scores"].values())
    print("[PASS] adapter-protocol: handshake + 10-request round trip with "
          "bijective ids and p in [0,1]; hub conformance suite unmodified")


def test_adapter_plugs_into_score_and_build_informed(tmp_path):
    fixtures.write_fixture(tmp_path, n=800, seed=3)
    models = tmp_path / "models"
    models.mkdir()
    for name in ("hope", "empathy"):
        finetune(tmp_path / f"{name}_seed.jsonl", models / f"{name}.json", name,
                 epochs=2)

    def argv(model, name):
        return "[" + ", ".join(serve_command(models / model, name)) + "]"

    config = f"""\
corpus: corpus.jsonl
groups: groups.txt
output_dir: out
seed: 3
eval_n: 150
top_k: 80
neg_per_list: 40
scorers:
  hope:
    kind: external
    command: {argv('hope.json', 'hope')}
  empathy:
    kind: external
    command: {argv('empathy.json', 'empathy')}
"""
    cfg = tmp_path / "config.yaml"
    cfg.write_text(config)
    for step in ("ingest", "partition", "score", "sample-eval", "build-informed"):
        run_cli(cfg, step)

    table = ScoreTable.load(tmp_path / "out" / "scores.jsonl")
    assert table.scorers == ("hope", "empathy")
    assert len(table) > 300
    informed = WeakDataset.load(tmp_path / "out" / "informed.jsonl")
    assert 0 < len(informed.positives()) <= 160
    assert 0 < len(informed.negatives()) <= 80
    meta, _ = read_jsonl(tmp_path / "out" / "informed.jsonl")
    assert meta["config_fingerprint"]
    print(f"[PASS] adapter-end-to-end: external adapters scored "
          f"{len(table)} tweets through the hub; build-informed produced "
          f"{len(informed.positives())}+/{len(informed.negatives())}- examples")
