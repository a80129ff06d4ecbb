"""Pipeline command line.

Every subcommand reads its inputs from the artifacts of upstream subcommands
inside the configured output directory, embeds the config fingerprint in its
outputs, and is individually re-runnable. Exit codes: 0 success, 2 config
error, 3 missing upstream artifact, 4 data error, 5 external scorer error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import fixtures
from .agreement import (
    fleiss_kappa,
    majority_gold,
    merge_adjudication,
    read_sheet,
    write_sheet,
)
from .cleaning import CleanText, clean
from .config import PipelineConfig
from .corpus import (
    CorpusPartition,
    group_id_sets,
    infer_country,
    jaccard,
    load_corpus,
    load_hashtag_groups,
    partition as partition_corpus,
)
from .errors import DataError, MissingArtifactError, PipelineError
from .experiments import (
    engagement_stats,
    hashtag_counts,
    run_experiment,
    term_frequencies,
)
from .linear import load_model, load_seed_dataset, save_model, train_scorer
from .provenance import (
    read_jsonl,
    update_manifest,
    verify_manifest,
    write_jsonl,
    write_tsv,
)
from .scorers import BuiltinScorer, ExternalScorer, ScorerHub, ScoreTable
from .weaklabel import (
    WeakDataset,
    build_eval_sample,
    build_hashtag_baseline,
    build_informed,
    repeated_rate,
)

INGESTED = "ingested.jsonl"
PARTITION = "partition.json"
SCORES = "scores.jsonl"
EVAL_DATASET = "eval.jsonl"
INFORMED = "informed.jsonl"
HASHTAG_DS = "hashtag.jsonl"
PAIR_RATES = "pair_rates.jsonl"


class Pipeline:
    """Shared state for one CLI invocation: config, paths, provenance."""

    def __init__(self, config_path: str, seed: int | None, jobs: int, output_dir: str | None):
        self.config_path = Path(config_path)
        if not self.config_path.exists():
            raise MissingArtifactError(f"config file {config_path} not found")
        self.cfg = PipelineConfig.load(self.config_path)
        self.overrides = self.cfg.apply_overrides({"seed": seed})
        if output_dir is not None:
            self.cfg.output_dir = output_dir
        self.jobs = max(1, jobs)
        self.base = self.config_path.parent

    def path(self, rel) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.base / p

    @property
    def outdir(self) -> Path:
        out = self.path(self.cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        return out

    def artifact(self, name: str, producer: str) -> Path:
        p = self.outdir / name
        if not p.exists():
            raise MissingArtifactError(
                f"{name} not found in {self.outdir}; run `supportive {producer}` first"
            )
        return p

    def meta(self, command: str, **extra) -> dict:
        block = {
            "config_fingerprint": self.cfg.fingerprint(),
            "command": command,
            "seed": self.cfg.seed,
        }
        if self.overrides:
            block["overrides"] = self.overrides
        block.update(extra)
        return block

    def finish(self, *names: str):
        update_manifest(self.outdir, names)

    # -- shared artifact loaders -------------------------------------------

    def load_ingested(self):
        meta, rows = read_jsonl(self.artifact(INGESTED, "ingest"))
        return meta, rows

    def ingested_texts(self, rows) -> dict[str, CleanText]:
        return {
            r["id"]: CleanText(
                text=r["clean_text"],
                tokens=tuple(r["clean_text"].split()),
                token_count=r["token_count"],
            )
            for r in rows
        }

    def filtered_ids(self, rows) -> set[str]:
        return {r["id"] for r in rows if r["token_count"] >= self.cfg.min_tokens}

    def load_partition(self) -> CorpusPartition:
        data = json.loads(self.artifact(PARTITION, "partition").read_text("utf-8"))
        return CorpusPartition(
            supportive=frozenset(data["supportive"]),
            not_supportive=frozenset(data["not_supportive"]),
            discarded=frozenset(data["discarded"]),
            unmatched=frozenset(data["unmatched"]),
        )

    def load_groups(self):
        groups_path = self.path(self.cfg.groups)
        if not groups_path.exists():
            raise MissingArtifactError(f"hashtag group config {groups_path} not found")
        return load_hashtag_groups(groups_path)

    def build_hub(self) -> ScorerHub:
        hub = ScorerHub()
        if not self.cfg.scorers:
            raise DataError("no scorers defined in config")
        try:
            for name, spec in self.cfg.scorers.items():
                if spec.kind == "builtin":
                    model_path = self.artifact(
                        f"scorers/{name}.model.json", f"train-scorer --name {name}"
                    )
                    hub.register(BuiltinScorer.from_file(name, model_path))
                else:
                    hub.register(
                        ExternalScorer(
                            spec.command,
                            name=name,
                            timeout=self.cfg.scorer_timeout,
                            batch_size=self.cfg.scorer_batch_size,
                        )
                    )
        except Exception:
            hub.close()
            raise
        return hub

    def eval_ids(self) -> set[str]:
        eval_path = self.outdir / EVAL_DATASET
        if not eval_path.exists():
            return set()
        return set(WeakDataset.load(eval_path).ids())


@click.group()
@click.option("--config", "-c", default="config.yaml", show_default=True,
              help="Pipeline config file (YAML).")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker cap for parallel stages.")
@click.option("--output-dir", default=None, help="Override the output directory.")
@click.pass_context
def main(ctx, config, seed, jobs, output_dir):
    """Weak-supervision pipeline for detecting supportive social-media content."""
    ctx.obj = (config, seed, jobs, output_dir)


def _pipeline(ctx) -> Pipeline:
    config, seed, jobs, output_dir = ctx.obj
    return Pipeline(config, seed, jobs, output_dir)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


@main.command()
@click.pass_context
def ingest(ctx):
    """Load the raw corpus, clean texts, and infer country labels."""
    p = _pipeline(ctx)
    corpus_path = p.path(p.cfg.corpus)
    if not corpus_path.exists():
        raise MissingArtifactError(f"corpus file {corpus_path} not found")
    corpus = load_corpus(corpus_path)
    rows = []
    n_filtered = 0
    n_inconsistent = 0
    for rec in corpus:
        ct = clean(rec.raw_text)
        label = infer_country(rec)
        if ct.token_count >= p.cfg.min_tokens:
            n_filtered += 1
        if not label.consistent:
            n_inconsistent += 1
        rows.append(
            {
                "id": rec.id,
                "clean_text": ct.text,
                "token_count": ct.token_count,
                "hashtags": list(rec.hashtags),
                "like_count": rec.like_count,
                "retweet_count": rec.retweet_count,
                "country": label.value,
                "country_source": label.source,
                "country_consistent": label.consistent,
            }
        )
    rows.sort(key=lambda r: r["id"])
    meta = p.meta(
        "ingest",
        corpus_fingerprint=corpus.fingerprint(),
        raw_records=len(corpus),
        skipped_lines=corpus.skipped,
        passing_length_filter=n_filtered,
        min_tokens=p.cfg.min_tokens,
        country_inconsistencies=n_inconsistent,
    )
    write_jsonl(p.outdir / INGESTED, meta, rows)
    p.finish(INGESTED)
    click.echo(
        f"ingested {len(corpus)} records ({corpus.skipped} malformed lines skipped); "
        f"{n_filtered} pass the {p.cfg.min_tokens}-token filter; "
        f"{n_inconsistent} geo/flag inconsistencies"
    )


@main.command("partition")
@click.pass_context
def partition_cmd(ctx):
    """Split the corpus by hashtag polarity."""
    p = _pipeline(ctx)
    groups = p.load_groups()
    _, rows = p.load_ingested()
    hashtags = {r["id"]: r["hashtags"] for r in rows}

    class _Rec:
        __slots__ = ("id", "hashtags")

        def __init__(self, tid, tags):
            self.id = tid
            self.hashtags = tags

    class _View:
        def __iter__(self):
            return (_Rec(t, h) for t, h in hashtags.items())

    part = partition_corpus(_View(), groups)
    payload = {
        "_meta": p.meta("partition"),
        "supportive": sorted(part.supportive),
        "not_supportive": sorted(part.not_supportive),
        "discarded": sorted(part.discarded),
        "unmatched": sorted(part.unmatched),
    }
    (p.outdir / PARTITION).write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    p.finish(PARTITION)
    click.echo(
        f"partition: supportive={len(part.supportive)} "
        f"not-supportive={len(part.not_supportive)} "
        f"discarded={len(part.discarded)} unmatched={len(part.unmatched)}"
    )


@main.command("train-scorer")
@click.option("--name", required=True, help="Scorer name (e.g. hope, empathy).")
@click.option("--data", default=None,
              help="Training file; defaults to the scorer's configured train_data.")
@click.option("--kind", default=None, help="logistic or hinge.")
@click.pass_context
def train_scorer_cmd(ctx, name, data, kind):
    """Train a builtin scorer from a (text, label) seed file or a dataset."""
    p = _pipeline(ctx)
    if data is None:
        spec = p.cfg.scorers.get(name)
        if spec is None or not spec.train_data:
            raise DataError(
                f"scorer {name!r} has no train_data in config; pass --data"
            )
        data = spec.train_data
        kind = kind or spec.model_kind
    kind = kind or "logistic"
    data_path = p.path(data)
    if not data_path.exists():
        raise MissingArtifactError(f"training file {data_path} not found")
    rows = _load_training_rows(data_path)
    model, vocab, accuracy = train_scorer(
        rows,
        kind=kind,
        seed=p.cfg.seed,
        train_fraction=p.cfg.split[0],
        min_df=p.cfg.min_df,
        epochs=p.cfg.epochs,
        learning_rate=p.cfg.learning_rate,
        l2=p.cfg.l2,
    )
    scorer_dir = p.outdir / "scorers"
    scorer_dir.mkdir(exist_ok=True)
    out = scorer_dir / f"{name}.model.json"
    model.config["config_fingerprint"] = p.cfg.fingerprint()
    save_model(out, model, vocab)
    p.finish(f"scorers/{name}.model.json")
    click.echo(
        f"trained {kind} scorer {name!r} on {len(rows)} rows; "
        f"held-out accuracy {accuracy:.4f}"
    )


def _load_training_rows(path) -> list[tuple[str, int]]:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    try:
        head = json.loads(first) if first.strip() else {}
    except json.JSONDecodeError:
        head = {}
    if isinstance(head, dict) and head.get("_meta", {}).get("kind") == "weak_dataset":
        ds = WeakDataset.load(path)
        unlabeled = [ex.id for ex in ds.examples if ex.label is None]
        if unlabeled:
            raise DataError(f"dataset {path} has unlabeled rows, e.g. {unlabeled[0]!r}")
        return [(ex.text, 1 if ex.label == "supportive" else 0) for ex in ds.examples]
    return load_seed_dataset(path)


@main.command()
@click.pass_context
def score(ctx):
    """Score every length-filtered partitioned tweet with every scorer."""
    p = _pipeline(ctx)
    meta, rows = p.load_ingested()
    part = p.load_partition()
    texts = p.ingested_texts(rows)
    keep = sorted(
        (part.supportive | part.not_supportive) & p.filtered_ids(rows)
    )
    tweets = [(tid, texts[tid]) for tid in keep]
    corpus_fp = meta.get("corpus_fingerprint", "")

    out_path = p.outdir / SCORES
    with p.build_hub() as hub:
        if out_path.exists():
            try:
                old = ScoreTable.load(out_path)
            except Exception:
                old = None  # corrupt cache: rescore
            if (
                old is not None
                and old.corpus_fingerprint == corpus_fp
                and old.scorers == hub.names
                and old.scorer_versions == hub.versions()
                and old.ids() == set(keep)
            ):
                click.echo(f"scores up to date ({len(old)} tweets); skipping")
                return
        table = hub.score_corpus(tweets, corpus_fingerprint=corpus_fp)
    table.save(out_path, extra_meta=p.meta("score"))
    p.finish(SCORES)
    click.echo(f"scored {len(table)} tweets with {list(hub.names)}")


@main.command("sample-eval")
@click.pass_context
def sample_eval(ctx):
    """Draw the evaluation sample and emit a blank annotation sheet."""
    p = _pipeline(ctx)
    _, rows = p.load_ingested()
    part = p.load_partition().restricted(p.filtered_ids(rows))
    texts = {r["id"]: r["clean_text"] for r in rows}
    ds = build_eval_sample(part, texts, n=p.cfg.eval_n, seed=p.cfg.seed)
    ds.save(p.outdir / EVAL_DATASET, extra_meta=p.meta("sample-eval"))
    annotators = tuple(f"annotator_{i + 1}" for i in range(p.cfg.annotators))
    sheet = p.outdir / "eval.sheet.round1.tsv"
    write_sheet(sheet, ((ex.id, ex.text, {}) for ex in ds.examples), annotators)
    p.finish(EVAL_DATASET, "eval.sheet.round1.tsv")
    click.echo(f"sampled {len(ds)} eval tweets; blank sheet at {sheet.name}")


@main.command("build-informed")
@click.pass_context
def build_informed_cmd(ctx):
    """Informed sampling: top-ranked positives, low-tail sampled negatives."""
    p = _pipeline(ctx)
    _, rows = p.load_ingested()
    table = ScoreTable.load(p.artifact(SCORES, "score"))
    part = p.load_partition().restricted(table.ids())
    texts = {r["id"]: r["clean_text"] for r in rows}
    exclude = p.eval_ids() if p.cfg.exclude_eval_from_weak else set()
    scorer_names = tuple(p.cfg.scorers) or ("hope", "empathy")
    ds = build_informed(
        table,
        part,
        texts,
        top_k=p.cfg.top_k,
        neg_per_list=p.cfg.neg_per_list,
        bottom_frac=p.cfg.bottom_frac,
        seed=p.cfg.seed,
        exclude_ids=exclude,
        scorers=scorer_names,
    )
    ds.save(p.outdir / INFORMED, extra_meta=p.meta("build-informed"))
    p.finish(INFORMED)
    click.echo(
        f"informed dataset: {len(ds.positives())} positives "
        f"(from {2 * p.cfg.top_k}), {len(ds.negatives())} negatives"
        + (f"; excluded {len(exclude)} eval ids" if exclude else "")
    )


@main.command("build-hashtag-baseline")
@click.pass_context
def build_hashtag_cmd(ctx):
    """Hashtag-only weak labels sized to mirror the informed dataset."""
    p = _pipeline(ctx)
    _, rows = p.load_ingested()
    informed = WeakDataset.load(p.artifact(INFORMED, "build-informed"))
    part = p.load_partition().restricted(p.filtered_ids(rows))
    texts = {r["id"]: r["clean_text"] for r in rows}
    exclude = p.eval_ids() if p.cfg.exclude_eval_from_weak else set()
    ds = build_hashtag_baseline(
        part,
        texts,
        n_pos=len(informed.positives()),
        n_neg=len(informed.negatives()),
        seed=p.cfg.seed,
        exclude_ids=exclude,
    )
    ds.save(p.outdir / HASHTAG_DS, extra_meta=p.meta("build-hashtag-baseline"))
    p.finish(HASHTAG_DS)
    click.echo(
        f"hashtag baseline: {len(ds.positives())} positives, "
        f"{len(ds.negatives())} negatives"
    )


@main.command("pair-rate")
@click.pass_context
def pair_rate_cmd(ctx):
    """Monte-Carlo discriminability rate for every scorer."""
    p = _pipeline(ctx)
    table = ScoreTable.load(p.artifact(SCORES, "score"))
    part = p.load_partition().restricted(table.ids())
    out_rows = []
    for scorer in table.scorers:
        summary = repeated_rate(
            table,
            part,
            scorer,
            n_pairs=p.cfg.n_pairs,
            runs=p.cfg.runs,
            base_seed=p.cfg.seed,
            jobs=p.jobs,
        )
        out_rows.append(
            {
                "scorer": scorer,
                "mean": summary.mean,
                "std": summary.std,
                "rates": list(summary.rates),
                "n_pairs": summary.n_pairs,
                "seeds": list(summary.seeds),
            }
        )
        click.echo(
            f"{scorer}: rate {100 * summary.mean:.2f}% ± {100 * summary.std:.2f}% "
            f"({summary.n_pairs} pairs x {len(summary.rates)} runs)"
        )
    write_jsonl(p.outdir / PAIR_RATES, p.meta("pair-rate"), out_rows)
    write_tsv(
        p.outdir / "pair_rates.tsv",
        [f"config={p.cfg.fingerprint()}", "rate of supportive-side strict wins"],
        ["scorer", "mean", "std", "n_pairs", "runs"],
        [
            (r["scorer"], _fmt(r["mean"]), _fmt(r["std"]), r["n_pairs"], len(r["rates"]))
            for r in out_rows
        ],
    )
    p.finish(PAIR_RATES, "pair_rates.tsv")


@main.command()
@click.option("--sheet", required=True, type=click.Path(), help="Filled annotation sheet (TSV).")
@click.pass_context
def kappa(ctx, sheet):
    """Fleiss' kappa and majority gold labels for an annotation sheet."""
    p = _pipeline(ctx)
    sheet_path = p.path(sheet)
    if not sheet_path.exists():
        raise MissingArtifactError(f"annotation sheet {sheet_path} not found")
    matrix = read_sheet(sheet_path)
    k = fleiss_kappa(matrix)
    gold = majority_gold(matrix)
    resolved = {i: l for i, l in gold.labels.items() if l is not None}
    rnd = matrix.round
    payload = {
        "_meta": p.meta("kappa", sheet=sheet_path.name),
        "round": rnd,
        "fleiss_kappa": k,
        "items": len(matrix.labels),
        "annotators": len(matrix.annotators),
        "unresolved": gold.unresolved_items(),
    }
    (p.outdir / f"kappa.round{rnd}.json").write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    gold_rows = [
        {"id": i, "label": gold.labels[i], "resolution": gold.resolution[i]}
        for i in sorted(gold.labels)
    ]
    write_jsonl(p.outdir / "gold.jsonl", p.meta("kappa", round=rnd), gold_rows)
    p.finish(f"kappa.round{rnd}.json", "gold.jsonl")
    click.echo(
        f"round {rnd}: Fleiss' kappa {k:.4f} over {len(matrix.labels)} items; "
        f"{len(resolved)} resolved, {len(gold.unresolved_items())} tied"
    )


@main.command()
@click.option("--sheet", required=True, type=click.Path(), help="Base annotation sheet.")
@click.option("--revisions", default=None, type=click.Path(),
              help="Next-round sheet with revised labels to merge.")
@click.pass_context
def adjudicate(ctx, sheet, revisions):
    """Merge an adjudication round, or emit the next-round sheet of ties."""
    p = _pipeline(ctx)
    sheet_path = p.path(sheet)
    if not sheet_path.exists():
        raise MissingArtifactError(f"annotation sheet {sheet_path} not found")
    matrix = read_sheet(sheet_path)
    if revisions:
        rev_path = p.path(revisions)
        if not rev_path.exists():
            raise MissingArtifactError(f"revisions sheet {rev_path} not found")
        matrix = merge_adjudication(matrix, read_sheet(rev_path))
        k = fleiss_kappa(matrix)
        click.echo(f"merged round {matrix.round}: Fleiss' kappa now {k:.4f}")
    gold = majority_gold(matrix)
    tied = gold.unresolved_items()
    next_round = matrix.round + 1
    out_name = f"eval.sheet.round{next_round}.tsv"
    if tied:
        write_sheet(
            p.outdir / out_name,
            ((i, matrix.texts.get(i, ""), {}) for i in tied),
            matrix.annotators,
        )
        p.finish(out_name)
        click.echo(f"{len(tied)} tied items exported to {out_name}")
    else:
        click.echo("no tied items remain")
    if revisions:
        gold_rows = [
            {"id": i, "label": gold.labels[i], "resolution": gold.resolution[i]}
            for i in sorted(gold.labels)
        ]
        write_jsonl(
            p.outdir / "gold.jsonl",
            p.meta("adjudicate", round=matrix.round),
            gold_rows,
        )
        p.finish("gold.jsonl")


@main.command()
@click.option("--train", "train_file", required=True, type=click.Path(),
              help="Training dataset (weak dataset file).")
@click.option("--gold", "gold_file", required=True, type=click.Path(),
              help="Gold labels for the eval sample (gold.jsonl or truth file).")
@click.option("--name", default=None, help="Model name for the report.")
@click.option("--kind", default="hinge", show_default=True, help="logistic or hinge.")
@click.pass_context
def experiment(ctx, train_file, gold_file, name, kind):
    """Seeded training/evaluation runs against the gold-labeled eval set."""
    p = _pipeline(ctx)
    train_path = p.path(train_file)
    if not train_path.exists():
        raise MissingArtifactError(
            f"training dataset {train_path} not found; run `supportive "
            f"build-informed` or `supportive build-hashtag-baseline` first"
        )
    train_ds = WeakDataset.load(train_path)
    eval_ds = WeakDataset.load(p.artifact(EVAL_DATASET, "sample-eval"))
    gold_path = p.path(gold_file)
    if not gold_path.exists():
        raise MissingArtifactError(f"gold label file {gold_path} not found")
    gold = _load_gold(gold_path)
    name = name or train_path.stem
    report = run_experiment(
        train_ds,
        eval_ds,
        gold,
        kind=kind,
        runs=p.cfg.runs,
        base_seed=p.cfg.seed,
        model_name=name,
        min_df=p.cfg.min_df,
        epochs=p.cfg.epochs,
        learning_rate=p.cfg.learning_rate,
        l2=p.cfg.l2,
    )
    rows = [
        {
            "run": i,
            "seed": report.seeds[i],
            "precision": m.precision,
            "recall": m.recall,
            "f1": m.f1,
            "tp": m.tp,
            "fp": m.fp,
            "fn": m.fn,
            "tn": m.tn,
        }
        for i, m in enumerate(report.runs)
    ]
    meta = p.meta(
        "experiment",
        model_name=name,
        kind=kind,
        mean=report.mean,
        std=report.std,
        train_fingerprint=report.train_fingerprint,
        eval_fingerprint=report.eval_fingerprint,
        model_config=report.config,
    )
    write_jsonl(p.outdir / f"report.{name}.jsonl", meta, rows)
    write_tsv(
        p.outdir / f"report.{name}.tsv",
        [
            f"config={p.cfg.fingerprint()}",
            f"model={name} kind={kind} runs={len(rows)} base_seed={p.cfg.seed}",
            "mean±std (population std): "
            + " ".join(
                f"{k}={100 * report.mean[k]:.2f}±{100 * report.std[k]:.2f}"
                for k in ("precision", "recall", "f1")
            ),
        ],
        ["run", "seed", "precision", "recall", "f1", "tp", "fp", "fn", "tn"],
        [
            (
                r["run"], r["seed"], _fmt(r["precision"]), _fmt(r["recall"]),
                _fmt(r["f1"]), r["tp"], r["fp"], r["fn"], r["tn"],
            )
            for r in rows
        ],
    )
    p.finish(f"report.{name}.jsonl", f"report.{name}.tsv")
    click.echo(
        f"{name} ({kind}): P {100 * report.mean['precision']:.2f}"
        f"±{100 * report.std['precision']:.2f} "
        f"R {100 * report.mean['recall']:.2f}±{100 * report.std['recall']:.2f} "
        f"F1 {100 * report.mean['f1']:.2f}±{100 * report.std['f1']:.2f}"
    )


def _load_gold(path) -> dict[str, str]:
    gold = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "_meta" in obj:
                continue
            if obj.get("label"):
                gold[obj["id"]] = obj["label"]
    if not gold:
        raise DataError(f"no usable gold labels in {path}")
    return gold


@main.command()
@click.option("--model", "model_file", default=None, type=click.Path(),
              help="Serialized model; adds predicted-label engagement rows.")
@click.pass_context
def engagement(ctx, model_file):
    """Engagement analytics per hashtag group, partition side, and country,
    plus the hashtag co-occurrence (Jaccard) matrix and variant counts."""
    p = _pipeline(ctx)
    meta, rows = p.load_ingested()
    groups = p.load_groups()
    part = p.load_partition()

    class _Rec:
        __slots__ = ("id", "hashtags", "like_count", "retweet_count")

        def __init__(self, r):
            self.id = r["id"]
            self.hashtags = r["hashtags"]
            self.like_count = r["like_count"]
            self.retweet_count = r["retweet_count"]

    recs = {r["id"]: _Rec(r) for r in rows}
    country = {r["id"]: r["country"] for r in rows}
    bucket = {
        tid: (c if c in ("India", "Pakistan") else "Other")
        for tid, c in country.items()
    }

    out_rows = []
    id_sets = group_id_sets(_iter_view(recs.values()), groups)
    buckets = ("India", "Pakistan", "Other")
    for gid in sorted(id_sets):
        members = [recs[t] for t in id_sets[gid]]
        if not members:
            continue
        stats = engagement_stats(
            members,
            {m.id: gid for m in members},
            {m.id: bucket[m.id] for m in members},
            expected_keys=[(gid, b) for b in buckets],
        )
        out_rows += [("group", r) for r in stats]
    side_of = {}
    for side, ids in (
        ("supportive", part.supportive),
        ("not-supportive", part.not_supportive),
        ("discarded", part.discarded),
        ("unmatched", part.unmatched),
    ):
        for t in ids:
            side_of[t] = side
    stats = engagement_stats(
        list(recs.values()),
        side_of,
        {t: bucket[t] for t in recs},
    )
    out_rows += [("partition", r) for r in stats]

    if model_file:
        out_rows += _predicted_engagement(p, rows, recs, bucket, model_file)

    comments = [
        f"config={p.cfg.fingerprint()}",
        "std is population std (ddof=0); share = count / scope total",
    ]
    write_tsv(
        p.outdir / "engagement.tsv",
        comments,
        ["scope", "group_key", "country", "count", "share",
         "like_mean", "like_std", "retweet_mean", "retweet_std"],
        [
            (
                scope, r.group_key, r.country, r.count, _fmt(r.share),
                _fmt(r.like_mean), _fmt(r.like_std),
                _fmt(r.retweet_mean), _fmt(r.retweet_std),
            )
            for scope, r in out_rows
        ],
    )
    write_jsonl(
        p.outdir / "engagement.jsonl",
        p.meta("engagement", std="population"),
        (
            {
                "scope": scope, "group_key": r.group_key, "country": r.country,
                "count": r.count, "share": r.share,
                "like_mean": r.like_mean, "like_std": r.like_std,
                "retweet_mean": r.retweet_mean, "retweet_std": r.retweet_std,
            }
            for scope, r in out_rows
        ),
    )

    jac_rows = []
    gids = sorted(id_sets)
    for i, a in enumerate(gids):
        for b in gids[i + 1:]:
            if id_sets[a] or id_sets[b]:
                jac_rows.append(
                    {"a": a, "b": b, "jaccard": jaccard(id_sets[a], id_sets[b])}
                )
    write_jsonl(p.outdir / "jaccard.jsonl", p.meta("engagement"), jac_rows)
    write_tsv(
        p.outdir / "jaccard.tsv",
        [f"config={p.cfg.fingerprint()}"],
        ["group_a", "group_b", "jaccard"],
        [(r["a"], r["b"], f"{r['jaccard']:.4f}") for r in jac_rows],
    )

    counts = hashtag_counts(
        _iter_view(recs.values()),
        groups,
        {t: _CountryShim(country[t]) for t in recs},
    )
    write_tsv(
        p.outdir / "hashtag_counts.tsv",
        [f"config={p.cfg.fingerprint()}", "All row = column sums over variant rows"],
        ["group_id", "variant", "total", "india", "pakistan"],
        [(r["group_id"], r["variant"], r["total"], r["india"], r["pakistan"]) for r in counts],
    )
    p.finish(
        "engagement.tsv", "engagement.jsonl", "jaccard.jsonl", "jaccard.tsv",
        "hashtag_counts.tsv",
    )
    click.echo(
        f"engagement rows: {len(out_rows)}; jaccard pairs: {len(jac_rows)}; "
        f"variant rows: {len(counts) - 1}"
    )


class _CountryShim:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


def _iter_view(records):
    class _V:
        def __iter__(self):
            return iter(list(records))

    return _V()


def _predicted_engagement(p, rows, recs, bucket, model_file):
    model_path = p.path(model_file)
    if not model_path.exists():
        raise MissingArtifactError(f"model file {model_path} not found")
    model, vocab = load_model(model_path)
    from .linear import make_vectorizer, predict

    vec = make_vectorizer(vocab)
    filtered = sorted(p.filtered_ids(rows))
    texts = p.ingested_texts(rows)
    out = []
    vectors = vec.transform([texts[t] for t in filtered])
    labels = {
        tid: "supportive" if predict(model, v) == 1 else "not-supportive"
        for tid, v in zip(filtered, vectors)
    }
    for b in ("India", "Pakistan", "Other"):
        members = [recs[t] for t in filtered if bucket[t] == b]
        if not members:
            continue
        stats = engagement_stats(
            members,
            {m.id: labels[m.id] for m in members},
            {m.id: b for m in members},
        )
        out += [("predicted", r) for r in stats]
    return out


@main.command()
@click.option("--top", default=200, show_default=True, help="Terms per group.")
@click.pass_context
def termfreq(ctx, top):
    """Term-frequency export per hashtag group (word-cloud input)."""
    p = _pipeline(ctx)
    _, rows = p.load_ingested()
    groups = p.load_groups()
    texts = p.ingested_texts(rows)

    class _Rec:
        __slots__ = ("id", "hashtags")

        def __init__(self, r):
            self.id = r["id"]
            self.hashtags = r["hashtags"]

    id_sets = group_id_sets(_iter_view([_Rec(r) for r in rows]), groups)
    written = []
    for gid in sorted(id_sets):
        freq = term_frequencies(
            (texts[t] for t in sorted(id_sets[gid])), top_n=top
        ) if id_sets[gid] else []
        name = f"termfreq.{gid}.tsv"
        write_tsv(
            p.outdir / name,
            [f"config={p.cfg.fingerprint()}", f"group={gid} tweets={len(id_sets[gid])}"],
            ["term", "count"],
            freq,
        )
        written.append(name)
    p.finish(*written)
    click.echo(f"term frequencies written for {len(written)} groups (top {top})")


@main.command()
@click.pass_context
def verify(ctx):
    """Re-hash output artifacts against the manifest; nonzero on drift."""
    p = _pipeline(ctx)
    bad = verify_manifest(p.outdir)
    if bad:
        raise DataError(f"artifacts drifted or missing: {', '.join(bad)}")
    click.echo("all artifacts match the manifest")


@main.command("make-fixture")
@click.option("--dir", "out", required=True, type=click.Path(), help="Fixture directory.")
@click.option("--n", default=5000, show_default=True)
@click.option("--seed", default=7, show_default=True)
def make_fixture(out, n, seed):
    """Generate the synthetic corpus fixture with known ground truth."""
    info = fixtures.write_fixture(out, n=n, seed=seed)
    click.echo(
        f"fixture with {info['n']} tweets at {out} "
        f"(supportive bucket {info['supportive_bucket']}, "
        f"{info['supportive_bucket_positives']} true positives)"
    )


def run(argv=None) -> int:
    try:
        main.main(args=argv, standalone_mode=False)
        return 0
    except PipelineError as exc:
        click.echo(f"error[{type(exc).__name__}]: {exc}", err=True)
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.exceptions.Abort:
        return 130


def entry():
    sys.exit(run())


if __name__ == "__main__":
    sys.exit(run())
