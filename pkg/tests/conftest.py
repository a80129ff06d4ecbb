import pytest

from supportive import fixtures
from supportive.cli import run as cli_run

PIPELINE_STEPS = [
    ("ingest",),
    ("partition",),
    ("train-scorer", "--name", "hope"),
    ("train-scorer", "--name", "empathy"),
    ("score",),
    ("sample-eval",),
    ("build-informed",),
    ("build-hashtag-baseline",),
    ("pair-rate",),
    ("engagement",),
    ("termfreq",),
]


def run_cli(config_path, *args, seed=None, output_dir=None, expect=0):
    argv = ["-c", str(config_path)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    if output_dir is not None:
        argv += ["--output-dir", str(output_dir)]
    argv += [str(a) for a in args]
    rc = cli_run(argv)
    assert rc == expect, f"supportive {' '.join(argv)} exited {rc}, expected {expect}"
    return rc


def run_pipeline(config_path, seed=None, output_dir=None, steps=PIPELINE_STEPS):
    for step in steps:
        run_cli(config_path, *step, seed=seed, output_dir=output_dir)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixture")
    fixtures.write_fixture(d, n=5000, seed=7)
    return d


@pytest.fixture(scope="session")
def pipeline_out(fixture_dir):
    """One full pipeline run over the synthetic fixture, shared read-only."""
    run_pipeline(fixture_dir / "config.yaml")
    return fixture_dir / "out"
