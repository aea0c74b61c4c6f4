import pytest


@pytest.fixture(scope="session")
def run_export(tmp_path_factory):
    """One real run directory produced by the primary pipeline (3 mock judges).

    The analysis package consumes only the exported files; the pipeline runs
    here purely to produce them the same way production would.
    """
    from resumejudge.cli import main

    base = tmp_path_factory.mktemp("export")
    corpus = base / "corpus.jsonl"
    assert main(["synth", "--n", "50", "--seed", "7", "--out", str(corpus)]) == 0
    overrides = [
        f"corpus.source={corpus}",
        f"run_root={base / 'runs'}",
        f"embedding.cache_dir={base / 'cache'}",
        "sweep.shots=[3]",
        "sweep.sample_types=[high_only]",
        "sweep.attribute_types=[overall_only]",
    ]
    args = []
    for item in overrides:
        args += ["--set", item]
    for stage in ("ingest", "embed", "ground-truth", "sweep", "report"):
        assert main([stage] + args) == 0, f"stage {stage} failed"
    run_dirs = [p for p in (base / "runs").iterdir() if p.is_dir()]
    assert len(run_dirs) == 1
    return run_dirs[0]
