import pytest

from resumejudge.errors import StageError, ValidationError
from resumejudge.manifest import (
    RunManifest,
    check_config_match,
    config_digest,
    file_digest,
    integrity_check,
    load_manifest,
    mark_stage,
    require_stages,
    save_manifest,
    stage_status,
)


@pytest.fixture()
def run_dir(tmp_path):
    d = tmp_path / "run"
    d.mkdir()
    return d


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def test_file_digest_stable_and_content_sensitive(tmp_path):
    p = write(tmp_path / "a.txt", "hello")
    q = write(tmp_path / "b.txt", "hello")
    r = write(tmp_path / "c.txt", "hellp")
    assert file_digest(p) == file_digest(q)
    assert file_digest(p) != file_digest(r)


def test_config_digest_key_order_independent():
    assert config_digest({"a": 1, "b": [2, 3]}) == config_digest({"b": [2, 3], "a": 1})
    assert config_digest({"a": 1}) != config_digest({"a": 2})


def test_manifest_round_trip(run_dir):
    manifest = RunManifest(run_id="abc123", corpus_digest="d1", seeds={"master": 7})
    artifact = write(run_dir / "out.json", "{}")
    mark_stage(manifest, run_dir, "ingest", [artifact], "cfg1", "in1")
    save_manifest(manifest, run_dir)
    loaded = load_manifest(run_dir)
    assert loaded.run_id == "abc123"
    assert loaded.corpus_digest == "d1"
    assert loaded.stages["ingest"]["config_digest"] == "cfg1"
    assert "out.json" in loaded.stages["ingest"]["artifacts"]


def test_load_manifest_missing(run_dir):
    assert load_manifest(run_dir) is None


def test_require_stages_names_missing_dep():
    with pytest.raises(StageError) as exc:
        require_stages(None, "sweep")
    assert "`sweep`" in str(exc.value)
    assert "`embed`" in str(exc.value)

    manifest = RunManifest(run_id="x")
    manifest.stages["embed"] = {"artifacts": {}}
    with pytest.raises(StageError) as exc:
        require_stages(manifest, "sweep")
    assert "`ground-truth`" in str(exc.value)


def test_require_stages_passes_when_complete():
    manifest = RunManifest(run_id="x")
    manifest.stages["embed"] = {"artifacts": {}}
    manifest.stages["ground-truth"] = {"artifacts": {}}
    assert require_stages(manifest, "sweep") is manifest


def test_stage_status_lifecycle(run_dir):
    manifest = RunManifest(run_id="x")
    assert stage_status(manifest, run_dir, "ingest", "cfg1", "in1") == "missing"

    artifact = write(run_dir / "corpus.jsonl", "line\n")
    mark_stage(manifest, run_dir, "ingest", [artifact], "cfg1", "in1")
    assert stage_status(manifest, run_dir, "ingest", "cfg1", "in1") == "current"
    # changed config or inputs -> legitimately needs a re-run
    assert stage_status(manifest, run_dir, "ingest", "cfg2", "in1") == "missing"
    assert stage_status(manifest, run_dir, "ingest", "cfg1", "in2") == "missing"
    # tampered artifact -> stale
    artifact.write_text("tampered\n", encoding="utf-8")
    assert stage_status(manifest, run_dir, "ingest", "cfg1", "in1") == "stale"
    # deleted artifact -> stale too
    artifact.unlink()
    assert stage_status(manifest, run_dir, "ingest", "cfg1", "in1") == "stale"


def test_integrity_check_clean(run_dir):
    manifest = RunManifest(run_id="x")
    a = write(run_dir / "corpus.jsonl", "data\n")
    b = write(run_dir / "gt" / "ref.json", "{}")
    mark_stage(manifest, run_dir, "ingest", [a], "c", "i")
    mark_stage(manifest, run_dir, "ground-truth", [b], "c", "i")
    save_manifest(manifest, run_dir)
    assert integrity_check(manifest, run_dir) == []


def test_integrity_check_detects_missing(run_dir):
    manifest = RunManifest(run_id="x")
    a = write(run_dir / "corpus.jsonl", "data\n")
    mark_stage(manifest, run_dir, "ingest", [a], "c", "i")
    a.unlink()
    problems = integrity_check(manifest, run_dir)
    assert len(problems) == 1
    assert "missing artifact" in problems[0]


def test_integrity_check_detects_tampering(run_dir):
    manifest = RunManifest(run_id="x")
    a = write(run_dir / "corpus.jsonl", "data\n")
    mark_stage(manifest, run_dir, "ingest", [a], "c", "i")
    a.write_text("altered\n", encoding="utf-8")
    problems = integrity_check(manifest, run_dir)
    assert len(problems) == 1
    assert "digest mismatch" in problems[0]


def test_integrity_check_detects_orphans(run_dir):
    manifest = RunManifest(run_id="x")
    a = write(run_dir / "corpus.jsonl", "data\n")
    mark_stage(manifest, run_dir, "ingest", [a], "c", "i")
    save_manifest(manifest, run_dir)
    write(run_dir / "stray" / "note.txt", "who put this here")
    problems = integrity_check(manifest, run_dir)
    assert len(problems) == 1
    assert "orphan" in problems[0]
    assert "note.txt" in problems[0]


def test_manifest_file_itself_is_not_an_orphan(run_dir):
    manifest = RunManifest(run_id="x")
    a = write(run_dir / "corpus.jsonl", "data\n")
    mark_stage(manifest, run_dir, "ingest", [a], "c", "i")
    save_manifest(manifest, run_dir)
    assert integrity_check(manifest, run_dir) == []


def test_check_config_match(run_dir):
    manifest = RunManifest(run_id="x", config_snapshot={"a": 1})
    check_config_match(manifest, {"a": 1})
    with pytest.raises(ValidationError):
        check_config_match(manifest, {"a": 2})
