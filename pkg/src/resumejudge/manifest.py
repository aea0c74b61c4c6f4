"""Run manifest: stage completion markers, artifact digests, integrity checks.

Every pipeline artifact lives under a run directory named by a deterministic
run id (digest of the effective config and the corpus source). Stages record
their artifacts here; downstream commands refuse to run until their upstream
markers exist, and `report` verifies that the directory contains exactly the
artifacts the manifest vouches for.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import StageError, ValidationError

MANIFEST_NAME = "manifest.json"

# upstream stages each command requires
STAGE_DEPS = {
    "ingest": (),
    "embed": ("ingest",),
    "ground-truth": ("ingest",),
    "select": ("embed", "ground-truth"),
    "judge": ("ingest",),
    "sweep": ("embed", "ground-truth"),
    "report": ("sweep",),
}


def file_digest(path) -> str:
    h = hashlib.blake2b(digest_size=16)
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def config_digest(obj) -> str:
    canon = json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.blake2b(canon.encode("utf-8"), digest_size=16).hexdigest()


@dataclass
class RunManifest:
    run_id: str
    corpus_digest: str = ""
    embedding_model_id: str = ""
    template_version: str = ""
    seeds: dict = field(default_factory=dict)
    config_snapshot: dict = field(default_factory=dict)
    # stage -> {"config_digest": ..., "inputs_digest": ..., "artifacts": {relpath: digest}}
    stages: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "corpus_digest": self.corpus_digest,
            "embedding_model_id": self.embedding_model_id,
            "template_version": self.template_version,
            "seeds": self.seeds,
            "config_snapshot": self.config_snapshot,
            "stages": self.stages,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunManifest":
        return cls(
            run_id=obj["run_id"],
            corpus_digest=obj.get("corpus_digest", ""),
            embedding_model_id=obj.get("embedding_model_id", ""),
            template_version=obj.get("template_version", ""),
            seeds=obj.get("seeds", {}),
            config_snapshot=obj.get("config_snapshot", {}),
            stages=obj.get("stages", {}),
        )


def manifest_path(run_dir) -> Path:
    return Path(run_dir) / MANIFEST_NAME


def load_manifest(run_dir) -> RunManifest | None:
    path = manifest_path(run_dir)
    if not path.exists():
        return None
    return RunManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))


def save_manifest(manifest: RunManifest, run_dir) -> None:
    path = manifest_path(run_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(manifest.to_dict(), ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def require_stages(manifest: RunManifest | None, command: str) -> RunManifest:
    for dep in STAGE_DEPS.get(command, ()):
        if manifest is None or dep not in manifest.stages:
            raise StageError(f"`{command}` needs completed upstream artifacts: run `{dep}` first")
    if manifest is None:
        raise StageError(f"no run manifest found for `{command}`")
    return manifest


def mark_stage(
    manifest: RunManifest,
    run_dir,
    stage: str,
    artifact_paths: list,
    cfg_digest: str,
    inputs_digest: str = "",
) -> None:
    run_dir = Path(run_dir)
    artifacts = {}
    for p in artifact_paths:
        p = Path(p)
        rel = str(p.relative_to(run_dir))
        artifacts[rel] = file_digest(p)
    manifest.stages[stage] = {
        "config_digest": cfg_digest,
        "inputs_digest": inputs_digest,
        "artifacts": artifacts,
    }


def stage_status(
    manifest: RunManifest | None,
    run_dir,
    stage: str,
    cfg_digest: str,
    inputs_digest: str = "",
) -> str:
    """One of:

    "current" - ran with identical config/inputs, artifacts verify: skip it.
    "stale"   - marker matches but artifacts were altered on disk: error.
    "missing" - never ran, or config/inputs legitimately changed: run it.
    """
    if manifest is None or stage not in manifest.stages:
        return "missing"
    info = manifest.stages[stage]
    if info.get("config_digest") != cfg_digest or info.get("inputs_digest") != inputs_digest:
        return "missing"
    run_dir = Path(run_dir)
    for rel, digest in info.get("artifacts", {}).items():
        path = run_dir / rel
        if not path.exists() or file_digest(path) != digest:
            return "stale"
    return "current"


def integrity_check(manifest: RunManifest, run_dir) -> list[str]:
    """All recorded artifacts must exist with matching digests, and the run
    directory must hold nothing else. Returns a list of problems."""
    run_dir = Path(run_dir)
    problems: list[str] = []
    known = {MANIFEST_NAME}
    for stage, info in manifest.stages.items():
        for rel, digest in info.get("artifacts", {}).items():
            known.add(rel)
            path = run_dir / rel
            if not path.exists():
                problems.append(f"{stage}: missing artifact {rel}")
            elif file_digest(path) != digest:
                problems.append(f"{stage}: digest mismatch for {rel} (stale artifact)")
    for path in sorted(run_dir.rglob("*")):
        if path.is_dir():
            continue
        rel = str(path.relative_to(run_dir))
        if rel not in known:
            problems.append(f"orphan artifact not in manifest: {rel}")
    return problems


def check_config_match(manifest: RunManifest, cfg_snapshot: dict) -> None:
    if manifest.config_snapshot and manifest.config_snapshot != cfg_snapshot:
        raise ValidationError(
            "config changed since this run directory was created "
            "(stale artifacts); use a fresh run or restore the config"
        )
