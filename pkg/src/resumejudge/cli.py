"""Operator CLI: ingest | embed | ground-truth | select | judge | sweep | report.

One structured YAML config drives the pipeline; flags override config keys.
Every artifact lands under <run_root>/<run_id>/ where run_id is a digest of
the effective config (minus output location) and the corpus source, so
re-running an unchanged pipeline is a cached no-op and never hits the
network. Credentials come only from env vars (see JudgeConfig.api_key_env).
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import re
import sys
from pathlib import Path

import yaml

from . import corpus as corpus_mod
from . import evaluation as eval_mod
from . import manifest as mf
from . import synthetic
from .embedding import (
    EmbedConfig,
    embed_corpus,
    load_embedding_export,
    save_embedding_export,
)
from .errors import ResumeJudgeError, ValidationError
from .judge import JudgeConfig, judge_resumes, save_verdicts
from .prompting import load_templates
from .sampling import (
    FewShotExample,
    SampleSpec,
    compose_sample_set,
    select_clustering,
    select_diversity,
    select_similarity,
)

DEFAULT_CONFIG = {
    "run_root": "runs",
    "corpus": {
        "source": "data/corpus.jsonl",
        "min_item_chars": 100,
        "salt": "localdev",
    },
    "embedding": {
        "backend": "mock",
        "model_id": "mock-embedder",
        "endpoint_url": "",
        "dim": 32,
        "max_concurrency": 4,
        "max_retries": 3,
        "timeout_s": 30.0,
        "cache_dir": "cache/embeddings",
    },
    "prompting": {"locale": "en"},
    "judges": {
        "reference": [
            {"model_id": "ref-alpha", "backend": "mock", "mock_seed": 101},
            {"model_id": "ref-beta", "backend": "mock", "mock_seed": 202},
            {"model_id": "ref-gamma", "backend": "mock", "mock_seed": 303},
        ],
        "candidate": {
            "model_id": "candidate",
            "backend": "mock",
            "mock_seed": 101,
            "temperature": 0.0,
            "batch_size": 5,
            "max_retries": 3,
        },
    },
    "sweep": {
        "strategies": ["diversity", "similarity", "clustering"],
        "shots": [3, 5, 10, 15, 20],
        "sample_types": ["high_only", "high_and_low"],
        "attribute_types": ["overall_only", "overall_and_dimensions"],
        "seeds": [0],
        "high_pool": "gt_high",
    },
    "select": {
        "strategy": "clustering",
        "n_shots": 5,
        "sample_type": "high_only",
        "attribute_type": "overall_and_dimensions",
        "seed": 0,
        "gt_model_id": "",
    },
    "report": {"figure_shots": 5, "figure_seed": 0},
}

_JUDGE_CFG_KEYS = (
    "model_id",
    "endpoint_url",
    "temperature",
    "batch_size",
    "max_retries",
    "timeout_s",
    "backend",
    "mock_seed",
    "multi_resume_prompts",
    "api_key_env",
)


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | None, overrides: list[str] | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise ValidationError(f"config {path} is not a mapping")
        cfg = _deep_merge(cfg, loaded)
    for item in overrides or []:
        if "=" not in item:
            raise ValidationError(f"--set expects dotted.key=value, got {item!r}")
        dotted, raw_value = item.split("=", 1)
        node = cfg
        keys = dotted.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ValidationError(f"--set path {dotted!r} crosses a non-mapping")
        node[keys[-1]] = yaml.safe_load(raw_value)
    return cfg


def _semantic_config(cfg: dict) -> dict:
    """Config as it affects results: output location stripped."""
    out = copy.deepcopy(cfg)
    out.pop("run_root", None)
    return out


def resolve_run(cfg: dict) -> tuple[str, Path]:
    source = Path(cfg["corpus"]["source"])
    if not source.exists():
        raise ValidationError(
            f"corpus source {source} not found (generate one with `resumejudge synth`)"
        )
    run_id = mf.config_digest(
        {"config": _semantic_config(cfg), "source": mf.file_digest(source)}
    )[:12]
    return run_id, Path(cfg["run_root"]) / run_id


def _judge_config(section: dict) -> JudgeConfig:
    unknown = set(section) - set(_JUDGE_CFG_KEYS)
    if unknown:
        raise ValidationError(f"unknown judge config keys: {sorted(unknown)}")
    return JudgeConfig(**section)


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def _manifest_for(cfg: dict, run_id: str, run_dir: Path) -> mf.RunManifest:
    manifest = mf.load_manifest(run_dir)
    if manifest is None:
        manifest = mf.RunManifest(run_id=run_id, config_snapshot=_semantic_config(cfg))
    else:
        mf.check_config_match(manifest, _semantic_config(cfg))
    return manifest


def _stage_gate(manifest, run_dir, stage, cfg_digest, inputs_digest) -> bool:
    """True -> stage is already done ("cached"). Raises on tampering."""
    status = mf.stage_status(manifest, run_dir, stage, cfg_digest, inputs_digest)
    if status == "stale":
        raise ValidationError(
            f"{stage}: artifacts changed on disk since the manifest recorded them "
            "(stale artifacts); remove the run directory or restore the files"
        )
    return status == "current"


def cmd_synth(args) -> int:
    records = synthetic.generate_corpus(args.n, args.seed)
    synthetic.write_raw_corpus(records, args.out)
    print(f"synth: wrote {len(records)} records to {args.out} (seed {args.seed})")
    return 0


def cmd_ingest(args) -> int:
    cfg = load_config(args.config, args.set)
    run_id, run_dir = resolve_run(cfg)
    manifest = _manifest_for(cfg, run_id, run_dir)
    ccfg = cfg["corpus"]
    cfg_digest = mf.config_digest(ccfg)
    inputs_digest = mf.file_digest(ccfg["source"])
    if _stage_gate(manifest, run_dir, "ingest", cfg_digest, inputs_digest):
        print(f"ingest: cached (run {run_id})")
        return 0

    records, stats = corpus_mod.ingest(
        ccfg["source"], ccfg["min_item_chars"], salt=ccfg["salt"]
    )
    corpus_path = run_dir / "corpus.jsonl"
    corpus_mod.write_corpus(records, corpus_path)
    report_path = run_dir / "ingest_report.json"
    _write_json(report_path, stats.to_dict())

    id_map = corpus_mod.build_id_map(ccfg["source"], ccfg["salt"])
    id_map_path = run_dir / "id_map.jsonl"
    with open(id_map_path, "w", encoding="utf-8") as fh:
        for original, anon in sorted(id_map.items()):
            fh.write(json.dumps({"original": original, "id": anon}, ensure_ascii=False) + "\n")
    os.chmod(id_map_path, 0o600)  # operator-only sidecar

    manifest.corpus_digest = mf.file_digest(corpus_path)
    mf.mark_stage(
        manifest, run_dir, "ingest",
        [corpus_path, report_path, id_map_path], cfg_digest, inputs_digest,
    )
    mf.save_manifest(manifest, run_dir)
    notice = f"ingest: {stats.retained} records retained"
    if stats.parse_errors:
        notice += f", {len(stats.parse_errors)} malformed lines reported"
        for line_no, msg in stats.parse_errors[:10]:
            print(f"  line {line_no}: {msg}", file=sys.stderr)
    print(f"{notice} (run {run_id})")
    return 0


def cmd_embed(args) -> int:
    cfg = load_config(args.config, args.set)
    run_id, run_dir = resolve_run(cfg)
    manifest = mf.require_stages(_manifest_for(cfg, run_id, run_dir), "embed")
    ecfg = cfg["embedding"]
    cfg_digest = mf.config_digest(ecfg)
    inputs_digest = manifest.corpus_digest
    if _stage_gate(manifest, run_dir, "embed", cfg_digest, inputs_digest):
        print(f"embed: cached (run {run_id})")
        return 0

    records = corpus_mod.read_corpus(run_dir / "corpus.jsonl")
    embed_cfg = EmbedConfig(
        model_id=ecfg["model_id"],
        backend=ecfg["backend"],
        endpoint_url=ecfg["endpoint_url"],
        dim=ecfg["dim"],
        max_concurrency=ecfg["max_concurrency"],
        max_retries=ecfg["max_retries"],
        timeout_s=ecfg["timeout_s"],
        cache_dir=ecfg["cache_dir"],
    )
    ce = embed_corpus(records, embed_cfg)
    export_path = run_dir / "embedding_export.npz"
    save_embedding_export(ce, export_path)
    manifest.embedding_model_id = ce.model_id
    mf.mark_stage(manifest, run_dir, "embed", [export_path], cfg_digest, inputs_digest)
    mf.save_manifest(manifest, run_dir)
    print(f"embed: {len(ce)} vectors, dim {ce.matrix().shape[1]} (run {run_id})")
    return 0


def cmd_ground_truth(args) -> int:
    cfg = load_config(args.config, args.set)
    run_id, run_dir = resolve_run(cfg)
    manifest = mf.require_stages(_manifest_for(cfg, run_id, run_dir), "ground-truth")
    refs = cfg["judges"]["reference"]
    locale = cfg["prompting"]["locale"]
    cfg_digest = mf.config_digest({"references": refs, "locale": locale})
    inputs_digest = manifest.corpus_digest
    if _stage_gate(manifest, run_dir, "ground-truth", cfg_digest, inputs_digest):
        print(f"ground-truth: cached (run {run_id})")
        return 0

    records = corpus_mod.read_corpus(run_dir / "corpus.jsonl")
    templates = load_templates(locale)
    artifacts = []
    for section in refs:
        ref_cfg = _judge_config(section)
        audit_path = run_dir / "audit" / f"gt_{_slug(ref_cfg.model_id)}.jsonl"
        if audit_path.exists():
            audit_path.unlink()  # rebuild, append-only within one run
        gt = eval_mod.build_ground_truth(
            records,
            ref_cfg,
            templates,
            audit_path=audit_path,
            corpus_digest=manifest.corpus_digest,
        )
        gt_path = run_dir / "gt" / f"{_slug(ref_cfg.model_id)}.json"
        eval_mod.save_ground_truth(gt, gt_path)
        artifacts += [gt_path, audit_path]
        n_high = sum(1 for v in gt.labels.values() if v == "High")
        print(
            f"ground-truth[{ref_cfg.model_id}]: {len(gt.labels)} labels "
            f"({n_high} High, {len(gt.labels) - n_high} Low, "
            f"{len(gt.excluded)} excluded)"
        )
    manifest.template_version = templates.version
    mf.mark_stage(manifest, run_dir, "ground-truth", artifacts, cfg_digest, inputs_digest)
    mf.save_manifest(manifest, run_dir)
    print(f"ground-truth: {len(refs)} sets (run {run_id})")
    return 0


def _load_gts(run_dir: Path) -> list[eval_mod.GroundTruthSet]:
    gt_dir = run_dir / "gt"
    gts = []
    for path in sorted(gt_dir.glob("*.json")):
        gts.append(eval_mod.load_ground_truth(path))
    if not gts:
        raise ValidationError("no ground-truth sets found: run `ground-truth` first")
    return gts


def _gt_by_id(gts, model_id: str):
    if not model_id:
        return gts[0]
    for gt in gts:
        if gt.model_id == model_id:
            return gt
    raise ValidationError(f"no ground-truth set for model {model_id!r}")


def cmd_select(args) -> int:
    cfg = load_config(args.config, args.set)
    run_id, run_dir = resolve_run(cfg)
    manifest = mf.require_stages(_manifest_for(cfg, run_id, run_dir), "select")
    scfg = cfg["select"]
    cfg_digest = mf.config_digest({"select": scfg, "high_pool": cfg["sweep"]["high_pool"]})
    inputs_digest = mf.config_digest(
        {
            "corpus": manifest.corpus_digest,
            "embed": manifest.stages["embed"]["artifacts"],
            "gt": manifest.stages["ground-truth"]["artifacts"],
        }
    )
    if _stage_gate(manifest, run_dir, "select", cfg_digest, inputs_digest):
        print(f"select: cached (run {run_id})")
        return 0

    records = corpus_mod.read_corpus(run_dir / "corpus.jsonl")
    records_by_id = {r.id: r for r in records}
    ce = load_embedding_export(run_dir / "embedding_export.npz")
    gt = _gt_by_id(_load_gts(run_dir), scfg["gt_model_id"])
    spec = SampleSpec(
        strategy=scfg["strategy"],
        n_shots=scfg["n_shots"],
        sample_type=scfg["sample_type"],
        attribute_type=scfg["attribute_type"],
        seed=scfg["seed"],
    )
    covered = [rid for rid in ce.ids if rid in gt.labels]
    examples = compose_sample_set(
        spec, ce.subset(covered), gt, records_by_id, high_pool=cfg["sweep"]["high_pool"]
    )
    out_path = run_dir / "selections" / f"{spec.strategy}_N{spec.n_shots}.json"
    _write_json(
        out_path,
        {
            "run_id": run_id,
            "template_version": manifest.template_version,
            "gt_model_id": gt.model_id,
            "spec": spec.to_dict(),
            "selected": [
                {
                    "resume_id": ex.resume_id,
                    "overall": ex.overall,
                    "dim_scores": list(ex.dim_scores) if ex.dim_scores else None,
                }
                for ex in examples
            ],
        },
    )
    mf.mark_stage(manifest, run_dir, "select", [out_path], cfg_digest, inputs_digest)
    mf.save_manifest(manifest, run_dir)
    print(f"select: {len(examples)} exemplars -> {out_path.name} (run {run_id})")
    return 0


def cmd_judge(args) -> int:
    cfg = load_config(args.config, args.set)
    run_id, run_dir = resolve_run(cfg)
    manifest = mf.require_stages(_manifest_for(cfg, run_id, run_dir), "judge")
    jcfg_section = cfg["judges"]["candidate"]
    selection_path = args.selection
    selection_digest = mf.file_digest(selection_path) if selection_path else ""
    cfg_digest = mf.config_digest(
        {
            "candidate": jcfg_section,
            "locale": cfg["prompting"]["locale"],
            "selection": selection_digest,
        }
    )
    inputs_digest = manifest.corpus_digest
    if _stage_gate(manifest, run_dir, "judge", cfg_digest, inputs_digest):
        print(f"judge: cached (run {run_id})")
        return 0

    records = corpus_mod.read_corpus(run_dir / "corpus.jsonl")
    records_by_id = {r.id: r for r in records}
    templates = load_templates(cfg["prompting"]["locale"])
    judge_cfg = _judge_config(jcfg_section)

    examples: list[FewShotExample] = []
    attribute_type = "overall_only"
    if selection_path:
        sel = json.loads(Path(selection_path).read_text(encoding="utf-8"))
        attribute_type = sel["spec"]["attribute_type"]
        for entry in sel["selected"]:
            examples.append(
                FewShotExample(
                    resume_id=entry["resume_id"],
                    record=records_by_id[entry["resume_id"]],
                    overall=entry["overall"],
                    dim_scores=tuple(entry["dim_scores"]) if entry["dim_scores"] else None,
                )
            )
    exemplar_ids = {ex.resume_id for ex in examples}
    targets = [r for r in records if r.id not in exemplar_ids]

    audit_path = run_dir / "audit" / f"judge_{_slug(judge_cfg.model_id)}.jsonl"
    if audit_path.exists():
        audit_path.unlink()
    verdicts = judge_resumes(
        targets, examples, judge_cfg, templates,
        attribute_type=attribute_type, audit_path=audit_path,
    )
    out_path = run_dir / "verdicts" / f"{_slug(judge_cfg.model_id)}.json"
    save_verdicts(
        verdicts,
        out_path,
        meta={
            "run_id": run_id,
            "judge_model_id": judge_cfg.model_id,
            "template_version": templates.version,
            "selection": str(selection_path) if selection_path else None,
        },
    )
    mf.mark_stage(
        manifest, run_dir, "judge", [out_path, audit_path], cfg_digest, inputs_digest
    )
    mf.save_manifest(manifest, run_dir)
    unparsed = sum(1 for v in verdicts if v.overall == "Unparsed")
    print(f"judge: {len(verdicts)} verdicts, {unparsed} unparsed (run {run_id})")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, args.set)
    run_id, run_dir = resolve_run(cfg)
    manifest = mf.require_stages(_manifest_for(cfg, run_id, run_dir), "sweep")
    swcfg = cfg["sweep"]
    cfg_digest = mf.config_digest(
        {
            "sweep": swcfg,
            "candidate": cfg["judges"]["candidate"],
            "locale": cfg["prompting"]["locale"],
        }
    )
    inputs_digest = mf.config_digest(
        {
            "corpus": manifest.corpus_digest,
            "embed": manifest.stages["embed"]["artifacts"],
            "gt": manifest.stages["ground-truth"]["artifacts"],
        }
    )
    if _stage_gate(manifest, run_dir, "sweep", cfg_digest, inputs_digest):
        print(f"sweep: cached (run {run_id})")
        return 0

    records = corpus_mod.read_corpus(run_dir / "corpus.jsonl")
    ce = load_embedding_export(run_dir / "embedding_export.npz")
    gts = _load_gts(run_dir)
    templates = load_templates(cfg["prompting"]["locale"])
    judge_cfg = _judge_config(cfg["judges"]["candidate"])
    grid = eval_mod.SweepGrid(
        strategies=tuple(swcfg["strategies"]),
        shots=tuple(swcfg["shots"]),
        sample_types=tuple(swcfg["sample_types"]),
        attribute_types=tuple(swcfg["attribute_types"]),
        seeds=tuple(swcfg["seeds"]),
    )
    reports, summary = eval_mod.run_sweep(
        grid, records, ce, gts, judge_cfg, templates, high_pool=swcfg["high_pool"]
    )
    rows_path = run_dir / "sweep" / "rows.jsonl"
    rows_path.parent.mkdir(parents=True, exist_ok=True)
    with open(rows_path, "w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    summary_path = run_dir / "sweep" / "summary.json"
    _write_json(
        summary_path,
        {
            "run_id": run_id,
            "judge_model_id": judge_cfg.model_id,
            "grid": {
                "strategies": list(grid.strategies),
                "shots": list(grid.shots),
                "sample_types": list(grid.sample_types),
                "attribute_types": list(grid.attribute_types),
                "seeds": list(grid.seeds),
            },
            **summary,
        },
    )
    mf.mark_stage(
        manifest, run_dir, "sweep", [rows_path, summary_path], cfg_digest, inputs_digest
    )
    mf.save_manifest(manifest, run_dir)
    print(
        f"sweep: {len(reports)} rows over {len(gts)} ground-truth sets, "
        f"{len(summary['skipped'])} skipped (run {run_id})"
    )
    return 0


def _format_report_text(rows: list[dict], summary: dict, disagreement: dict | None) -> str:
    lines = ["Evaluation sweep report", "=" * 70]
    lines.append(
        "Note: exemplar resumes are excluded from their own run's evaluation targets."
    )
    by_gt: dict[str, list[dict]] = {}
    for row in rows:
        by_gt.setdefault(row["gt_model_id"], []).append(row)
    for gt_model, gt_rows in by_gt.items():
        lines.append("")
        lines.append(f"Ground truth: {gt_model}")
        lines.append(
            f"{'strategy':<12} {'N':>3} {'sample_type':<14} {'attributes':<22} "
            f"{'acc':>7} {'n':>4} {'unparsed':>8} {'mean_s':>8} {'std_s':>8}"
        )
        lines.append("-" * 70)
        for row in gt_rows:
            spec = row["spec"]
            lines.append(
                f"{spec['strategy']:<12} {spec['n_shots']:>3} {spec['sample_type']:<14} "
                f"{spec['attribute_type']:<22} {row['accuracy']:>7.4f} {row['n']:>4} "
                f"{row['unparsed_count']:>8} {row['timing_mean_s']:>8.3f} "
                f"{row['timing_std_s']:>8.3f}"
            )
        best = summary.get("best_per_gt", {}).get(gt_model)
        if best:
            spec = best["spec"]
            lines.append(
                f"best: {spec['strategy']} N={spec['n_shots']} {spec['sample_type']} "
                f"{spec['attribute_type']} acc={best['accuracy']:.4f}"
            )
    if disagreement is not None:
        lines.append("")
        lines.append(
            f"Reference-judge disagreement: {disagreement['rate']:.4f} "
            f"over {disagreement['n_shared']} shared resumes"
        )
    skipped = summary.get("skipped", [])
    if skipped:
        lines.append("")
        lines.append(f"Skipped grid points: {len(skipped)}")
        for entry in skipped:
            spec = entry["spec"]
            lines.append(
                f"  {entry['gt_model_id']} {spec['strategy']} N={spec['n_shots']} "
                f"{spec['sample_type']}: {entry['reason']}"
            )
    lines.append("")
    return "\n".join(lines)


def cmd_report(args) -> int:
    cfg = load_config(args.config, args.set)
    run_id, run_dir = resolve_run(cfg)
    manifest = mf.require_stages(_manifest_for(cfg, run_id, run_dir), "report")
    rcfg = cfg["report"]
    cfg_digest = mf.config_digest(rcfg)
    inputs_digest = mf.config_digest({"sweep": manifest.stages["sweep"]["artifacts"]})
    if _stage_gate(manifest, run_dir, "report", cfg_digest, inputs_digest):
        print(f"report: cached (run {run_id})")
        return 0

    problems = mf.integrity_check(manifest, run_dir)
    if problems:
        for problem in problems:
            print(f"integrity: {problem}", file=sys.stderr)
        raise ValidationError(f"integrity pass failed with {len(problems)} problems")

    rows = []
    with open(run_dir / "sweep" / "rows.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    summary = json.loads((run_dir / "sweep" / "summary.json").read_text(encoding="utf-8"))
    gts = _load_gts(run_dir)

    artifacts = []
    disagreement = None
    if len(gts) >= 2:
        rate = eval_mod.disagreement_rate(gts)
        shared = set(gts[0].labels)
        for gt in gts[1:]:
            shared &= set(gt.labels)
        disagreement = {
            "rate": rate,
            "gt_models": [gt.model_id for gt in gts],
            "n_shared": len(shared),
        }
        dis_path = run_dir / "report" / "disagreement.json"
        _write_json(dis_path, {"run_id": run_id, **disagreement})
        artifacts.append(dis_path)

    # per-reference-judge score exports for the analysis package
    for gt in gts:
        stats = eval_mod.score_stats(gt)
        stats_path = run_dir / "report" / "score_stats" / f"{_slug(gt.model_id)}.json"
        _write_json(stats_path, {"run_id": run_id, "model_id": gt.model_id, "stats": stats})
        dump_path = run_dir / "report" / "score_dumps" / f"{_slug(gt.model_id)}.json"
        _write_json(
            dump_path,
            {
                "run_id": run_id,
                "model_id": gt.model_id,
                "labels": gt.labels,
                "dim_scores": {rid: list(s) for rid, s in gt.dim_scores.items()},
            },
        )
        artifacts += [stats_path, dump_path]

    # strategy selections over the full corpus at the figure shot count
    ce = load_embedding_export(run_dir / "embedding_export.npz")
    n_fig = int(rcfg["figure_shots"])
    fig_seed = int(rcfg["figure_seed"])
    for strategy in cfg["sweep"]["strategies"]:
        if strategy == "diversity":
            ids = select_diversity(ce, n_fig)
        elif strategy == "similarity":
            ids = select_similarity(ce, n_fig)
        else:
            ids = select_clustering(ce, n_fig, fig_seed)
        sel_path = run_dir / "report" / "selections" / f"{strategy}_N{n_fig}.json"
        _write_json(
            sel_path,
            {
                "run_id": run_id,
                "strategy": strategy,
                "n": n_fig,
                "seed": fig_seed,
                "selected_ids": ids,
            },
        )
        artifacts.append(sel_path)

    text = _format_report_text(rows, summary, disagreement)
    report_path = run_dir / "report" / "report.txt"
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(text, encoding="utf-8")
    artifacts.append(report_path)

    mf.mark_stage(manifest, run_dir, "report", artifacts, cfg_digest, inputs_digest)
    mf.save_manifest(manifest, run_dir)
    print(text)
    print(f"report: artifacts under {run_dir / 'report'} (run {run_id})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resumejudge",
        description="Few-shot resume screening pipeline: ingest, embed, judge, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p_synth.add_argument("--n", type=int, default=50)
    p_synth.add_argument("--seed", type=int, default=7)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    for name, func in (
        ("ingest", cmd_ingest),
        ("embed", cmd_embed),
        ("ground-truth", cmd_ground_truth),
        ("select", cmd_select),
        ("judge", cmd_judge),
        ("sweep", cmd_sweep),
        ("report", cmd_report),
    ):
        p = sub.add_parser(name, help=f"run the {name} stage")
        p.add_argument("--config", default=None, help="YAML config file")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override a config key, e.g. --set corpus.source=data/x.jsonl",
        )
        if name == "judge":
            p.add_argument("--selection", default=None, help="selection export to use as exemplars")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResumeJudgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
