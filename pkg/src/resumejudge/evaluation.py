"""Ground-truth construction, accuracy, disagreement, sweeps, and stats.

Accuracy is exact label agreement averaged over the compared resumes;
Unparsed predictions never match. The sweep walks the full configuration
grid per ground-truth set, excluding each run's exemplars from its
evaluation targets.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .corpus import ResumeRecord
from .embedding import CorpusEmbedding
from .errors import InfeasibleSpecError, ValidationError
from .judge import JudgeConfig, JudgeVerdict, judge_resumes
from .prompting import TemplateSet
from .sampling import (
    ATTRIBUTE_TYPES,
    SAMPLE_TYPES,
    STRATEGIES,
    SampleSpec,
    compose_sample_set,
)

log = logging.getLogger(__name__)

DIMENSIONS = ("content", "structure", "language")


@dataclass
class GroundTruthSet:
    model_id: str
    labels: dict[str, str]  # resume id -> High | Low
    dim_scores: dict[str, tuple[int, int, int]]
    excluded: list[str] = field(default_factory=list)  # unparsed after retries
    template_version: str = ""
    corpus_digest: str = ""

    def __post_init__(self):
        for rid, label in self.labels.items():
            if label not in ("High", "Low"):
                raise ValidationError(f"gt label for {rid} must be High or Low")
        for rid, scores in self.dim_scores.items():
            if any(not 0 <= s <= 10 for s in scores):
                raise ValidationError(f"gt scores for {rid} out of range")

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "labels": self.labels,
            "dim_scores": {rid: list(s) for rid, s in self.dim_scores.items()},
            "excluded": self.excluded,
            "template_version": self.template_version,
            "corpus_digest": self.corpus_digest,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GroundTruthSet":
        return cls(
            model_id=obj["model_id"],
            labels=dict(obj["labels"]),
            dim_scores={rid: tuple(s) for rid, s in obj["dim_scores"].items()},
            excluded=list(obj.get("excluded", [])),
            template_version=obj.get("template_version", ""),
            corpus_digest=obj.get("corpus_digest", ""),
        )


def save_ground_truth(gt: GroundTruthSet, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(gt.to_dict(), ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def load_ground_truth(path) -> GroundTruthSet:
    return GroundTruthSet.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_ground_truth(
    records: list[ResumeRecord],
    ref_cfg: JudgeConfig,
    templates: TemplateSet,
    *,
    audit_path=None,
    template_version: str = "",
    corpus_digest: str = "",
) -> GroundTruthSet:
    """Zero-shot reference judging over the whole corpus.

    Resumes still Unparsed after retries are excluded from the set (and
    therefore from accuracy comparisons against it), with a warning.
    """
    verdicts = judge_resumes(
        records, [], ref_cfg, templates, attribute_type="overall_only", audit_path=audit_path
    )
    labels: dict[str, str] = {}
    dim_scores: dict[str, tuple[int, int, int]] = {}
    excluded: list[str] = []
    for v in verdicts:
        if v.overall == "Unparsed":
            excluded.append(v.resume_id)
            log.warning("gt %s: resume %s unparsed, excluded", ref_cfg.model_id, v.resume_id)
            continue
        labels[v.resume_id] = v.overall
        dim_scores[v.resume_id] = (v.content, v.structure, v.language)
    return GroundTruthSet(
        model_id=ref_cfg.model_id,
        labels=labels,
        dim_scores=dim_scores,
        excluded=excluded,
        template_version=template_version or templates.version,
        corpus_digest=corpus_digest,
    )


def accuracy(preds: list[JudgeVerdict], gt: GroundTruthSet) -> float:
    """Mean exact label agreement; Unparsed predictions never match."""
    if not preds:
        raise ValidationError("accuracy over an empty prediction set")
    missing = [v.resume_id for v in preds if v.resume_id not in gt.labels]
    if missing:
        raise ValidationError(f"predictions not covered by gt: {missing[:5]}")
    matches = sum(
        1 for v in preds if v.overall != "Unparsed" and v.overall == gt.labels[v.resume_id]
    )
    return matches / len(preds)


def disagreement_rate(gts: list[GroundTruthSet]) -> float:
    """Fraction of shared resumes where the sets do not all agree."""
    if len(gts) < 2:
        raise ValidationError("disagreement needs at least 2 ground-truth sets")
    shared = set(gts[0].labels)
    for gt in gts[1:]:
        shared &= set(gt.labels)
    if not shared:
        raise ValidationError("ground-truth sets share no resumes")
    disagreements = sum(1 for rid in shared if len({gt.labels[rid] for gt in gts}) > 1)
    return disagreements / len(shared)


def timing_report(verdicts: list[JudgeVerdict]) -> dict:
    """Sample mean and sample (n-1) standard deviation of latencies."""
    lat = [v.latency_s for v in verdicts]
    if len(lat) < 2:
        raise ValidationError("timing report needs at least 2 latencies")
    arr = np.asarray(lat, dtype=np.float64)
    return {"mean_s": float(arr.mean()), "std_s": float(arr.std(ddof=1))}


def score_stats(source) -> dict:
    """Per-dimension mean, histogram over 0..10, and count.

    Accepts a list of JudgeVerdicts (Unparsed skipped) or a GroundTruthSet.
    """
    if isinstance(source, GroundTruthSet):
        triplets = list(source.dim_scores.values())
    else:
        triplets = [
            (v.content, v.structure, v.language) for v in source if v.overall != "Unparsed"
        ]
    if not triplets:
        raise ValidationError("no scored verdicts to summarize")
    out = {}
    for i, dim in enumerate(DIMENSIONS):
        values = [t[i] for t in triplets]
        hist = [0] * 11
        for v in values:
            hist[v] += 1
        out[dim] = {
            "mean": float(np.mean(values)),
            "histogram": hist,
            "count": len(values),
        }
    return out


@dataclass
class EvalReport:
    gt_model_id: str
    judge_model_id: str
    spec: SampleSpec | None  # None = zero-shot
    accuracy: float
    n: int
    unparsed_count: int
    per_dimension_means: tuple[float, float, float] | None
    timing_mean_s: float
    timing_std_s: float
    exemplar_ids: tuple[str, ...] = ()
    gt_excluded_count: int = 0

    def __post_init__(self):
        if self.n <= 0:
            raise ValidationError("report over zero resumes")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValidationError(f"accuracy out of range: {self.accuracy}")
        matches = self.accuracy * self.n
        if abs(matches - round(matches)) > 1e-9:
            raise ValidationError("accuracy * n is not an integer match count")

    def to_dict(self) -> dict:
        return {
            "gt_model_id": self.gt_model_id,
            "judge_model_id": self.judge_model_id,
            "spec": self.spec.to_dict() if self.spec else None,
            "accuracy": self.accuracy,
            "n": self.n,
            "unparsed_count": self.unparsed_count,
            "per_dimension_means": (
                list(self.per_dimension_means) if self.per_dimension_means else None
            ),
            "timing_mean_s": self.timing_mean_s,
            "timing_std_s": self.timing_std_s,
            "exemplar_ids": list(self.exemplar_ids),
            "gt_excluded_count": self.gt_excluded_count,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "EvalReport":
        spec = SampleSpec(**obj["spec"]) if obj["spec"] else None
        return cls(
            gt_model_id=obj["gt_model_id"],
            judge_model_id=obj["judge_model_id"],
            spec=spec,
            accuracy=obj["accuracy"],
            n=obj["n"],
            unparsed_count=obj["unparsed_count"],
            per_dimension_means=(
                tuple(obj["per_dimension_means"]) if obj["per_dimension_means"] else None
            ),
            timing_mean_s=obj["timing_mean_s"],
            timing_std_s=obj["timing_std_s"],
            exemplar_ids=tuple(obj.get("exemplar_ids", ())),
            gt_excluded_count=obj.get("gt_excluded_count", 0),
        )


@dataclass
class SweepGrid:
    strategies: tuple[str, ...] = STRATEGIES
    shots: tuple[int, ...] = (3, 5, 10, 15, 20)
    sample_types: tuple[str, ...] = SAMPLE_TYPES
    attribute_types: tuple[str, ...] = ATTRIBUTE_TYPES
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        for name in ("strategies", "shots", "sample_types", "attribute_types", "seeds"):
            if not getattr(self, name):
                raise ValidationError(f"sweep grid axis {name} is empty")

    def points(self):
        """Grid points in listed order (the tie-break scan order)."""
        return product(
            self.strategies, self.shots, self.sample_types, self.attribute_types, self.seeds
        )


def _report_from_verdicts(
    verdicts: list[JudgeVerdict],
    gt: GroundTruthSet,
    judge_model_id: str,
    spec: SampleSpec | None,
    exemplar_ids: tuple[str, ...],
    corpus_size: int,
) -> EvalReport:
    acc = accuracy(verdicts, gt)
    unparsed = sum(1 for v in verdicts if v.overall == "Unparsed")
    parsed = [v for v in verdicts if v.overall != "Unparsed"]
    dim_means = None
    if parsed:
        dim_means = tuple(
            float(np.mean([getattr(v, d) for v in parsed])) for d in DIMENSIONS
        )
    if len(verdicts) >= 2:
        timing = timing_report(verdicts)
    else:
        timing = {"mean_s": verdicts[0].latency_s, "std_s": 0.0}
    return EvalReport(
        gt_model_id=gt.model_id,
        judge_model_id=judge_model_id,
        spec=spec,
        accuracy=acc,
        n=len(verdicts),
        unparsed_count=unparsed,
        per_dimension_means=dim_means,
        timing_mean_s=timing["mean_s"],
        timing_std_s=timing["std_s"],
        exemplar_ids=exemplar_ids,
        gt_excluded_count=corpus_size - len(verdicts) - len(exemplar_ids),
    )


def best_report(reports: list[EvalReport]) -> EvalReport:
    """Argmax accuracy; ties prefer fewer shots, then strategy order."""
    if not reports:
        raise ValidationError("no reports to choose from")

    def key(r: EvalReport):
        return (
            -r.accuracy,
            r.spec.n_shots if r.spec else 0,
            STRATEGIES.index(r.spec.strategy) if r.spec else -1,
        )

    return min(reports, key=key)  # min() keeps first on full ties: scan order


def run_sweep(
    grid: SweepGrid,
    records: list[ResumeRecord],
    ce: CorpusEmbedding,
    gts: list[GroundTruthSet],
    judge_cfg: JudgeConfig,
    templates: TemplateSet,
    *,
    high_pool: str = "gt_high",
    audit_dir=None,
) -> tuple[list[EvalReport], dict]:
    """Judge every grid point against every ground-truth set.

    Exemplars are excluded from their own run's targets. Infeasible points
    (pool too small) are skipped and recorded. Returns (reports, summary)
    where summary holds the best configuration per gt plus the skip list.
    """
    if not records or not gts:
        raise ValidationError("run_sweep needs records and at least one gt")
    records_by_id = {r.id: r for r in records}
    reports: list[EvalReport] = []
    skipped: list[dict] = []
    best: dict[str, dict] = {}

    for gt in gts:
        covered_ids = [rid for rid in ce.ids if rid in gt.labels]
        ce_gt = ce.subset(covered_ids)
        gt_reports: list[EvalReport] = []
        for strategy, shots, stype, atype, seed in grid.points():
            spec = SampleSpec(
                strategy=strategy,
                n_shots=shots,
                sample_type=stype,
                attribute_type=atype,
                seed=seed,
            )
            try:
                examples = compose_sample_set(
                    spec, ce_gt, gt, records_by_id, high_pool=high_pool
                )
            except InfeasibleSpecError as e:
                log.info("skipping %s/%s: %s", gt.model_id, spec, e)
                skipped.append(
                    {"gt_model_id": gt.model_id, "spec": spec.to_dict(), "reason": str(e)}
                )
                continue
            exemplar_ids = tuple(ex.resume_id for ex in examples)
            targets = [
                records_by_id[rid] for rid in covered_ids if rid not in set(exemplar_ids)
            ]
            audit_path = None
            if audit_dir is not None:
                tag = f"{gt.model_id}_{strategy}_{shots}_{stype}_{atype}_{seed}"
                audit_path = Path(audit_dir) / f"sweep_{tag}.jsonl"
            verdicts = judge_resumes(
                targets,
                examples,
                judge_cfg,
                templates,
                attribute_type=atype,
                audit_path=audit_path,
            )
            # corpus size = all embedded resumes; the difference left after
            # targets and exemplars is exactly the gt-excluded (unparsed) set
            gt_reports.append(
                _report_from_verdicts(
                    verdicts, gt, judge_cfg.model_id, spec, exemplar_ids, len(ce)
                )
            )
        if gt_reports:
            best[gt.model_id] = best_report(gt_reports).to_dict()
        reports.extend(gt_reports)

    summary = {"best_per_gt": best, "skipped": skipped}
    return reports, summary
