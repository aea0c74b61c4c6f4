"""Figure rendering: score-distribution strips and sample-projection panels.

Figures are drawn on explicit Figure objects (no pyplot, no global backend
state) and written as PNG with pinned metadata, so the same inputs and seeds
reproduce the same bytes. Every figure gets a JSON sidecar recording the
parameters needed to regenerate it.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .artifacts import DIMENSIONS, AnalysisValidationError
from .projection import ProjectionConfig, make_projector

FIGURE_KINDS = ("score_distribution", "sample_projection")
MEAN_AGREEMENT_TOL = 1e-9
_PNG_METADATA = {"Software": "resumejudge-analysis"}

HIGHLIGHT_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise AnalysisValidationError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise AnalysisValidationError("figure spec has no inputs")

    def validate_inputs(self) -> None:
        missing = [p for p in self.inputs if not Path(p).is_file()]
        if missing:
            raise AnalysisValidationError(f"figure inputs not found: {', '.join(missing)}")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _save(fig: Figure, out_path: Path) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="png", dpi=110, metadata=dict(_PNG_METADATA))


def _write_sidecar(out_path: Path, payload: dict) -> None:
    sidecar = out_path.with_name(out_path.name + ".json")
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def plot_score_distribution(
    dumps: list[dict],
    dimension: str,
    out_path,
    *,
    jitter_seed: int = 0,
    expected_means: dict | None = None,
) -> dict:
    """One jittered strip per judge with a horizontal mean line.

    dumps are load_score_dump results. When expected_means maps model_id to
    the primary-exported mean for this dimension, the recomputed means must
    agree within 1e-9 or rendering fails: the primary's stats stay the single
    source of truth.
    """
    if dimension not in DIMENSIONS:
        raise AnalysisValidationError(f"unknown dimension {dimension!r}")
    if len(dumps) < 2:
        raise AnalysisValidationError("score distribution needs dumps from at least 2 judges")
    dim_index = DIMENSIONS.index(dimension)
    out_path = Path(out_path)

    rng = np.random.default_rng(jitter_seed)
    fig = Figure(figsize=(1.8 * len(dumps) + 1.6, 4.2))
    ax = fig.subplots()

    means = {}
    counts = {}
    for col, dump in enumerate(dumps):
        model_id = dump["model_id"]
        values = np.array(
            [dump["dim_scores"][rid][dim_index] for rid in sorted(dump["dim_scores"])],
            dtype=np.float64,
        )
        mean = float(values.mean())
        if expected_means is not None and model_id in expected_means:
            if abs(mean - float(expected_means[model_id])) > MEAN_AGREEMENT_TOL:
                raise AnalysisValidationError(
                    f"{model_id}: recomputed {dimension} mean {mean!r} disagrees with "
                    f"exported stats {expected_means[model_id]!r}"
                )
        means[model_id] = mean
        counts[model_id] = int(values.size)
        x = col + rng.uniform(-0.18, 0.18, size=values.size)
        ax.scatter(x, values, s=14, alpha=0.6, color="#4c72b0", edgecolors="none")
        ax.hlines(mean, col - 0.3, col + 0.3, color="#c44e52", linewidth=2.0, zorder=3)

    ax.set_xticks(range(len(dumps)))
    ax.set_xticklabels([d["model_id"] for d in dumps], rotation=20, ha="right")
    ax.set_ylim(-0.5, 10.5)
    ax.set_yticks(range(0, 11, 2))
    ax.set_ylabel("score")
    ax.set_title(f"Score distribution: {dimension}")
    ax.grid(axis="y", alpha=0.25)
    fig.tight_layout()
    _save(fig, out_path)

    result = {
        "kind": "score_distribution",
        "output": str(out_path),
        "dimension": dimension,
        "jitter_seed": jitter_seed,
        "means": means,
        "counts": counts,
    }
    _write_sidecar(out_path, result)
    return result


def plot_sample_projection(
    ids: list[str],
    vectors: np.ndarray,
    selections: list[dict],
    out_path,
    *,
    cfg: ProjectionConfig = ProjectionConfig(),
    embedder_id: str = "",
) -> dict:
    """Project every resume to 2D, one panel per strategy with its picks highlighted.

    ids/vectors come from load_embedding_export, selections from
    load_selection. All selections must share one shot count N, and every
    selected id must exist in the corpus.
    """
    if not selections:
        raise AnalysisValidationError("no selections to plot")
    n_set = {sel["n"] for sel in selections}
    if len(n_set) != 1:
        raise AnalysisValidationError(f"selections mix shot counts: {sorted(n_set)}")
    n_shots = n_set.pop()
    index = {rid: i for i, rid in enumerate(ids)}
    for sel in selections:
        unknown = [rid for rid in sel["selected_ids"] if rid not in index]
        if unknown:
            raise AnalysisValidationError(
                f"selection {sel['strategy']!r}: selected_ids not in corpus: {', '.join(unknown)}"
            )

    out_path = Path(out_path)
    projector = make_projector(len(ids), cfg)
    coords = projector.fit_transform(vectors)

    fig = Figure(figsize=(4.0 * len(selections), 4.4))
    axes = fig.subplots(1, len(selections), squeeze=False)[0]
    highlight_counts = {}
    for panel, (ax, sel) in enumerate(zip(axes, selections)):
        ax.scatter(coords[:, 0], coords[:, 1], s=10, color="#b0b0b0", alpha=0.55, edgecolors="none")
        rows = [index[rid] for rid in sel["selected_ids"]]
        color = HIGHLIGHT_COLORS[panel % len(HIGHLIGHT_COLORS)]
        ax.scatter(
            coords[rows, 0],
            coords[rows, 1],
            s=46,
            color=color,
            edgecolors="black",
            linewidths=0.7,
            zorder=3,
        )
        highlight_counts[sel["strategy"]] = len(rows)
        ax.set_title(f"{sel['strategy']} (N={sel['n']})")
        ax.set_xticks([])
        ax.set_yticks([])

    title = "Exemplar selection in embedding space"
    if embedder_id:
        title += f" ({embedder_id})"
    fig.suptitle(title)
    stamp = f"projection: {projector.name} {json.dumps(projector.params, sort_keys=True)}"
    fig.text(0.01, 0.005, stamp, fontsize=7, color="#606060")
    fig.tight_layout(rect=(0, 0.03, 1, 0.96))
    _save(fig, out_path)

    result = {
        "kind": "sample_projection",
        "output": str(out_path),
        "n": n_shots,
        "projector": {"name": projector.name, "params": projector.params},
        "highlight_counts": highlight_counts,
        "coords": {rid: [float(coords[i, 0]), float(coords[i, 1])] for rid, i in index.items()},
    }
    _write_sidecar(out_path, {k: v for k, v in result.items() if k != "coords"})
    return result


def write_figure_manifest(entries: list[dict], path) -> None:
    """Record every rendered figure with its content hash for regeneration checks."""
    rows = []
    for entry in entries:
        rows.append(
            {
                "kind": entry["kind"],
                "output": entry["output"],
                "sha256": _sha256(entry["output"]),
                "params": {
                    k: v
                    for k, v in entry.items()
                    if k in ("dimension", "jitter_seed", "n", "projector")
                },
            }
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"figures": rows}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
