"""Render every figure for one run directory.

Usage:
    python3 -m analysis --run-dir runs/<run_id> --out figures/

Reads report/score_dumps, report/score_stats, report/selections, and
embedding_export.npz; writes PNGs, JSON sidecars, and manifest.json into
--out. The run directory itself is never written to.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from .artifacts import (
    DIMENSIONS,
    AnalysisValidationError,
    load_embedding_export,
    load_score_dump,
    load_score_stats,
    load_selection,
)
from .figures import FigureSpec, plot_sample_projection, plot_score_distribution, write_figure_manifest
from .projection import ProjectionConfig


def render_run(run_dir, out_dir, *, jitter_seed: int = 0, projection: ProjectionConfig | None = None) -> dict:
    run_dir = Path(run_dir)
    out_dir = Path(out_dir)
    projection = projection or ProjectionConfig()
    entries = []

    dump_paths = sorted((run_dir / "report" / "score_dumps").glob("*.json"))
    if len(dump_paths) >= 2:
        dumps = [load_score_dump(p) for p in dump_paths]
        stats_by_model = {}
        for p in sorted((run_dir / "report" / "score_stats").glob("*.json")):
            loaded = load_score_stats(p)
            stats_by_model[loaded["model_id"]] = loaded["stats"]
        for dim in DIMENSIONS:
            spec = FigureSpec(
                kind="score_distribution",
                inputs=tuple(str(p) for p in dump_paths),
                output=str(out_dir / f"scores_{dim}.png"),
            )
            spec.validate_inputs()
            expected = {
                model: stats[dim]["mean"] for model, stats in stats_by_model.items() if dim in stats
            }
            entries.append(
                plot_score_distribution(
                    dumps, dim, spec.output, jitter_seed=jitter_seed, expected_means=expected
                )
            )

    export_path = run_dir / "embedding_export.npz"
    sel_paths = sorted((run_dir / "report" / "selections").glob("*.json"))
    if export_path.is_file() and sel_paths:
        spec = FigureSpec(
            kind="sample_projection",
            inputs=(str(export_path), *(str(p) for p in sel_paths)),
            output=str(out_dir / "selection_projection.png"),
        )
        spec.validate_inputs()
        ids, vectors, embedder_id = load_embedding_export(export_path)
        selections = [load_selection(p) for p in sel_paths]
        entries.append(
            plot_sample_projection(
                ids, vectors, selections, spec.output, cfg=projection, embedder_id=embedder_id
            )
        )

    if not entries:
        raise AnalysisValidationError(f"no renderable artifacts under {run_dir}")
    write_figure_manifest(entries, out_dir / "manifest.json")
    return {"figures": len(entries), "out_dir": str(out_dir)}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="analysis", description=__doc__.splitlines()[0])
    ap.add_argument("--run-dir", required=True, help="one run directory from the primary pipeline")
    ap.add_argument("--out", required=True, help="directory for figures and manifest")
    ap.add_argument("--jitter-seed", type=int, default=0)
    ap.add_argument("--projection-seed", type=int, default=0)
    ap.add_argument("--projection-method", choices=("auto", "umap", "tsne"), default="auto")
    args = ap.parse_args(argv)

    cfg = ProjectionConfig(seed=args.projection_seed, method=args.projection_method)
    try:
        result = render_run(args.run_dir, args.out, jitter_seed=args.jitter_seed, projection=cfg)
    except AnalysisValidationError as exc:
        print(f"error: {exc}")
        return 1
    print(f"rendered {result['figures']} figures into {result['out_dir']}")
    return 0
