"""Figure tooling for resumejudge run exports.

Reads the primary pipeline's exported artifacts (score dumps, score stats,
embedding export, selection lists) and renders static figures plus a figure
manifest. Strictly read-only with respect to the run directory.
"""
from .artifacts import (
    DIMENSIONS,
    AnalysisValidationError,
    load_embedding_export,
    load_score_dump,
    load_score_stats,
    load_selection,
)
from .figures import (
    FigureSpec,
    plot_sample_projection,
    plot_score_distribution,
    write_figure_manifest,
)
from .projection import ProjectionConfig, make_projector

__all__ = [
    "DIMENSIONS",
    "AnalysisValidationError",
    "FigureSpec",
    "ProjectionConfig",
    "load_embedding_export",
    "load_score_dump",
    "load_score_stats",
    "load_selection",
    "make_projector",
    "plot_sample_projection",
    "plot_score_distribution",
    "write_figure_manifest",
]
