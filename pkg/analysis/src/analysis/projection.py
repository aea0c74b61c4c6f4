"""2D projection behind a small interface: UMAP when importable, t-SNE otherwise.

The chosen method and every parameter that affects coordinates live in
ProjectionConfig so a figure can be regenerated bit-for-bit later. t-SNE runs
with method="exact" and PCA init, which is deterministic for a fixed seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .artifacts import AnalysisValidationError


@dataclass(frozen=True)
class ProjectionConfig:
    seed: int = 0
    method: str = "auto"  # auto | umap | tsne
    n_neighbors: int = 15  # umap only
    min_dist: float = 0.1  # umap only
    perplexity: float | None = None  # tsne only; None = derived from sample count

    def __post_init__(self):
        if self.method not in ("auto", "umap", "tsne"):
            raise AnalysisValidationError(f"unknown projection method {self.method!r}")


@dataclass
class Projector:
    name: str
    params: dict
    _fit: object = field(repr=False)

    def fit_transform(self, x: np.ndarray) -> np.ndarray:
        coords = np.asarray(self._fit(x), dtype=np.float64)
        if coords.shape != (x.shape[0], 2):
            raise AnalysisValidationError(f"projector returned shape {coords.shape}, expected (n, 2)")
        return coords


def _umap_available() -> bool:
    try:
        import umap  # noqa: F401
    except ImportError:
        return False
    return True


def make_projector(n_samples: int, cfg: ProjectionConfig) -> Projector:
    if n_samples < 3:
        raise AnalysisValidationError("projection needs at least 3 points")
    method = cfg.method
    if method == "auto":
        method = "umap" if _umap_available() else "tsne"

    if method == "umap":
        if not _umap_available():
            raise AnalysisValidationError("projection method 'umap' requested but umap is not importable")
        import umap

        params = {
            "n_neighbors": min(cfg.n_neighbors, n_samples - 1),
            "min_dist": cfg.min_dist,
            "random_state": cfg.seed,
        }
        reducer = umap.UMAP(n_components=2, **params)
        return Projector("umap", params, reducer.fit_transform)

    from sklearn.manifold import TSNE

    perplexity = cfg.perplexity
    if perplexity is None:
        perplexity = float(min(30, max(2, (n_samples - 1) // 3)))
    if perplexity >= n_samples:
        raise AnalysisValidationError(f"perplexity {perplexity} needs more than {n_samples} points")
    params = {"perplexity": perplexity, "random_state": cfg.seed}
    reducer = TSNE(n_components=2, method="exact", init="pca", **params)
    return Projector("tsne-exact", params, reducer.fit_transform)
