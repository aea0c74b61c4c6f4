"""Few-shot exemplar selection: diversity, similarity, and clustering strategies.

All selectors are deterministic given (corpus, N, seed). The clustering
strategy runs an in-package k-means (D^2-weighted seeding, Lloyd iterations,
farthest-point repair for empty clusters) on the numeric kernels so the
numba/numpy path switch covers the hot loops.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .corpus import ResumeRecord
from .embedding import CorpusEmbedding, centroid_ranking
from .errors import InfeasibleSpecError, ValidationError

STRATEGIES = ("diversity", "similarity", "clustering")
SAMPLE_TYPES = ("high_only", "high_and_low")
ATTRIBUTE_TYPES = ("overall_only", "overall_and_dimensions")

KMEANS_TOL = 1e-6
KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class SampleSpec:
    strategy: str
    n_shots: int
    sample_type: str
    attribute_type: str
    low_fraction: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}")
        if self.sample_type not in SAMPLE_TYPES:
            raise ValidationError(f"unknown sample_type {self.sample_type!r}")
        if self.attribute_type not in ATTRIBUTE_TYPES:
            raise ValidationError(f"unknown attribute_type {self.attribute_type!r}")
        if self.n_shots < 1:
            raise ValidationError("n_shots must be >= 1")
        if self.sample_type == "high_and_low" and not (0.0 < self.low_fraction < 1.0):
            raise ValidationError("low_fraction must be in (0, 1) for high_and_low")

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "n_shots": self.n_shots,
            "sample_type": self.sample_type,
            "attribute_type": self.attribute_type,
            "low_fraction": self.low_fraction,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class FewShotExample:
    resume_id: str
    record: ResumeRecord
    overall: str  # High | Low
    dim_scores: tuple[int, int, int] | None = None

    def __post_init__(self):
        if self.overall not in ("High", "Low"):
            raise ValidationError(f"exemplar overall must be High or Low, got {self.overall!r}")
        if self.dim_scores is not None:
            if len(self.dim_scores) != 3 or any(not 0 <= s <= 10 for s in self.dim_scores):
                raise ValidationError(f"dim_scores out of range: {self.dim_scores}")


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def derive_seed(master: int, stage: str) -> int:
    """Stable sub-seed so independent random draws share one master seed."""
    digest = hashlib.blake2b(f"{master}\x1f{stage}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1  # keep it non-negative


def _check_n(ce: CorpusEmbedding, n: int) -> None:
    if n < 1:
        raise ValidationError("N must be >= 1")
    if n > len(ce):
        raise ValidationError(f"N={n} exceeds corpus size {len(ce)}")


def select_diversity(ce: CorpusEmbedding, n: int) -> list[str]:
    """Interval picks over the descending centroid-similarity ranking.

    Ranks 1, 1+v, 1+2v, ... with v = ceil(|D|/N). When that would index past
    the corpus, falls back to evenly spaced ranks round(1 + i*(|D|-1)/(N-1)).
    """
    _check_n(ce, n)
    ranked = [rid for rid, _ in centroid_ranking(ce)]
    size = len(ranked)
    interval = math.ceil(size / n)
    ranks = [1 + i * interval for i in range(n)]
    if ranks[-1] > size:
        if n == 1:
            ranks = [1]
        else:
            step = (size - 1) / (n - 1)
            ranks = [round_half_up(1 + i * step) for i in range(n)]
    return [ranked[r - 1] for r in ranks]


def select_similarity(ce: CorpusEmbedding, n: int) -> list[str]:
    """Top-N ids by centroid similarity, descending, ties by id order."""
    _check_n(ce, n)
    return [rid for rid, _ in centroid_ranking(ce)[:n]]


def _seed_centers(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding: each next center drawn proportionally to the
    squared distance from the nearest already-chosen center."""
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centers[0] = x[first]
    d2 = kernels.min_sqdist(x, centers[0], np.full(n, np.inf))
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining points coincide with chosen centers; any unchosen
            # index keeps the cluster count honest
            candidates = np.flatnonzero(d2 <= 0.0)
            idx = int(rng.choice(candidates))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = x[idx]
        d2 = kernels.min_sqdist(x, centers[j], d2)
    return centers


def kmeans(
    x: np.ndarray,
    k: int,
    seed: int,
    tol: float = KMEANS_TOL,
    max_iter: int = KMEANS_MAX_ITER,
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations until max centroid movement < tol or max_iter.

    Empty clusters are re-seeded from the point currently farthest from its
    assigned centroid. Returns (centers, labels).
    """
    rng = np.random.default_rng(seed)
    centers = _seed_centers(x, k, rng)
    labels, d2 = kernels.assign_labels(x, centers)
    for _ in range(max_iter):
        sums, counts = kernels.sum_by_label(x, labels, k)
        new_centers = np.empty_like(centers)
        repaired = False
        d2_work = d2.copy()
        for j in range(k):
            if counts[j] > 0:
                new_centers[j] = sums[j] / counts[j]
            else:
                far = int(np.argmax(d2_work))
                new_centers[j] = x[far]
                d2_work[far] = 0.0  # a second empty cluster takes the next-farthest
                repaired = True
        movement = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        labels, d2 = kernels.assign_labels(x, centers)
        if not repaired and movement < tol:
            break
    return centers, labels


def clustering_detail(
    ce: CorpusEmbedding, n: int, seed: int
) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Clustering selection plus the assignment it came from.

    Returns (selected ids ordered by cluster index, labels, centers); the
    selected member of each cluster minimizes Euclidean distance to its
    centroid, ties broken by id order.
    """
    _check_n(ce, n)
    ids = ce.ids
    x = ce.matrix().astype(np.float64)
    centers, labels = kmeans(x, n, seed)
    dist = np.sqrt(((x - centers[labels]) ** 2).sum(axis=1))
    selected: list[str] = []
    for j in range(n):
        members = np.flatnonzero(labels == j)
        if members.size == 0:  # pragma: no cover - repair guarantees non-empty
            raise ValidationError(f"cluster {j} ended empty")
        best = min(members, key=lambda i: (dist[i], ids[i]))
        selected.append(ids[best])
    return selected, labels, centers


def select_clustering(ce: CorpusEmbedding, n: int, seed: int) -> list[str]:
    """One exemplar per k-means cluster: the member nearest its centroid."""
    selected, _, _ = clustering_detail(ce, n, seed)
    return selected


def _run_strategy(spec: SampleSpec, pool_ce: CorpusEmbedding, n: int) -> list[str]:
    if spec.strategy == "diversity":
        return select_diversity(pool_ce, n)
    if spec.strategy == "similarity":
        return select_similarity(pool_ce, n)
    return select_clustering(pool_ce, n, derive_seed(spec.seed, "kmeans"))


def compose_sample_set(
    spec: SampleSpec,
    ce: CorpusEmbedding,
    gt,
    records_by_id: dict[str, ResumeRecord],
    *,
    high_pool: str = "gt_high",
) -> list[FewShotExample]:
    """Build the exemplar list for a spec.

    high_only: the strategy runs over the high-quality pool and returns
    n_shots High exemplars. high_and_low: n_low = max(1,
    round_half_up(low_fraction * n_shots)) resumes drawn uniformly (seeded)
    from the gt-Low pool, the rest selected from the high pool; highs first.
    Attributes (overall, dimension scores) are copied from gt.
    """
    if high_pool not in ("gt_high", "full_corpus"):
        raise ValidationError(f"unknown high_pool {high_pool!r}")
    missing = [rid for rid in ce.ids if rid not in gt.labels]
    if missing:
        raise ValidationError(
            f"ground truth does not cover {len(missing)} corpus ids (e.g. {missing[0]!r})"
        )

    if high_pool == "gt_high":
        high_ids = [rid for rid in ce.ids if gt.labels[rid] == "High"]
    else:
        high_ids = list(ce.ids)
    low_ids = [rid for rid in ce.ids if gt.labels[rid] == "Low"]

    n = spec.n_shots
    if spec.sample_type == "high_only":
        n_high, n_low = n, 0
    else:
        n_low = max(1, round_half_up(spec.low_fraction * n))
        n_high = n - n_low

    if n_high > len(high_ids):
        raise InfeasibleSpecError(
            f"high pool has {len(high_ids)} members, spec needs {n_high}",
            pool="high", needed=n_high, available=len(high_ids),
        )

    chosen_high: list[str] = []
    if n_high > 0:
        chosen_high = _run_strategy(spec, ce.subset(high_ids), n_high)
    # under full_corpus the strategy may have picked Low-labeled ids; they
    # must not be drawn again as lows
    low_candidates = [rid for rid in low_ids if rid not in chosen_high]
    if n_low > len(low_candidates):
        raise InfeasibleSpecError(
            f"low pool has {len(low_candidates)} members, spec needs {n_low}",
            pool="low", needed=n_low, available=len(low_candidates),
        )
    chosen_low: list[str] = []
    if n_low > 0:
        rng = np.random.default_rng(derive_seed(spec.seed, "low_draw"))
        picks = rng.choice(len(low_candidates), size=n_low, replace=False)
        chosen_low = [low_candidates[i] for i in picks]

    examples = []
    for rid in chosen_high + chosen_low:
        scores = (
            tuple(int(s) for s in gt.dim_scores[rid])
            if spec.attribute_type == "overall_and_dimensions"
            else None
        )
        examples.append(
            FewShotExample(
                resume_id=rid,
                record=records_by_id[rid],
                overall=gt.labels[rid],
                dim_scores=scores,
            )
        )
    return examples
