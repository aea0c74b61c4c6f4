"""Read-only loaders for the primary pipeline's exported artifacts.

Each loader validates the file's schema up front and raises
AnalysisValidationError naming the offending field, so figures never render
from half-valid inputs. Nothing in this module ever writes.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

DIMENSIONS = ("content", "structure", "language")


class AnalysisValidationError(ValueError):
    pass


def _read_json(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise AnalysisValidationError(f"artifact not found: {path}")
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise AnalysisValidationError(f"{path.name}: expected a JSON object")
    return data


def _require(data: dict, field: str, path) -> object:
    if field not in data:
        raise AnalysisValidationError(f"{Path(path).name}: missing field {field!r}")
    return data[field]


def load_score_dump(path) -> dict:
    """Per-resume dimension scores for one judge.

    Returns {"model_id": str, "labels": {id: label}, "dim_scores": {id: (c, s, l)}}.
    """
    data = _read_json(path)
    model_id = _require(data, "model_id", path)
    labels = _require(data, "labels", path)
    raw_scores = _require(data, "dim_scores", path)
    if not isinstance(raw_scores, dict) or not raw_scores:
        raise AnalysisValidationError(f"{Path(path).name}: field 'dim_scores' must be a non-empty object")

    dim_scores = {}
    for rid, triple in raw_scores.items():
        if not isinstance(triple, list) or len(triple) != len(DIMENSIONS):
            raise AnalysisValidationError(
                f"{Path(path).name}: field 'dim_scores' entry {rid!r} must hold {len(DIMENSIONS)} scores"
            )
        for value in triple:
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 10:
                raise AnalysisValidationError(
                    f"{Path(path).name}: field 'dim_scores' entry {rid!r} has non 0-10 integer score {value!r}"
                )
        dim_scores[rid] = tuple(triple)
    return {"model_id": str(model_id), "labels": dict(labels), "dim_scores": dim_scores}


def load_score_stats(path) -> dict:
    """Primary-computed per-dimension stats: {"model_id": str, "stats": {dim: {...}}}."""
    data = _read_json(path)
    model_id = _require(data, "model_id", path)
    stats = _require(data, "stats", path)
    for dim in DIMENSIONS:
        if dim not in stats:
            raise AnalysisValidationError(f"{Path(path).name}: field 'stats' missing dimension {dim!r}")
        for key in ("mean", "histogram", "count"):
            if key not in stats[dim]:
                raise AnalysisValidationError(f"{Path(path).name}: field 'stats.{dim}' missing {key!r}")
    return {"model_id": str(model_id), "stats": stats}


def load_embedding_export(path) -> tuple[list[str], np.ndarray, str]:
    """npz export: returns (ids, vectors matrix, embedder model id)."""
    path = Path(path)
    if not path.is_file():
        raise AnalysisValidationError(f"artifact not found: {path}")
    data = np.load(path, allow_pickle=True)
    for field in ("ids", "vectors", "model_id"):
        if field not in data:
            raise AnalysisValidationError(f"{path.name}: missing field {field!r}")
    ids = [str(i) for i in data["ids"]]
    vectors = np.asarray(data["vectors"], dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] != len(ids):
        raise AnalysisValidationError(f"{path.name}: field 'vectors' must be one row per id")
    if len(set(ids)) != len(ids):
        raise AnalysisValidationError(f"{path.name}: field 'ids' holds duplicates")
    return ids, vectors, str(data["model_id"])


def load_selection(path) -> dict:
    """One strategy's exemplar pick: {"strategy", "n", "selected_ids"}."""
    data = _read_json(path)
    strategy = _require(data, "strategy", path)
    n = _require(data, "n", path)
    selected = _require(data, "selected_ids", path)
    if not isinstance(selected, list) or not all(isinstance(s, str) for s in selected):
        raise AnalysisValidationError(f"{Path(path).name}: field 'selected_ids' must be a list of ids")
    if not isinstance(n, int) or len(selected) != n:
        raise AnalysisValidationError(
            f"{Path(path).name}: field 'selected_ids' holds {len(selected)} ids, expected n={n}"
        )
    if len(set(selected)) != len(selected):
        raise AnalysisValidationError(f"{Path(path).name}: field 'selected_ids' holds duplicates")
    return {"strategy": str(strategy), "n": n, "selected_ids": list(selected)}
