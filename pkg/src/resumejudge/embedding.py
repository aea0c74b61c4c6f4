"""Vector representations of resumes and the centroid-similarity score.

Speaks the OpenAI-compatible embeddings wire protocol:
request {"model": ..., "input": [text]}, response {"data": [{"embedding": [...]}]}.
A deterministic hash-based mock backend keeps tests offline.
"""
from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from .corpus import ResumeRecord
from .errors import EmbeddingError, ValidationError

log = logging.getLogger(__name__)

# Version of serialize_record's delimiter scheme. Bump on any format change:
# cached vectors are keyed by it and become stale otherwise.
SERIALIZATION_VERSION = "1"


def serialize_record(record: ResumeRecord) -> str:
    """Deterministic text form submitted to the embedder."""
    parts = [f"Position: {record.applied_position}"]
    for item in record.items:
        parts.append(f"Q: {item.question}\nA: {item.answer}")
    return "\n\n".join(parts)


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    dim: int
    model_id: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.shape[0] != self.dim:
            raise ValidationError(f"expected {self.dim} components, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("vector has non-finite components")
        object.__setattr__(self, "values", v)


@dataclass
class CorpusEmbedding:
    entries: dict[str, EmbeddingVector]  # insertion order == corpus order
    model_id: str
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        dims = {v.dim for v in self.entries.values()}
        if len(dims) > 1:
            raise ValidationError(f"mixed dims in corpus embedding: {sorted(dims)}")
        for v in self.entries.values():
            if v.model_id != self.model_id:
                raise ValidationError("entry model_id differs from corpus model_id")

    @property
    def ids(self) -> list[str]:
        return list(self.entries.keys())

    def __len__(self) -> int:
        return len(self.entries)

    def matrix(self) -> np.ndarray:
        """(n, dim) float64 matrix in corpus order."""
        if self._matrix is None:
            self._matrix = np.stack([v.values for v in self.entries.values()])
        return self._matrix

    def subset(self, ids: list[str]) -> "CorpusEmbedding":
        missing = [i for i in ids if i not in self.entries]
        if missing:
            raise KeyError(f"unknown ids: {missing[:5]}")
        return CorpusEmbedding(
            entries={i: self.entries[i] for i in ids}, model_id=self.model_id
        )


@dataclass
class EmbedConfig:
    model_id: str
    backend: str = "mock"  # http | mock
    endpoint_url: str = ""
    dim: int = 32  # mock backend output dimension
    max_concurrency: int = 4
    max_retries: int = 3
    timeout_s: float = 30.0
    cache_dir: str | None = None

    def __post_init__(self):
        if self.backend not in ("http", "mock"):
            raise ValidationError(f"unknown embedding backend {self.backend!r}")
        if self.backend == "http" and not self.endpoint_url:
            raise ValidationError("http backend requires endpoint_url")


def mock_embedding(text: str, model_id: str, dim: int) -> np.ndarray:
    """Deterministic unit vector derived from a keyed digest of the text.

    Process-independent (no builtin hash()), so identical inputs embed
    identically across runs and machines.
    """
    digest = hashlib.blake2b(
        f"{model_id}\x1f{dim}\x1f{text}".encode("utf-8"), digest_size=16
    ).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    v = rng.standard_normal(dim)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:  # pragma: no cover - measure-zero under the rng
        v[0] = 1.0
        norm = 1.0
    return v / norm


def _http_embed(text: str, cfg: EmbedConfig) -> np.ndarray:
    payload = {"model": cfg.model_id, "input": [text]}
    last_err: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        try:
            resp = requests.post(cfg.endpoint_url, json=payload, timeout=cfg.timeout_s)
            resp.raise_for_status()
            data = resp.json()["data"][0]["embedding"]
            return np.asarray(data, dtype=np.float64)
        except (requests.RequestException, KeyError, IndexError, ValueError) as e:
            last_err = e
            if attempt < cfg.max_retries:
                time.sleep(min(2.0**attempt * 0.25, 4.0))
    raise EmbeddingError(f"embedding request failed after retries: {last_err}")


class _VectorCache:
    """Per-record .npy files under a directory keyed by (model, version)."""

    def __init__(self, root: Path, model_id: str, version: str):
        key = hashlib.blake2b(
            f"{model_id}\x1f{version}".encode("utf-8"), digest_size=6
        ).hexdigest()
        self.dir = root / key
        self.dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        manifest = self.dir / "manifest.json"
        if not manifest.exists():
            manifest.write_text(
                json.dumps(
                    {"model_id": model_id, "serialization_version": version},
                    sort_keys=True,
                ),
                encoding="utf-8",
            )

    def get(self, record_id: str) -> np.ndarray | None:
        path = self.dir / f"{record_id}.npy"
        if path.exists():
            return np.load(path)
        return None

    def put(self, record_id: str, vector: np.ndarray) -> None:
        # single-writer discipline: concurrent fetchers funnel through here
        with self._lock:
            tmp = self.dir / f"{record_id}.npy.tmp"
            with open(tmp, "wb") as fh:
                np.save(fh, vector)
            tmp.replace(self.dir / f"{record_id}.npy")


def embed_corpus(records: list[ResumeRecord], cfg: EmbedConfig) -> CorpusEmbedding:
    """Embed every record, one vector each, in corpus order.

    Results are cached on disk keyed by (record id, model id, serialization
    version); re-runs skip completed records without network calls.
    """
    if not records:
        raise ValidationError("cannot embed an empty corpus")
    cache = (
        _VectorCache(Path(cfg.cache_dir), cfg.model_id, SERIALIZATION_VERSION)
        if cfg.cache_dir
        else None
    )

    vectors: dict[str, np.ndarray] = {}
    pending: list[ResumeRecord] = []
    for record in records:
        cached = cache.get(record.id) if cache else None
        if cached is not None:
            vectors[record.id] = cached
        else:
            pending.append(record)

    failures: list[tuple[str, str]] = []

    def fetch(record: ResumeRecord):
        text = serialize_record(record)
        if cfg.backend == "mock":
            vec = mock_embedding(text, cfg.model_id, cfg.dim)
        else:
            vec = _http_embed(text, cfg)
        return record.id, vec

    if pending:
        if cfg.backend == "mock":
            results = map(fetch, pending)  # pure compute; keep it deterministic
            for rec_id, vec in results:
                vectors[rec_id] = vec
                if cache:
                    cache.put(rec_id, vec)
        else:
            with ThreadPoolExecutor(max_workers=max(1, cfg.max_concurrency)) as pool:
                futures = {pool.submit(fetch, r): r.id for r in pending}
                for fut, rec_id in futures.items():
                    try:
                        _, vec = fut.result()
                        vectors[rec_id] = vec
                        if cache:
                            cache.put(rec_id, vec)
                    except EmbeddingError as e:
                        failures.append((rec_id, str(e)))
                        log.error("embedding failed for %s: %s", rec_id, e)

    if failures:
        raise EmbeddingError(
            f"{len(failures)} records remain unembedded", [i for i, _ in failures]
        )

    dims = {v.shape[0] for v in vectors.values()}
    if len(dims) != 1:
        raise EmbeddingError(f"endpoint returned mixed dimensions: {sorted(dims)}")
    dim = dims.pop()
    entries = {
        r.id: EmbeddingVector(values=vectors[r.id], dim=dim, model_id=cfg.model_id)
        for r in records
    }
    return CorpusEmbedding(entries=entries, model_id=cfg.model_id)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Standard cosine similarity; symmetric, scale-invariant, in [-1, 1]."""
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")
    na = float(np.linalg.norm(a.values))
    nb = float(np.linalg.norm(b.values))
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine undefined for zero vectors")
    return float(np.dot(a.values, b.values) / (na * nb))


def mean_vector(ce: CorpusEmbedding) -> EmbeddingVector:
    """Component-wise arithmetic mean over all entries."""
    if len(ce) == 0:
        raise ValidationError("mean of an empty corpus embedding")
    m = ce.matrix().mean(axis=0)
    return EmbeddingVector(values=m, dim=m.shape[0], model_id=ce.model_id)


def centroid_similarity(x_id: str, ce: CorpusEmbedding) -> float:
    """Cosine between one resume's vector and the corpus mean (x included)."""
    if x_id not in ce.entries:
        raise KeyError(f"unknown resume id {x_id!r}")
    return cosine(ce.entries[x_id], mean_vector(ce))


def centroid_ranking(ce: CorpusEmbedding) -> list[tuple[str, float]]:
    """All ids ranked by centroid similarity descending, ties by id order."""
    mean = mean_vector(ce)
    scored = [(rid, cosine(vec, mean)) for rid, vec in ce.entries.items()]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def save_embedding_export(ce: CorpusEmbedding, path) -> None:
    """npz export (ids + matrix + model id) consumed by the analysis package."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(
        path,
        ids=np.array(ce.ids, dtype=object),
        vectors=ce.matrix(),
        model_id=np.array(ce.model_id),
    )


def load_embedding_export(path) -> CorpusEmbedding:
    data = np.load(path, allow_pickle=True)
    ids = [str(i) for i in data["ids"]]
    matrix = np.asarray(data["vectors"], dtype=np.float64)
    model_id = str(data["model_id"])
    entries = {
        rid: EmbeddingVector(values=matrix[i], dim=matrix.shape[1], model_id=model_id)
        for i, rid in enumerate(ids)
    }
    return CorpusEmbedding(entries=entries, model_id=model_id)
