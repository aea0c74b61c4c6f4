"""Shared object builders used across the test modules."""
import numpy as np

from resumejudge.corpus import QAItem, ResumeRecord
from resumejudge.embedding import CorpusEmbedding, EmbeddingVector
from resumejudge.evaluation import GroundTruthSet


def make_record(rec_id: str, position: str = "Engineer", answers: tuple = None) -> ResumeRecord:
    answers = answers or (f"answer body for {rec_id} " * 10,)
    items = tuple(
        QAItem(question=f"Question {i}?", answer=a, char_count=len(a))
        for i, a in enumerate(answers)
    )
    return ResumeRecord(id=rec_id, applied_position=position, items=items)


def make_ce(vectors: dict[str, list], model_id: str = "test-embed") -> CorpusEmbedding:
    entries = {}
    for rid, vec in vectors.items():
        arr = np.asarray(vec, dtype=np.float64)
        entries[rid] = EmbeddingVector(values=arr, dim=arr.shape[0], model_id=model_id)
    return CorpusEmbedding(entries=entries, model_id=model_id)


def make_gt(labels: dict[str, str], model_id: str = "ref", scores: dict = None) -> GroundTruthSet:
    scores = scores or {rid: (8, 7, 9) if lab == "High" else (3, 4, 2) for rid, lab in labels.items()}
    return GroundTruthSet(model_id=model_id, labels=labels, dim_scores=scores)


def pipeline_overrides() -> list[str]:
    """--set overrides that keep CLI pipeline tests small and fast:
    one reference judge and a trimmed sweep grid."""
    return [
        "judges.reference=[{model_id: ref-alpha, backend: mock, mock_seed: 101}]",
        "sweep.strategies=[diversity, similarity]",
        "sweep.shots=[3, 5]",
        "sweep.sample_types=[high_only]",
        "sweep.attribute_types=[overall_and_dimensions]",
    ]
