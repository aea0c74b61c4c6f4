"""Few-shot resume screening with LLM judges.

Pipeline: ingest a resume corpus, embed it, select few-shot exemplars by
diversity / similarity / clustering strategies, drive judge models over an
OpenAI-compatible wire protocol, and sweep configurations against multiple
reference ground truths.
"""

__version__ = "0.1.0"

from .corpus import CorpusStats, QAItem, ResumeRecord, anonymize_id, ingest
from .embedding import (
    CorpusEmbedding,
    EmbedConfig,
    EmbeddingVector,
    centroid_similarity,
    cosine,
    embed_corpus,
    mean_vector,
)
from .errors import (
    EmbeddingError,
    InfeasibleSpecError,
    JudgeError,
    ParseError,
    ResumeJudgeError,
    StageError,
    ValidationError,
)
from .evaluation import (
    EvalReport,
    GroundTruthSet,
    SweepGrid,
    accuracy,
    build_ground_truth,
    disagreement_rate,
    run_sweep,
    score_stats,
    timing_report,
)
from .judge import JudgeConfig, JudgeVerdict, judge_resumes, mock_judge, parse_verdict
from .prompting import CriteriaTable, PromptBundle, build_prompt, load_templates, render_example
from .sampling import (
    FewShotExample,
    SampleSpec,
    compose_sample_set,
    select_clustering,
    select_diversity,
    select_similarity,
)

__all__ = [
    "__version__",
    "QAItem", "ResumeRecord", "CorpusStats", "ingest", "anonymize_id",
    "EmbeddingVector", "CorpusEmbedding", "EmbedConfig", "embed_corpus",
    "cosine", "mean_vector", "centroid_similarity",
    "SampleSpec", "FewShotExample", "select_diversity", "select_similarity",
    "select_clustering", "compose_sample_set",
    "CriteriaTable", "PromptBundle", "build_prompt", "load_templates", "render_example",
    "JudgeConfig", "JudgeVerdict", "judge_resumes", "parse_verdict", "mock_judge",
    "GroundTruthSet", "EvalReport", "SweepGrid", "build_ground_truth", "accuracy",
    "disagreement_rate", "run_sweep", "score_stats", "timing_report",
    "ResumeJudgeError", "ValidationError", "InfeasibleSpecError", "ParseError",
    "EmbeddingError", "JudgeError", "StageError",
]
