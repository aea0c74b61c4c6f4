"""Exception types shared across the pipeline."""


class ResumeJudgeError(Exception):
    """Base class for all package errors."""


class ValidationError(ResumeJudgeError):
    """An input violated a documented precondition."""


class InfeasibleSpecError(ResumeJudgeError):
    """A sample spec asks for more resumes than a pool can supply."""

    def __init__(self, message: str, pool: str = "", needed: int = 0, available: int = 0):
        super().__init__(message)
        self.pool = pool
        self.needed = needed
        self.available = available


class ParseError(ResumeJudgeError):
    """A judge response could not be parsed into a verdict.

    Carries the offending raw text so the retry loop can log and resend.
    """

    def __init__(self, message: str, raw: str = "", field: str = ""):
        super().__init__(message)
        self.raw = raw
        self.field = field


class EmbeddingError(ResumeJudgeError):
    """Embedding endpoint failed for one or more records after retries."""

    def __init__(self, message: str, failed_ids: list | None = None):
        super().__init__(message)
        self.failed_ids = failed_ids or []


class JudgeError(ResumeJudgeError):
    """Judge endpoint became unreachable; partial verdicts are attached."""

    def __init__(self, message: str, partial: list | None = None):
        super().__init__(message)
        self.partial = partial or []


class StageError(ResumeJudgeError):
    """A pipeline stage was invoked before its dependencies completed."""
