"""Drive chat-completion judges over prompts and parse structured verdicts.

Wire protocol is OpenAI-compatible chat completions: request {model,
messages, temperature}, response {choices: [{message: {content}}]}. The mock
backend derives verdicts from a keyed digest of the record text, emits them
through the same raw-text + parser path as real responses, and reports a
digest-derived pseudo-latency so whole runs are bitwise reproducible.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests

from .corpus import ResumeRecord
from .embedding import serialize_record
from .errors import JudgeError, ParseError, ValidationError
from .prompting import (
    PromptBundle,
    TemplateSet,
    build_prompt,
    extract_fenced_blocks,
    parse_block_fields,
    render_verdict_block,
)
from .sampling import FewShotExample

log = logging.getLogger(__name__)

# Accepted spellings of the overall label, normalized to High/Low.
OVERALL_SYNONYMS = {
    "high": "High",
    "low": "Low",
    "高": "High",
    "低": "Low",
    "高い": "High",
    "低い": "Low",
}
# Field-name synonyms the lenient path maps onto the canonical keys.
FIELD_SYNONYMS = {
    "content": "content",
    "内容": "content",
    "structure": "structure",
    "構成": "structure",
    "language": "language",
    "言語": "language",
    "overall": "overall",
    "総合": "overall",
    "総合判定": "overall",
}
_SCORE_KEYS = ("content", "structure", "language")

RETRY_REMINDER = (
    "Your previous answer could not be parsed. Reply again with exactly one "
    "fenced block: ```verdict\\ncontent: <0-10>\\nstructure: <0-10>\\n"
    "language: <0-10>\\noverall: <High or Low>\\n```"
)


@dataclass(frozen=True)
class JudgeConfig:
    model_id: str
    endpoint_url: str = ""
    temperature: float = 0.0
    batch_size: int = 5
    max_retries: int = 3
    timeout_s: float = 120.0
    backend: str = "mock"  # http | mock
    mock_seed: int = 0
    multi_resume_prompts: bool = False
    api_key_env: str = "RESUMEJUDGE_API_KEY"

    def __post_init__(self):
        if self.backend not in ("http", "mock"):
            raise ValidationError(f"unknown judge backend {self.backend!r}")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.max_retries < 0:
            raise ValidationError("max_retries must be >= 0")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")
        if self.backend == "http" and not self.endpoint_url:
            raise ValidationError("http backend requires endpoint_url")


@dataclass(frozen=True)
class JudgeVerdict:
    resume_id: str
    overall: str  # High | Low | Unparsed
    content: int | None
    structure: int | None
    language: int | None
    rationale: str | None
    latency_s: float
    attempts: int

    def __post_init__(self):
        if self.overall not in ("High", "Low", "Unparsed"):
            raise ValidationError(f"bad overall {self.overall!r}")
        scores = (self.content, self.structure, self.language)
        if self.overall == "Unparsed":
            if any(s is not None for s in scores):
                raise ValidationError("Unparsed verdicts carry no scores")
        else:
            if any(s is None or not 0 <= s <= 10 for s in scores):
                raise ValidationError(f"scores out of range: {scores}")
        if self.latency_s < 0:
            raise ValidationError("negative latency")
        if self.attempts < 1:
            raise ValidationError("attempts must be >= 1")

    def to_dict(self) -> dict:
        return {
            "resume_id": self.resume_id,
            "overall": self.overall,
            "content": self.content,
            "structure": self.structure,
            "language": self.language,
            "rationale": self.rationale,
            "latency_s": self.latency_s,
            "attempts": self.attempts,
        }


def _lenient_fields(raw: str) -> dict[str, str]:
    """Scan free prose for labeled lines when no fenced block survived."""
    fields: dict[str, str] = {}
    for key, value in parse_block_fields(raw).items():
        canon = FIELD_SYNONYMS.get(key)
        if canon and canon not in fields:
            fields[canon] = value
    return fields


def parse_verdict(raw: str, expected_resume_id: str) -> dict:
    """Extract one verdict from a model response for a single target slot.

    Returns {resume_id, overall, content, structure, language, rationale}.
    Raises ParseError naming the offending field otherwise.
    """
    blocks = extract_fenced_blocks(raw)
    if blocks:
        fields = {}
        for key, value in parse_block_fields(blocks[0]).items():
            canon = FIELD_SYNONYMS.get(key)
            if canon:
                fields[canon] = value
    else:
        fields = _lenient_fields(raw)
    if not fields:
        raise ParseError("no verdict block found", raw=raw, field="block")

    scores = {}
    for key in _SCORE_KEYS:
        if key not in fields:
            raise ParseError(f"missing field: {key}", raw=raw, field=key)
        try:
            value = int(fields[key])
        except ValueError:
            raise ParseError(f"{key} not an integer: {fields[key]!r}", raw=raw, field=key)
        if not 0 <= value <= 10:
            raise ParseError(f"{key} out of range: {value}", raw=raw, field=key)
        scores[key] = value

    if "overall" not in fields:
        raise ParseError("missing field: overall", raw=raw, field="overall")
    overall = OVERALL_SYNONYMS.get(fields["overall"].strip().lower())
    if overall is None:
        overall = OVERALL_SYNONYMS.get(fields["overall"].strip())
    if overall is None:
        raise ParseError(f"overall invalid: {fields['overall']!r}", raw=raw, field="overall")

    return {
        "resume_id": expected_resume_id,
        "overall": overall,
        "content": scores["content"],
        "structure": scores["structure"],
        "language": scores["language"],
        "rationale": None,
    }


def mock_judge(record: ResumeRecord, seed: int) -> dict:
    """Deterministic verdict fields from a keyed digest of the record text.

    Each dimension score is a digest byte mod 11; overall is High iff the
    three scores sum to at least 15.
    """
    digest = hashlib.blake2b(
        f"{seed}\x1f{serialize_record(record)}".encode("utf-8"), digest_size=8
    ).digest()
    content, structure, language = (digest[0] % 11, digest[1] % 11, digest[2] % 11)
    overall = "High" if content + structure + language >= 15 else "Low"
    return {
        "content": content,
        "structure": structure,
        "language": language,
        "overall": overall,
    }


def _mock_latency(record: ResumeRecord, seed: int) -> float:
    digest = hashlib.blake2b(
        f"latency\x1f{seed}\x1f{record.id}".encode("utf-8"), digest_size=4
    ).digest()
    return 0.05 + int.from_bytes(digest, "big") % 1000 / 10000.0


class _AuditLog:
    """Append-only JSONL, single writer. One record per request attempt."""

    def __init__(self, path):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, entry: dict) -> None:
        if not self.path:
            return
        line = json.dumps(entry, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


def _chat_request(prompt_text: str, cfg: JudgeConfig, reminder: str | None) -> tuple[str, float]:
    content = prompt_text if reminder is None else f"{prompt_text}\n\n{reminder}"
    payload = {
        "model": cfg.model_id,
        "messages": [{"role": "user", "content": content}],
        "temperature": cfg.temperature,
    }
    headers = {}
    api_key = os.environ.get(cfg.api_key_env, "")
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    start = time.perf_counter()
    resp = requests.post(cfg.endpoint_url, json=payload, headers=headers, timeout=cfg.timeout_s)
    resp.raise_for_status()
    raw = resp.json()["choices"][0]["message"]["content"]
    return raw, time.perf_counter() - start


def _mock_response(records: list[ResumeRecord], cfg: JudgeConfig) -> tuple[str, float]:
    """Raw text a well-behaved judge would emit for these targets."""
    parts = []
    latency = 0.0
    for rec in records:
        fields = mock_judge(rec, cfg.mock_seed)
        parts.append(
            render_verdict_block(
                fields["overall"],
                (fields["content"], fields["structure"], fields["language"]),
            )
        )
        latency += _mock_latency(rec, cfg.mock_seed)
    return "\n\n".join(parts), latency


def _judge_single(
    record: ResumeRecord,
    bundle: PromptBundle,
    cfg: JudgeConfig,
    audit: _AuditLog,
) -> JudgeVerdict:
    prompt_digest = hashlib.sha256(bundle.rendered.encode("utf-8")).hexdigest()
    reminder = None
    attempts = 0
    total_latency = 0.0
    last_error = ""
    while attempts <= cfg.max_retries:
        attempts += 1
        if cfg.backend == "mock":
            raw, latency = _mock_response([record], cfg)
        else:
            try:
                raw, latency = _chat_request(bundle.rendered, cfg, reminder)
            except requests.ConnectionError as e:
                raise JudgeError(f"endpoint unreachable: {e}")
            except (requests.RequestException, KeyError, IndexError, ValueError) as e:
                last_error = f"transport: {e}"
                audit.write(
                    {
                        "resume_id": record.id,
                        "prompt_digest": prompt_digest,
                        "attempt": attempts,
                        "error": last_error,
                        "raw": "",
                        "latency_s": 0.0,
                    }
                )
                continue
        total_latency += latency
        audit.write(
            {
                "resume_id": record.id,
                "prompt_digest": prompt_digest,
                "attempt": attempts,
                "raw": raw,
                "latency_s": latency,
            }
        )
        try:
            fields = parse_verdict(raw, record.id)
        except ParseError as e:
            last_error = str(e)
            reminder = RETRY_REMINDER
            log.warning("parse failed for %s (attempt %d): %s", record.id, attempts, e)
            continue
        return JudgeVerdict(latency_s=total_latency, attempts=attempts, **fields)
    return JudgeVerdict(
        resume_id=record.id,
        overall="Unparsed",
        content=None,
        structure=None,
        language=None,
        rationale=last_error or None,
        latency_s=total_latency,
        attempts=attempts,
    )


def _judge_wave_multi(
    wave: list[ResumeRecord],
    examples: list[FewShotExample],
    cfg: JudgeConfig,
    templates: TemplateSet,
    attribute_type: str,
    audit: _AuditLog,
) -> list[JudgeVerdict]:
    """One prompt carrying the whole wave; k-th fenced block answers the
    k-th target. Per-resume latency is the request latency / wave size."""
    bundle = build_prompt(
        templates.persona,
        templates.criteria,
        templates.instruction,
        examples,
        wave,
        attribute_type=attribute_type,
        template_version=templates.version,
    )
    prompt_digest = hashlib.sha256(bundle.rendered.encode("utf-8")).hexdigest()
    reminder = None
    attempts = 0
    total_latency = 0.0
    parsed: list[dict] | None = None
    while attempts <= cfg.max_retries:
        attempts += 1
        if cfg.backend == "mock":
            raw, latency = _mock_response(wave, cfg)
        else:
            try:
                raw, latency = _chat_request(bundle.rendered, cfg, reminder)
            except requests.ConnectionError as e:
                raise JudgeError(f"endpoint unreachable: {e}")
            except (requests.RequestException, KeyError, IndexError, ValueError) as e:
                reminder = RETRY_REMINDER
                audit.write(
                    {
                        "resume_ids": [r.id for r in wave],
                        "prompt_digest": prompt_digest,
                        "attempt": attempts,
                        "error": f"transport: {e}",
                        "raw": "",
                        "latency_s": 0.0,
                    }
                )
                continue
        total_latency += latency
        audit.write(
            {
                "resume_ids": [r.id for r in wave],
                "prompt_digest": prompt_digest,
                "attempt": attempts,
                "raw": raw,
                "latency_s": latency,
            }
        )
        blocks = extract_fenced_blocks(raw)
        candidate: list[dict] = []
        ok = True
        for i, rec in enumerate(wave):
            if i >= len(blocks):
                ok = False
                break
            try:
                candidate.append(parse_verdict(f"```verdict\n{blocks[i]}\n```", rec.id))
            except ParseError:
                ok = False
                break
        if ok:
            parsed = candidate
            break
        reminder = RETRY_REMINDER
    per_resume = total_latency / len(wave)
    if parsed is not None:
        return [
            JudgeVerdict(latency_s=per_resume, attempts=attempts, **fields)
            for fields in parsed
        ]
    return [
        JudgeVerdict(
            resume_id=rec.id,
            overall="Unparsed",
            content=None,
            structure=None,
            language=None,
            rationale="wave parse failed",
            latency_s=per_resume,
            attempts=attempts,
        )
        for rec in wave
    ]


def judge_resumes(
    records: list[ResumeRecord],
    examples: list[FewShotExample],
    cfg: JudgeConfig,
    templates: TemplateSet,
    *,
    attribute_type: str | None = None,
    audit_path=None,
) -> list[JudgeVerdict]:
    """Judge every record, one verdict each, in input order.

    Requests go out in concurrent waves of cfg.batch_size (one resume per
    request by default). Malformed responses are retried up to
    cfg.max_retries with a format reminder, then marked Unparsed. Raw
    responses land in the audit log when audit_path is given.
    """
    if not records:
        raise ValidationError("judge_resumes needs at least one record")
    if attribute_type is None:
        attribute_type = (
            "overall_and_dimensions"
            if examples and examples[0].dim_scores is not None
            else "overall_only"
        )
    audit = _AuditLog(audit_path)
    verdicts: list[JudgeVerdict] = []

    if cfg.multi_resume_prompts:
        for start in range(0, len(records), cfg.batch_size):
            wave = records[start : start + cfg.batch_size]
            verdicts.extend(
                _judge_wave_multi(wave, examples, cfg, templates, attribute_type, audit)
            )
        return verdicts

    def one(record: ResumeRecord) -> JudgeVerdict:
        bundle = build_prompt(
            templates.persona,
            templates.criteria,
            templates.instruction,
            examples,
            [record],
            attribute_type=attribute_type,
            template_version=templates.version,
        )
        return _judge_single(record, bundle, cfg, audit)

    for start in range(0, len(records), cfg.batch_size):
        wave = records[start : start + cfg.batch_size]
        try:
            if cfg.backend == "mock":
                # pure compute; sequential keeps the audit order deterministic
                verdicts.extend(one(r) for r in wave)
            else:
                with ThreadPoolExecutor(max_workers=cfg.batch_size) as pool:
                    verdicts.extend(pool.map(one, wave))
        except JudgeError as e:
            e.partial = verdicts
            raise
    return verdicts


def save_verdicts(verdicts: list[JudgeVerdict], path, meta: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = dict(meta or {})
    doc["verdicts"] = [v.to_dict() for v in verdicts]
    path.write_text(
        json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )
