"""Corpus ingestion, filtering, anonymization, and the canonical record format.

The canonical on-disk format is line-delimited JSON, one record per line:

    {"id": "r3f9...", "applied_position": "...",
     "content": [{"question": "...", "answer": "...", "char_count": 123}, ...]}

Input files use the same shape; `id` is optional and `char_count` is ignored
on input (it is always recomputed). Unrecognized fields are dropped.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

# Anonymized ids are a salted one-way digest in this shape. Ingestion leaves
# matching ids untouched, which is what makes re-ingesting an export a no-op.
ANON_ID_RE = re.compile(r"^r[0-9a-f]{16}$")


@dataclass(frozen=True)
class QAItem:
    question: str
    answer: str
    char_count: int

    def __post_init__(self):
        if self.char_count != len(self.answer):
            raise ValidationError(
                f"char_count {self.char_count} != answer length {len(self.answer)}"
            )


@dataclass(frozen=True)
class ResumeRecord:
    id: str
    applied_position: str
    items: tuple[QAItem, ...]


@dataclass
class CorpusStats:
    total_ingested: int = 0
    retained: int = 0
    dropped_records: int = 0
    dropped_items: int = 0
    # (line number, reason) for every line that could not become a record.
    parse_errors: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "total_ingested": self.total_ingested,
            "retained": self.retained,
            "dropped_records": self.dropped_records,
            "dropped_items": self.dropped_items,
            "parse_errors": [{"line": ln, "error": msg} for ln, msg in self.parse_errors],
        }


def anonymize_id(original_name: str, salt: str) -> str:
    """One-way salted digest of a source name.

    Deterministic for a fixed salt; the hex output cannot contain any
    multi-character substring of typical source names.
    """
    if not original_name:
        raise ValidationError("cannot anonymize an empty name")
    digest = hashlib.blake2b(
        original_name.encode("utf-8"), key=salt.encode("utf-8")[:64], digest_size=8
    ).hexdigest()
    return f"r{digest}"


def _parse_line(obj: dict, line_no: int, source_name: str, salt: str) -> ResumeRecord:
    if not isinstance(obj, dict):
        raise ValidationError("record is not an object")
    position = obj.get("applied_position")
    if not isinstance(position, str):
        raise ValidationError("missing or non-string applied_position")
    content = obj.get("content")
    if not isinstance(content, list):
        raise ValidationError("missing or non-list content")
    items = []
    for i, entry in enumerate(content):
        if not isinstance(entry, dict):
            raise ValidationError(f"content[{i}] is not an object")
        q, a = entry.get("question"), entry.get("answer")
        if not isinstance(q, str) or not isinstance(a, str):
            raise ValidationError(f"content[{i}] missing question/answer text")
        items.append(QAItem(question=q, answer=a, char_count=len(a)))

    raw_id = obj.get("id")
    if raw_id is not None and not isinstance(raw_id, str):
        raise ValidationError("id is not a string")
    if raw_id and ANON_ID_RE.match(raw_id):
        rec_id = raw_id  # already anonymized; keep stable across re-ingestion
    elif raw_id:
        rec_id = anonymize_id(raw_id, salt)
    else:
        rec_id = anonymize_id(f"{source_name}#{line_no}", salt)
    return ResumeRecord(id=rec_id, applied_position=position, items=tuple(items))


def ingest(
    source_path, min_item_chars: int = 100, *, salt: str = "resumejudge"
) -> tuple[list[ResumeRecord], CorpusStats]:
    """Read a line-delimited record file, filter short items, anonymize ids.

    Items whose answer length is <= min_item_chars are dropped; records left
    with no items are dropped entirely. Malformed lines are collected in
    stats.parse_errors and ingestion continues. Output order is input order.
    """
    source_path = Path(source_path)
    stats = CorpusStats()
    records: list[ResumeRecord] = []
    seen_ids: set[str] = set()
    with open(source_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                stats.parse_errors.append((line_no, f"invalid JSON: {e.msg}"))
                continue
            try:
                record = _parse_line(obj, line_no, source_path.name, salt)
            except ValidationError as e:
                stats.parse_errors.append((line_no, str(e)))
                continue
            if record.id in seen_ids:
                stats.parse_errors.append((line_no, f"duplicate id {record.id}"))
                continue
            seen_ids.add(record.id)

            stats.total_ingested += 1
            kept = tuple(it for it in record.items if it.char_count > min_item_chars)
            stats.dropped_items += len(record.items) - len(kept)
            if not kept:
                stats.dropped_records += 1
                continue
            stats.retained += 1
            records.append(
                ResumeRecord(id=record.id, applied_position=record.applied_position, items=kept)
            )
    return records, stats


def build_id_map(source_path, salt: str) -> dict[str, str]:
    """original name -> anonymized id, for the operator-only sidecar file.

    Covers every line that ingest would anonymize (named or positional);
    already-anonymized ids are identity-mapped and omitted.
    """
    source_path = Path(source_path)
    mapping: dict[str, str] = {}
    with open(source_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                continue
            if not isinstance(obj, dict):
                continue
            raw_id = obj.get("id")
            if isinstance(raw_id, str) and raw_id and not ANON_ID_RE.match(raw_id):
                mapping[raw_id] = anonymize_id(raw_id, salt)
            elif not raw_id:
                name = f"{source_path.name}#{line_no}"
                mapping[name] = anonymize_id(name, salt)
    return mapping


def record_to_dict(record: ResumeRecord) -> dict:
    return {
        "id": record.id,
        "applied_position": record.applied_position,
        "content": [
            {"question": it.question, "answer": it.answer, "char_count": it.char_count}
            for it in record.items
        ],
    }


def record_from_dict(obj: dict) -> ResumeRecord:
    return ResumeRecord(
        id=obj["id"],
        applied_position=obj["applied_position"],
        items=tuple(
            QAItem(question=e["question"], answer=e["answer"], char_count=e["char_count"])
            for e in obj["content"]
        ),
    )


def dumps_record(record: ResumeRecord) -> str:
    """Canonical single-line serialization; byte-stable for identical records."""
    return json.dumps(record_to_dict(record), ensure_ascii=False, sort_keys=True,
                      separators=(",", ":"))


def write_corpus(records: list[ResumeRecord], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dumps_record(record) + "\n")


def read_corpus(path) -> list[ResumeRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(record_from_dict(json.loads(line)))
    return records
