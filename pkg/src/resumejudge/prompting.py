"""Prompt assembly: persona, criteria table, instruction, exemplars, targets.

Templates are versioned plain-text assets under resumejudge/templates/<locale>/.
Lines starting with "#:" in .txt assets are header comments and are stripped
at load time. The structured verdict block grammar (rendered here, parsed by
the judge module) is a fenced block:

    ```verdict
    content: 8
    structure: 7
    language: 9
    overall: High
    ```

Exemplar attribute blocks use the same grammar; under overall_only only the
overall line is present.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

from .corpus import ResumeRecord
from .errors import ValidationError
from .sampling import FewShotExample

TEMPLATE_VERSION = "1"

VERDICT_FENCE_OPEN = "```verdict"
VERDICT_FENCE_CLOSE = "```"
_FENCED_RE = re.compile(r"```verdict\s*\n(.*?)```", re.DOTALL)
_ANY_FENCE_RE = re.compile(r"```[a-zA-Z]*\s*\n(.*?)```", re.DOTALL)
_FIELD_RE = re.compile(r"^\s*([A-Za-z_぀-ヿ一-鿿]+)\s*[:=]\s*(.+?)\s*$")

DIMENSION_NAMES = ("Content", "Structure", "Language")
_PERSPECTIVE_COUNTS = {"Content": 2, "Structure": 3, "Language": 3}


@dataclass(frozen=True)
class Perspective:
    name: str
    criteria: tuple[str, ...]


@dataclass(frozen=True)
class Dimension:
    name: str
    perspectives: tuple[Perspective, ...]


@dataclass(frozen=True)
class CriteriaTable:
    dimensions: tuple[Dimension, ...]

    def __post_init__(self):
        names = tuple(d.name for d in self.dimensions)
        if names != DIMENSION_NAMES:
            raise ValidationError(f"dimensions must be {DIMENSION_NAMES} in order, got {names}")
        for dim in self.dimensions:
            want = _PERSPECTIVE_COUNTS[dim.name]
            if len(dim.perspectives) != want:
                raise ValidationError(
                    f"{dim.name} must have {want} perspectives, got {len(dim.perspectives)}"
                )
            for p in dim.perspectives:
                if not p.name or not p.criteria or any(not c for c in p.criteria):
                    raise ValidationError(f"empty perspective or criterion under {dim.name}")

    def to_dict(self) -> dict:
        return {
            "dimensions": [
                {
                    "name": d.name,
                    "perspectives": [
                        {"name": p.name, "criteria": list(p.criteria)} for p in d.perspectives
                    ],
                }
                for d in self.dimensions
            ]
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CriteriaTable":
        return cls(
            dimensions=tuple(
                Dimension(
                    name=d["name"],
                    perspectives=tuple(
                        Perspective(name=p["name"], criteria=tuple(p["criteria"]))
                        for p in d["perspectives"]
                    ),
                )
                for d in obj["dimensions"]
            )
        )


@dataclass(frozen=True)
class TemplateSet:
    persona: str
    instruction: str
    criteria: CriteriaTable
    locale: str
    version: str


def _strip_header(text: str) -> str:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#:")]
    return "\n".join(lines).strip()


def load_templates(locale: str = "en") -> TemplateSet:
    base = resources.files("resumejudge").joinpath("templates", locale)
    try:
        persona = _strip_header(base.joinpath("persona.txt").read_text(encoding="utf-8"))
        instruction = _strip_header(base.joinpath("instruction.txt").read_text(encoding="utf-8"))
        criteria_raw = base.joinpath("criteria.json").read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValidationError(f"no template assets for locale {locale!r}")
    criteria = CriteriaTable.from_dict(json.loads(criteria_raw))
    return TemplateSet(
        persona=persona,
        instruction=instruction,
        criteria=criteria,
        locale=locale,
        version=f"{locale}.{TEMPLATE_VERSION}",
    )


def render_criteria(table: CriteriaTable) -> str:
    lines = []
    for dim in table.dimensions:
        lines.append(f"### {dim.name}")
        for p in dim.perspectives:
            lines.append(f"- {p.name}")
            for c in p.criteria:
                lines.append(f"  - {c}")
    return "\n".join(lines)


def render_verdict_block(
    overall: str, dim_scores: tuple[int, int, int] | None = None
) -> str:
    """The structured block grammar shared by exemplars and judge outputs."""
    lines = [VERDICT_FENCE_OPEN]
    if dim_scores is not None:
        lines.append(f"content: {dim_scores[0]}")
        lines.append(f"structure: {dim_scores[1]}")
        lines.append(f"language: {dim_scores[2]}")
    lines.append(f"overall: {overall}")
    lines.append(VERDICT_FENCE_CLOSE)
    return "\n".join(lines)


def _render_record_body(record: ResumeRecord) -> str:
    parts = [f"Position: {record.applied_position}"]
    for i, item in enumerate(record.items, start=1):
        parts.append(f"Q{i}: {item.question}")
        parts.append(f"A{i}: {item.answer}")
    return "\n".join(parts)


def render_example(ex: FewShotExample, attribute_type: str) -> str:
    """One exemplar block: resume body, then its attributes."""
    if attribute_type == "overall_and_dimensions" and ex.dim_scores is None:
        raise ValidationError(f"exemplar {ex.resume_id} lacks dimension scores")
    scores = ex.dim_scores if attribute_type == "overall_and_dimensions" else None
    body = _render_record_body(ex.record)
    return f"{body}\nAttributes:\n{render_verdict_block(ex.overall, scores)}"


def extract_fenced_blocks(text: str) -> list[str]:
    """Inner text of fenced verdict blocks, in order. Falls back to any
    fenced block mentioning an overall field when none carry the tag."""
    blocks = _FENCED_RE.findall(text)
    if blocks:
        return [b.strip() for b in blocks]
    loose = [b.strip() for b in _ANY_FENCE_RE.findall(text)]
    return [b for b in loose if re.search(r"overall|総合", b, re.IGNORECASE)]


def parse_block_fields(block: str) -> dict[str, str]:
    """key: value lines -> dict with lowercased keys; later keys win."""
    fields: dict[str, str] = {}
    for line in block.splitlines():
        m = _FIELD_RE.match(line)
        if m:
            fields[m.group(1).lower()] = m.group(2)
    return fields


def parse_example_block(block_text: str) -> tuple[str, tuple[int, int, int] | None]:
    """Inverse of render_verdict_block on the exemplar grammar."""
    blocks = extract_fenced_blocks(block_text)
    if not blocks:
        raise ValidationError("no attribute block found")
    fields = parse_block_fields(blocks[0])
    if "overall" not in fields:
        raise ValidationError("attribute block lacks overall")
    overall = fields["overall"]
    score_keys = ("content", "structure", "language")
    if all(k in fields for k in score_keys):
        scores = tuple(int(fields[k]) for k in score_keys)
    else:
        scores = None
    return overall, scores


@dataclass(frozen=True)
class PromptBundle:
    persona: str
    instruction: str
    criteria: CriteriaTable
    examples: tuple[FewShotExample, ...]
    targets: tuple[ResumeRecord, ...]
    rendered: str
    template_version: str
    attribute_type: str = "overall_and_dimensions"


def _render(
    persona: str,
    criteria: CriteriaTable,
    instruction: str,
    examples: tuple[FewShotExample, ...],
    targets: tuple[ResumeRecord, ...],
    attribute_type: str,
) -> str:
    parts = [persona, "", "## Evaluation Criteria", render_criteria(criteria), ""]
    parts += ["## Instruction", instruction, ""]
    if examples:
        parts.append("## Reference Examples")
        for i, ex in enumerate(examples, start=1):
            parts.append(f"### Example {i} (id: {ex.resume_id})")
            parts.append(render_example(ex, attribute_type))
        parts.append("")
    parts.append("## Resumes to Evaluate")
    for i, rec in enumerate(targets, start=1):
        parts.append(f"### Target {i} (id: {rec.id})")
        parts.append(_render_record_body(rec))
    return "\n".join(parts)


def build_prompt(
    persona: str,
    criteria: CriteriaTable,
    instruction: str,
    examples: list[FewShotExample],
    targets: list[ResumeRecord],
    *,
    attribute_type: str = "overall_and_dimensions",
    template_version: str = TEMPLATE_VERSION,
) -> PromptBundle:
    """Assemble the full prompt. Deterministic; zero-shot (no examples)
    omits the example section header entirely."""
    if not targets:
        raise ValidationError("build_prompt needs at least one target")
    examples_t = tuple(examples)
    targets_t = tuple(targets)
    rendered = _render(persona, criteria, instruction, examples_t, targets_t, attribute_type)
    return PromptBundle(
        persona=persona,
        instruction=instruction,
        criteria=criteria,
        examples=examples_t,
        targets=targets_t,
        rendered=rendered,
        template_version=template_version,
        attribute_type=attribute_type,
    )
