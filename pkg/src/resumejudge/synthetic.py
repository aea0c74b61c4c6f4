"""Seeded synthetic resume corpus generator.

The real screening corpus is not redistributable, so tests and demos run on
generated multi-item records. Output is the raw pre-ingestion JSONL shape
(`id` optional, `content` without char counts). Fully deterministic per seed.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

POSITIONS = (
    "Software Engineer",
    "Data Scientist",
    "Sales Associate",
    "Product Manager",
    "Marketing Specialist",
    "Management Consultant",
)

QUESTIONS = (
    "What did you put the most effort into during your student years?",
    "Describe a challenge you overcame as part of a team.",
    "What is your greatest strength, and how have you applied it?",
    "Why do you want to work in this industry?",
    "Tell us about a time you took initiative to improve something.",
)

_OPENERS = (
    "My conclusion is that {theme} shaped me more than anything else.",
    "The single achievement I am proudest of is {theme}.",
    "Above all, {theme} taught me how I want to work.",
    "I want to highlight {theme} as the core of my student life.",
    "What defines me best is {theme}.",
)

_THEMES = (
    "leading our 30-member tennis club through a losing season",
    "organizing a three-day charity hackathon from scratch",
    "tutoring first-year students in statistics twice a week",
    "running the logistics of our campus festival booth",
    "building a meal-planning app with two classmates",
    "translating research abstracts for a volunteer network",
    "managing part-time shifts at a busy convenience store",
    "coordinating a joint seminar between two universities",
    "rebuilding the student council's budget process",
    "growing our photography circle from five to forty members",
)

_MIDDLES = (
    "At first I failed to delegate, so deadlines slipped and two members quit.",
    "The turning point came when I started writing weekly one-page summaries for everyone involved.",
    "I interviewed each member one by one and rebuilt the schedule around their constraints.",
    "We measured the result every week and changed course whenever the numbers stalled.",
    "Instead of guessing, I collected feedback forms after every session and read all of them.",
    "I set one measurable goal per month and reviewed it publicly, which kept us honest.",
    "When attendance dropped by half, I redesigned the meetings to be 30 minutes shorter.",
    "I asked a senior colleague to audit my plan and accepted most of the criticism.",
)

_RESULTS = (
    "As a result, participation rose by roughly forty percent within one semester.",
    "In the end we finished the project two weeks early with no budget overrun.",
    "The team won the regional prize for the first time in eight years.",
    "Customer complaints fell to a third of the previous level.",
    "The process I documented is still used by the club two years later.",
    "Revenue from the booth doubled compared with the previous festival.",
)

_CLOSERS = (
    "I will bring the same habit of measuring and adjusting to this role.",
    "This experience is why I believe steady communication beats talent alone.",
    "I intend to apply this lesson directly to the position I am applying for.",
    "That is the working style I want to contribute to your company.",
)

_SHORT_ANSWERS = (
    "I like teamwork.",
    "Nothing in particular comes to mind, sorry.",
    "I worked hard at my part-time job and learned a lot from it.",
    "My strength is communication.",
)


def _answer(rng: np.random.Generator) -> str:
    theme = _THEMES[rng.integers(len(_THEMES))]
    parts = [_OPENERS[rng.integers(len(_OPENERS))].format(theme=theme)]
    for _ in range(int(rng.integers(1, 4))):
        parts.append(_MIDDLES[rng.integers(len(_MIDDLES))])
    parts.append(_RESULTS[rng.integers(len(_RESULTS))])
    if rng.random() < 0.7:
        parts.append(_CLOSERS[rng.integers(len(_CLOSERS))])
    return " ".join(parts)


def generate_corpus(
    n: int, seed: int, *, include_short_items: bool = True
) -> list[dict]:
    """n raw records; ~15% of items are sub-filter-length when enabled."""
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        n_items = int(rng.integers(2, 5))
        q_idx = rng.choice(len(QUESTIONS), size=n_items, replace=False)
        content = []
        for k, qi in enumerate(q_idx):
            # keep the first item long so the filter never empties a record
            if k > 0 and include_short_items and rng.random() < 0.15:
                answer = _SHORT_ANSWERS[rng.integers(len(_SHORT_ANSWERS))]
            else:
                answer = _answer(rng)
            content.append({"question": QUESTIONS[qi], "answer": answer})
        record = {
            "applied_position": POSITIONS[int(rng.integers(len(POSITIONS)))],
            "content": content,
        }
        # exercise both id paths: named source files and missing ids
        if rng.random() < 0.8:
            record["id"] = f"applicant_{i:04d}_batchA.txt"
        records.append(record)
    return records


def write_raw_corpus(records: list[dict], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
