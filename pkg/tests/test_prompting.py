import pytest

from resumejudge.errors import ValidationError
from resumejudge.prompting import (
    CriteriaTable,
    build_prompt,
    extract_fenced_blocks,
    parse_block_fields,
    parse_example_block,
    render_criteria,
    render_example,
    render_verdict_block,
)
from resumejudge.sampling import FewShotExample

from factories import make_record


def make_example(rid="rabc", overall="High", dims=(8, 7, 9)):
    record = make_record(rid, "Engineer", ["answer " + "x" * 120])
    return FewShotExample(resume_id=rid, record=record, overall=overall, dim_scores=dims)


def test_load_templates_en(templates_en):
    assert templates_en.locale == "en"
    assert templates_en.persona.strip()
    assert templates_en.instruction.strip()
    assert templates_en.version.startswith("en.")
    assert "#:" not in templates_en.persona


def test_load_templates_ja(templates_ja):
    assert templates_ja.locale == "ja"
    assert "評価" in templates_ja.instruction or "高" in templates_ja.instruction


def test_load_templates_unknown_locale():
    from resumejudge.prompting import load_templates

    with pytest.raises(ValidationError):
        load_templates("xx")


def test_criteria_table_shape(templates_en):
    table = templates_en.criteria
    names = [d.name for d in table.dimensions]
    assert names == ["Content", "Structure", "Language"]
    counts = [len(d.perspectives) for d in table.dimensions]
    assert counts == [2, 3, 3]
    for dim in table.dimensions:
        for p in dim.perspectives:
            assert p.name.strip()
            assert all(c.strip() for c in p.criteria)


def test_criteria_table_rejects_wrong_counts(templates_en):
    obj = templates_en.criteria.to_dict()
    obj["dimensions"][0]["perspectives"].append({"name": "Extra", "criteria": ["x"]})
    with pytest.raises(ValidationError):
        CriteriaTable.from_dict(obj)


def test_criteria_table_rejects_reordered_dimensions(templates_en):
    obj = templates_en.criteria.to_dict()
    obj["dimensions"].reverse()
    with pytest.raises(ValidationError):
        CriteriaTable.from_dict(obj)


def test_criteria_round_trip(templates_en):
    obj = templates_en.criteria.to_dict()
    assert CriteriaTable.from_dict(obj) == templates_en.criteria


def test_render_criteria_contains_all_perspectives(templates_en):
    text = render_criteria(templates_en.criteria)
    for dim in templates_en.criteria.dimensions:
        assert f"### {dim.name}" in text
        for p in dim.perspectives:
            assert p.name in text


def test_render_verdict_block_full():
    block = render_verdict_block("High", (8, 7, 9))
    assert block.startswith("```verdict")
    assert "content: 8" in block
    assert "structure: 7" in block
    assert "language: 9" in block
    assert "overall: High" in block
    assert block.rstrip().endswith("```")


def test_render_verdict_block_overall_only():
    block = render_verdict_block("Low")
    assert "overall: Low" in block
    assert "content" not in block


def test_verdict_block_round_trips_through_parser():
    block = render_verdict_block("High", (10, 0, 5))
    fields = parse_block_fields(extract_fenced_blocks(block)[0])
    assert fields["overall"] == "High"
    assert fields["content"] == "10"
    assert fields["structure"] == "0"
    assert fields["language"] == "5"


def test_render_example_with_scores():
    text = render_example(make_example(), "overall_and_dimensions")
    assert "Position: Engineer" in text
    assert "Attributes:" in text
    assert "content: 8" in text
    assert "overall: High" in text


def test_render_example_overall_only():
    text = render_example(make_example(), "overall_only")
    assert "overall: High" in text
    assert "content:" not in text


def test_render_example_demands_scores_when_needed():
    ex = FewShotExample(
        resume_id="rx",
        record=make_record("rx", "Sales", ["y" * 130]),
        overall="Low",
        dim_scores=None,
    )
    with pytest.raises(ValidationError):
        render_example(ex, "overall_and_dimensions")


def test_parse_example_block_inverse_of_render():
    ex = make_example(dims=(6, 2, 10))
    text = render_example(ex, "overall_and_dimensions")
    overall, scores = parse_example_block(text)
    assert overall == "High"
    assert scores == (6, 2, 10)


def test_parse_example_block_overall_only():
    text = render_example(make_example(), "overall_only")
    overall, scores = parse_example_block(text)
    assert overall == "High"
    assert scores is None


def test_extract_fenced_blocks_multiple_in_order():
    text = "\n".join(
        [
            "preamble",
            render_verdict_block("High", (1, 2, 3)),
            "interlude",
            render_verdict_block("Low", (4, 5, 6)),
        ]
    )
    blocks = extract_fenced_blocks(text)
    assert len(blocks) == 2
    assert "overall: High" in blocks[0]
    assert "overall: Low" in blocks[1]


def test_extract_fenced_blocks_untagged_fallback():
    text = "```\ncontent: 5\nstructure: 5\nlanguage: 5\noverall: High\n```"
    blocks = extract_fenced_blocks(text)
    assert len(blocks) == 1


def test_extract_ignores_unrelated_fences():
    text = "```python\nprint('hello')\n```"
    assert extract_fenced_blocks(text) == []


def test_parse_block_fields_tolerates_spacing_and_equals():
    fields = parse_block_fields("  Content = 7\noverall:High\n\nnoise line")
    assert fields["content"] == "7"
    assert fields["overall"] == "High"


def bundle_for(templates, examples, targets, attribute_type="overall_and_dimensions"):
    return build_prompt(
        templates.persona,
        templates.criteria,
        templates.instruction,
        examples,
        targets,
        attribute_type=attribute_type,
        template_version=templates.version,
    )


def test_build_prompt_section_order(templates_en):
    examples = [make_example(f"rex{i}") for i in range(2)]
    targets = [make_record("rtgt0", "Engineer", ["t" * 140])]
    text = bundle_for(templates_en, examples, targets).rendered
    persona_head = templates_en.persona.strip().splitlines()[0][:20]
    assert text.index(persona_head) < text.index("## Evaluation Criteria")
    assert text.index("## Evaluation Criteria") < text.index("## Instruction")
    assert text.index("## Instruction") < text.index("## Reference Examples")
    assert text.index("## Reference Examples") < text.index("## Resumes to Evaluate")
    assert "rex0" in text and "rex1" in text and "rtgt0" in text


def test_build_prompt_zero_shot_omits_examples_section(templates_en):
    targets = [make_record("rtgt0", "Engineer", ["t" * 140])]
    bundle = bundle_for(templates_en, [], targets, attribute_type="overall_only")
    assert "## Reference Examples" not in bundle.rendered
    assert "## Resumes to Evaluate" in bundle.rendered


def test_build_prompt_rejects_no_targets(templates_en):
    with pytest.raises(ValidationError):
        bundle_for(templates_en, [], [])


def test_build_prompt_examples_in_given_order(templates_en):
    examples = [make_example("rbbb"), make_example("raaa")]
    targets = [make_record("rtgt0", "Engineer", ["t" * 140])]
    text = bundle_for(templates_en, examples, targets).rendered
    assert text.index("rbbb") < text.index("raaa")


def test_build_prompt_multiple_targets_numbered(templates_en):
    targets = [make_record(f"rtgt{i}", "Engineer", ["t" * 140]) for i in range(3)]
    text = bundle_for(templates_en, [], targets, attribute_type="overall_only").rendered
    assert "### Target 1 (id: rtgt0)" in text
    assert "### Target 3 (id: rtgt2)" in text


def test_prompt_version_carried(templates_en):
    targets = [make_record("rtgt0", "Engineer", ["t" * 140])]
    bundle = bundle_for(templates_en, [], targets, attribute_type="overall_only")
    assert bundle.template_version == templates_en.version


def test_build_prompt_deterministic(templates_en):
    examples = [make_example("rex0")]
    targets = [make_record("rtgt0", "Engineer", ["t" * 140])]
    a = bundle_for(templates_en, examples, targets).rendered
    b = bundle_for(templates_en, examples, targets).rendered
    assert a == b
