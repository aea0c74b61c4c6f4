import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resumejudge.corpus import (
    ANON_ID_RE,
    CorpusStats,
    QAItem,
    anonymize_id,
    build_id_map,
    dumps_record,
    ingest,
    read_corpus,
    write_corpus,
)
from resumejudge.errors import ValidationError


def write_lines(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def raw_record(rec_id=None, answers=("x" * 150,), position="Engineer"):
    obj = {
        "applied_position": position,
        "content": [{"question": f"Q{i}", "answer": a} for i, a in enumerate(answers)],
    }
    if rec_id is not None:
        obj["id"] = rec_id
    return obj


def test_char_count_is_unicode_scalar_length():
    item = QAItem(question="q", answer="学生時代に頑張ったこと", char_count=11)
    assert item.char_count == 11
    with pytest.raises(ValidationError):
        QAItem(question="q", answer="abc", char_count=5)


def test_item_of_exactly_100_chars_dropped(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, [raw_record(answers=("a" * 100, "b" * 101))])
    records, stats = ingest(path, 100, salt="s")
    assert len(records) == 1
    assert [it.char_count for it in records[0].items] == [101]
    assert stats.dropped_items == 1


def test_record_with_all_short_items_dropped(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, [raw_record(answers=("a" * 50, "b" * 100)), raw_record(answers=("c" * 200,))])
    records, stats = ingest(path, 100, salt="s")
    assert len(records) == 1
    assert stats.total_ingested == 2
    assert stats.dropped_records == 1
    assert stats.retained == 1
    assert stats.dropped_items == 2


def test_empty_file(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text("")
    records, stats = ingest(path, salt="s")
    assert records == []
    assert stats.to_dict()["total_ingested"] == 0


def test_unreadable_file(tmp_path):
    with pytest.raises(OSError):
        ingest(tmp_path / "does-not-exist.jsonl", salt="s")


def test_malformed_lines_reported_with_positions(tmp_path):
    path = tmp_path / "c.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(raw_record()) + "\n")
        fh.write("{not json\n")
        fh.write(json.dumps({"applied_position": 42, "content": []}) + "\n")
        fh.write(json.dumps(raw_record(answers=("z" * 140,))) + "\n")
    records, stats = ingest(path, salt="s")
    assert len(records) == 2
    lines = [ln for ln, _ in stats.parse_errors]
    assert lines == [2, 3]


def test_unrecognized_fields_dropped(tmp_path):
    path = tmp_path / "c.jsonl"
    obj = raw_record(rec_id="someone.txt")
    obj["email"] = "secret@example.com"
    obj["school"] = "X University"
    write_lines(path, [obj])
    records, _ = ingest(path, salt="s")
    line = dumps_record(records[0])
    assert "email" not in line and "secret" not in line and "University" not in line


def test_duplicate_ids_rejected(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, [raw_record(rec_id="same.txt"), raw_record(rec_id="same.txt")])
    records, stats = ingest(path, salt="s")
    assert len(records) == 1
    assert len(stats.parse_errors) == 1
    assert "duplicate" in stats.parse_errors[0][1]


def test_anonymize_deterministic_and_salted():
    a = anonymize_id("companyA_resume7.txt", "salt1")
    b = anonymize_id("companyA_resume7.txt", "salt1")
    c = anonymize_id("companyA_resume7.txt", "salt2")
    assert a == b
    assert a != c
    assert ANON_ID_RE.match(a)


def test_anonymize_reveals_no_source_substring():
    anon = anonymize_id("companyA_resume7.txt", "s")
    assert "companyA" not in anon
    assert "resume7" not in anon


def test_anonymize_empty_name():
    with pytest.raises(ValidationError):
        anonymize_id("", "s")


def test_anonymize_distinct_inputs_distinct_outputs():
    ids = {anonymize_id(f"name-{i}", "s") for i in range(500)}
    assert len(ids) == 500


def test_ids_anonymized_on_ingest(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, [raw_record(rec_id="companyA_resume7.txt"), raw_record()])
    records, _ = ingest(path, salt="s")
    for record in records:
        assert ANON_ID_RE.match(record.id)
        assert "companyA" not in record.id


def test_ingest_idempotent_byte_identical(tmp_path):
    path = tmp_path / "raw.jsonl"
    write_lines(
        path,
        [raw_record(rec_id="a.txt", answers=("x" * 150, "y" * 90)), raw_record(answers=("z" * 170,))],
    )
    records1, _ = ingest(path, salt="s")
    export = tmp_path / "canonical.jsonl"
    write_corpus(records1, export)
    records2, _ = ingest(export, salt="different-salt-does-not-matter")
    assert [dumps_record(r) for r in records1] == [dumps_record(r) for r in records2]
    export2 = tmp_path / "canonical2.jsonl"
    write_corpus(records2, export2)
    assert export.read_bytes() == export2.read_bytes()


def test_read_corpus_round_trip(tmp_path):
    path = tmp_path / "raw.jsonl"
    write_lines(path, [raw_record(rec_id="a.txt", answers=("w" * 130,))])
    records, _ = ingest(path, salt="s")
    out = tmp_path / "canonical.jsonl"
    write_corpus(records, out)
    assert read_corpus(out) == records


def test_build_id_map_covers_anonymized_lines(tmp_path):
    path = tmp_path / "raw.jsonl"
    write_lines(path, [raw_record(rec_id="orig-name.txt"), raw_record()])
    mapping = build_id_map(path, "s")
    assert mapping["orig-name.txt"] == anonymize_id("orig-name.txt", "s")
    positional = f"{path.name}#2"
    assert positional in mapping


def test_stats_counters_non_negative_and_consistent(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, [raw_record(answers=("a" * 150,)), raw_record(answers=("b" * 10,))])
    _, stats = ingest(path, salt="s")
    d = stats.to_dict()
    assert d["retained"] + d["dropped_records"] == d["total_ingested"]
    assert all(d[k] >= 0 for k in ("total_ingested", "retained", "dropped_records", "dropped_items"))


answers_strategy = st.lists(
    st.text(alphabet=st.characters(blacklist_categories=("Cs",)), min_size=0, max_size=220),
    min_size=1,
    max_size=4,
)
corpus_strategy = st.lists(answers_strategy, min_size=0, max_size=8)


@settings(max_examples=40, deadline=None)
@given(corpus=corpus_strategy, threshold=st.integers(min_value=0, max_value=250))
def test_retained_items_always_exceed_threshold(tmp_path_factory, corpus, threshold):
    path = tmp_path_factory.mktemp("prop") / "c.jsonl"
    write_lines(path, [raw_record(answers=tuple(a)) for a in corpus])
    records, stats = ingest(path, threshold, salt="s")
    for record in records:
        for item in record.items:
            assert item.char_count > threshold
    assert stats.retained + stats.dropped_records == stats.total_ingested


@settings(max_examples=25, deadline=None)
@given(corpus=corpus_strategy, low=st.integers(0, 120), delta=st.integers(1, 120))
def test_filter_monotonicity(tmp_path_factory, corpus, low, delta):
    path = tmp_path_factory.mktemp("prop") / "c.jsonl"
    write_lines(path, [raw_record(answers=tuple(a)) for a in corpus])
    records_low, _ = ingest(path, low, salt="s")
    records_high, _ = ingest(path, low + delta, salt="s")
    count_low = sum(len(r.items) for r in records_low)
    count_high = sum(len(r.items) for r in records_high)
    assert count_high <= count_low


def test_corpus_stats_default_zeroes():
    stats = CorpusStats()
    assert stats.to_dict()["parse_errors"] == []
