import json

from resumejudge.corpus import ingest
from resumejudge.synthetic import QUESTIONS, generate_corpus, write_raw_corpus


def test_generate_deterministic():
    a = generate_corpus(20, 5)
    b = generate_corpus(20, 5)
    assert a == b


def test_generate_seed_sensitive():
    assert generate_corpus(20, 5) != generate_corpus(20, 6)


def test_generated_shape():
    records = generate_corpus(30, 1)
    assert len(records) == 30
    for rec in records:
        assert rec["applied_position"]
        assert 2 <= len(rec["content"]) <= 4
        questions = [item["question"] for item in rec["content"]]
        assert len(set(questions)) == len(questions)
        assert all(q in QUESTIONS for q in questions)


def test_some_records_missing_id():
    records = generate_corpus(60, 2)
    with_id = [r for r in records if "id" in r]
    without = [r for r in records if "id" not in r]
    assert with_id and without


def test_ingest_retains_every_record(tmp_path):
    # First item of each record is always long, so the default length filter
    # never drops a whole record.
    raw = generate_corpus(40, 9)
    path = tmp_path / "raw.jsonl"
    write_raw_corpus(raw, path)
    records, stats = ingest(path, 100, salt="s")
    assert stats.total_ingested == 40
    assert stats.retained == 40
    assert stats.dropped_records == 0


def test_short_items_present_and_filtered(tmp_path):
    raw = generate_corpus(60, 3)
    path = tmp_path / "raw.jsonl"
    write_raw_corpus(raw, path)
    _, stats = ingest(path, 100, salt="s")
    assert stats.dropped_items > 0


def test_written_file_is_valid_jsonl(tmp_path):
    raw = generate_corpus(5, 0)
    path = tmp_path / "raw.jsonl"
    write_raw_corpus(raw, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 5
    for line in lines:
        json.loads(line)
