import pytest

from resumejudge.embedding import EmbedConfig, embed_corpus
from resumejudge.prompting import load_templates
from resumejudge.synthetic import generate_corpus, write_raw_corpus


@pytest.fixture(scope="session")
def templates_en():
    return load_templates("en")


@pytest.fixture(scope="session")
def templates_ja():
    return load_templates("ja")


@pytest.fixture(scope="session")
def synth_records(tmp_path_factory):
    raw = generate_corpus(50, 7)
    path = tmp_path_factory.mktemp("corpus") / "raw.jsonl"
    write_raw_corpus(raw, path)
    from resumejudge.corpus import ingest

    records, _ = ingest(path, 100, salt="test-salt")
    return records


@pytest.fixture(scope="session")
def synth_ce(synth_records):
    return embed_corpus(synth_records, EmbedConfig(model_id="mock-embed", dim=32))


@pytest.fixture()
def no_network(monkeypatch):
    """Any attempt to touch the wire fails the test."""
    import requests

    def _blocked(*args, **kwargs):
        raise AssertionError("network call attempted in a no-network test")

    monkeypatch.setattr(requests, "post", _blocked)
    monkeypatch.setattr(requests, "get", _blocked)
