import json
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from asrnoise.transcript import (
    CorpusError,
    Dialogue,
    DuplicateIdError,
    NormalizationPolicy,
    Turn,
    load_corpus,
    load_paired_corpus,
    pair_turns,
    save_corpus,
    save_paired_corpus,
    tokenize,
)

from fixtures import make_corpus


def reference_normalize(text):
    """Regex-only normalizer kept separate from the package's character walk."""
    out = []
    for chunk in text.lower().split():
        chunk = re.sub(r"[^\w'-]|_", "", chunk)
        while True:
            stripped = re.sub(r"(?<![^\W_])['-]|['-](?![^\W_])", "", chunk)
            if stripped == chunk:
                break
            chunk = stripped
        if chunk:
            out.append(chunk)
    return out


@pytest.mark.parametrize(
    "text, expected",
    [
        ("I took a Tylenol", ["i", "took", "a", "tylenol"]),
        ("", []),
        ("Um, no, just maybe my stomach.", ["um", "no", "just", "maybe", "my", "stomach"]),
        ("I {shook tie-and-all}", ["i", "shook", "tie-and-all"]),
        ("don't -- 'quoted' well-known.", ["don't", "quoted", "well-known"]),
    ],
)
def test_tokenize_examples(text, expected):
    assert list(tokenize(text).tokens) == expected


@pytest.mark.parametrize(
    "text",
    ["Um, no, just maybe my stomach.", "It's like... loose -- and watery, OK?", "x-ray 3-day don't 'a'"],
)
def test_tokenize_agrees_with_reference_normalizer(text):
    assert list(tokenize(text).tokens) == reference_normalize(text)


def test_span_map_points_at_source():
    seq = tokenize("  Hello,  Doctor Smith!")
    assert seq.spans == ((2, 8), (10, 16), (17, 23))
    assert [seq.surface(i) for i in range(3)] == ["Hello,", "Doctor", "Smith!"]


@given(st.text())
def test_tokenize_idempotent(text):
    tokens = tokenize(text).tokens
    assert tokenize(" ".join(tokens)).tokens == tokens


@given(st.text())
def test_token_invariants(text):
    seq = tokenize(text)
    for tok in seq.tokens:
        assert tok and not any(c.isspace() for c in tok)
    prev_end = 0
    for start, end in seq.spans:
        assert prev_end <= start < end <= len(text)
        prev_end = end


def test_policy_version_distinguishes_settings():
    assert NormalizationPolicy().version == "v1"
    assert NormalizationPolicy(lowercase=False).version != "v1"
    assert tokenize("Tylenol", NormalizationPolicy(lowercase=False)).tokens == ("Tylenol",)


def test_turn_rejects_tag_metacharacters_and_ingest_strips_them():
    with pytest.raises(ValueError):
        Turn("doctor", "I {took} it")
    with pytest.raises(ValueError):
        Turn("doctor", "   ")
    turn = Turn.ingest("Doctor", "I {took} a (INSERTION) Tylenol")
    assert turn.text == "I took a Tylenol"
    assert turn.speaker == "doctor"


def write_lines(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")


def test_load_one_line_dialogue(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(
        path,
        [{"id": "x", "turns": [{"speaker": "doctor", "text": "Hi"}, {"speaker": "patient", "text": "Hello"}]}],
    )
    (d,) = load_corpus(path)
    assert d.id == "x" and len(d.turns) == 2
    assert d.turns[1] == Turn("patient", "Hello")


def test_duplicate_id_rejected(tmp_path):
    path = tmp_path / "c.jsonl"
    rec = {"id": "x", "turns": [{"speaker": "doctor", "text": "Hi"}]}
    write_lines(path, [rec, rec])
    with pytest.raises(DuplicateIdError) as err:
        load_corpus(path)
    assert err.value.line == 2


def test_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"id": "a", "turns": [{"text": "ok"}]}\n{not json\n', encoding="utf-8")
    with pytest.raises(CorpusError) as err:
        load_corpus(path)
    assert err.value.line == 2
    path.write_text('{"id": "a", "turns": []}\n', encoding="utf-8")
    with pytest.raises(CorpusError) as err:
        load_corpus(path)
    assert err.value.line == 1


def test_57_dialogue_corpus_round_trip(tmp_path):
    corpus = make_corpus(57, 6, seed=3)
    path = tmp_path / "c.jsonl"
    save_corpus(corpus, path)
    loaded = load_corpus(path)
    assert len(loaded) == 57
    assert loaded == corpus
    save_corpus(loaded, tmp_path / "again.jsonl")
    assert load_corpus(tmp_path / "again.jsonl") == corpus


def test_paired_corpus_formats(tmp_path):
    refs = make_corpus(3, 2, seed=1)
    hyps = make_corpus(3, 2, seed=2)
    save_paired_corpus(zip(refs, hyps), tmp_path / "p.jsonl")
    pairs = load_paired_corpus(tmp_path / "p.jsonl")
    assert [(r.id, h.id) for r, h in pairs] == [(d.id, d.id) for d in refs]
    save_corpus(refs, tmp_path / "r.jsonl")
    save_corpus(reversed(hyps), tmp_path / "h.jsonl")
    joined = load_paired_corpus(tmp_path / "r.jsonl", tmp_path / "h.jsonl")
    assert joined == list(zip(refs, hyps))


def test_parallel_files_missing_id(tmp_path):
    refs = make_corpus(3, 2)
    save_corpus(refs, tmp_path / "r.jsonl")
    save_corpus(refs[:2], tmp_path / "h.jsonl")
    with pytest.raises(CorpusError, match="d002"):
        load_paired_corpus(tmp_path / "r.jsonl", tmp_path / "h.jsonl")


def test_empty_hypothesis_turns_are_dropped(tmp_path):
    path = tmp_path / "p.jsonl"
    write_lines(
        path,
        [
            {
                "id": "a",
                "reference": {"turns": [{"speaker": "doctor", "text": "hello"}, {"speaker": "patient", "text": "hi"}]},
                "hypothesis": {"turns": [{"speaker": "doctor", "text": "hello"}, {"speaker": "patient", "text": ""}]},
            }
        ],
    )
    ((ref, hyp),) = load_paired_corpus(path)
    assert len(hyp.turns) == 1
    units = pair_turns(ref, hyp)
    assert len(units) == 1 and units[0].turn_index is None


def test_pair_turns_by_index():
    a = Dialogue("a", (Turn("doctor", "one two"), Turn("patient", "three")))
    b = Dialogue("a", (Turn("doctor", "one"), Turn("patient", "three four")))
    units = pair_turns(a, b)
    assert [(u.turn_index, u.reference, u.hypothesis) for u in units] == [
        (0, "one two", "one"),
        (1, "three", "three four"),
    ]
