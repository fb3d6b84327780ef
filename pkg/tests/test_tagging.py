import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from asrnoise.alignment import EditKind
from asrnoise.error_profile import ErrorProfile
from asrnoise.tagging import (
    ErrorPlan,
    InsertionMarker,
    Plain,
    PlanError,
    SubstitutionSpan,
    TaggedText,
    TagSyntaxError,
    apply_plan,
    decorate_example_pair,
    derive_seed,
    parse_tagged,
    sample_error_plan,
    strip_tags,
)
from asrnoise.transcript import tokenize

S, D, I = EditKind.SUBSTITUTION, EditKind.DELETION, EditKind.INSERTION

word = st.text(alphabet="abcdefghijklmnopqrstuvwxyz'-.,?", min_size=1, max_size=6).filter(
    lambda w: w != "(INSERTION)"
)
segment = st.one_of(
    st.builds(lambda ws: Plain(tuple(ws)), st.lists(word, min_size=1, max_size=3)),
    st.builds(lambda ws: SubstitutionSpan(tuple(ws)), st.lists(word, min_size=1, max_size=3)),
    st.just(InsertionMarker()),
)
tagged_texts = st.builds(lambda segs: TaggedText(tuple(segs)), st.lists(segment, max_size=8))


def plan(*decisions):
    return ErrorPlan(tuple(decisions))


# -- parse / render ----------------------------------------------------------


def test_parse_substitution_example():
    parsed = parse_tagged("{weesy} cough")
    assert parsed.segments == (SubstitutionSpan(("weesy",)), Plain(("cough",)))


def test_parse_plain_only():
    assert parse_tagged("plain words only").segments == (Plain(("plain", "words", "only")),)


def test_parse_insertion_marker():
    parsed = parse_tagged("a c (INSERTION)")
    assert parsed.segments == (Plain(("a", "c")), InsertionMarker())
    assert parsed.insertion_count == 1


@pytest.mark.parametrize(
    "text, code",
    [("a {b", "unbalanced-brace"), ("a} b", "unbalanced-brace"), ("{a {b}}", "nested-brace"), ("a { } b", "empty-span")],
)
def test_parse_errors(text, code):
    with pytest.raises(TagSyntaxError) as err:
        parse_tagged(text)
    assert err.value.code == code


def test_parse_normalizes_spacing():
    assert parse_tagged("I{shook   tie-and-all}now").render() == "I {shook tie-and-all} now"


@given(tagged_texts)
def test_parse_render_round_trip(tagged):
    assert parse_tagged(tagged.render()) == tagged


@given(tagged_texts)
def test_render_parse_round_trip_on_canonical_strings(tagged):
    text = tagged.render()
    assert parse_tagged(text).render() == text


def test_strip_tags():
    assert strip_tags("I {shook tie-and-all} (INSERTION) now") == "I shook tie-and-all now"


# -- sampling ----------------------------------------------------------------


def test_zero_wer_gives_empty_plan():
    assert len(sample_error_plan(["a"] * 50, ErrorProfile(0.0), seed=1)) == 0


def test_full_substitution_profile():
    p = sample_error_plan(list("abcde"), ErrorProfile(1.0, {S: 1.0}), seed=9)
    assert p.decisions == tuple((i, S) for i in range(5))


def test_sampling_matches_binomial_expectations():
    n = 40_000
    rate, cond = 0.25, {S: 0.6, D: 0.3, I: 0.1}
    p = sample_error_plan(["w"] * n, ErrorProfile(rate, cond), seed=20240601)
    tagged = len(p)
    assert abs(tagged - n * rate) <= 3 * math.sqrt(n * rate * (1 - rate))
    for kind, share in cond.items():
        count = len(p.indices(kind))
        assert abs(count - tagged * share) <= 3 * math.sqrt(tagged * share * (1 - share))


def test_sampling_is_reproducible():
    tokens = [f"t{i}" for i in range(500)]
    profile = ErrorProfile(0.3, {S: 0.5, D: 0.25, I: 0.25})
    seed = derive_seed(7, "dlg", 3, 0)
    assert sample_error_plan(tokens, profile, seed) == sample_error_plan(tokens, profile, seed)
    assert sample_error_plan(tokens, profile, seed) != sample_error_plan(tokens, profile, seed + 1)


def test_frozen_plan_for_fixed_seed():
    # Pins the PCG64 stream so a change of generator or draw order is noticed.
    tokens = [f"t{i}" for i in range(20)]
    got = sample_error_plan(tokens, ErrorProfile(0.3, {S: 0.6, D: 0.3, I: 0.1}), seed=12345)
    assert got.to_dict()["decisions"] == FROZEN_PLAN


# Recomputed by hand from two raw PCG64(12345) draws of length 20.
FROZEN_PLAN = [[0, "substitution"], [7, "substitution"], [10, "deletion"], [13, "deletion"], [19, "substitution"]]


def test_derive_seed_is_stable():
    assert derive_seed(0, "a", 1) == derive_seed(0, "a", 1)
    assert derive_seed(0, "a", 1) != derive_seed(0, "a", 2)
    assert derive_seed(0, "a", 1) != derive_seed(1, "a", 1)
    assert 0 <= derive_seed(2**70, "x") < 2**64


def test_higher_rate_tags_a_superset():
    tokens = ["w"] * 2000
    low = set(sample_error_plan(tokens, ErrorProfile(0.1), seed=5).as_dict())
    high = set(sample_error_plan(tokens, ErrorProfile(0.4), seed=5).as_dict())
    assert low <= high


# -- apply_plan --------------------------------------------------------------


def test_adjacent_substitutions_merge():
    tagged = apply_plan(["white", "spots", "throat"], plan((0, S), (1, S)))
    assert tagged.render() == "{white spots} throat"


def test_empty_plan_passthrough():
    assert apply_plan(["a", "b"], plan()).render() == "a b"


def test_deletion_and_insertion():
    tagged = apply_plan(["a", "b", "c"], plan((1, D), (2, I)))
    assert tagged.render() == "a c (INSERTION)"
    assert tagged.deleted_tokens == ((1, "b"),)
    assert parse_tagged(tagged.render()).segments == tagged.segments


def test_insertion_before_first_token():
    assert apply_plan(["a"], plan((-1, I))).render() == "(INSERTION) a"


def test_out_of_range_plan():
    with pytest.raises(PlanError):
        apply_plan(["a"], plan((3, S)))


def test_plan_validation():
    with pytest.raises(PlanError):
        plan((1, S), (1, D))
    with pytest.raises(PlanError):
        plan((-1, S))


def test_apply_keeps_surface_forms():
    seq = tokenize("I took a Tylenol, thanks.")
    assert apply_plan(seq, plan((1, S), (2, S), (3, S))).render() == "I {took a Tylenol,} thanks."


@given(
    st.lists(st.sampled_from(["a", "b", "c", "dd"]), min_size=1, max_size=15),
    st.floats(0, 1),
    st.integers(0, 2**32),
)
def test_strip_and_restore_reproduces_tokens(tokens, rate, seed):
    p = sample_error_plan(tokens, ErrorProfile(rate, {S: 0.4, D: 0.3, I: 0.3}), seed)
    tagged = apply_plan(tokens, p)
    kept = iter(tagged.words)
    deleted = dict(tagged.deleted_tokens)
    restored = [deleted[i] if i in deleted else next(kept) for i in range(len(tokens))]
    assert restored == tokens
    assert tagged.insertion_count == len(p.indices(I))


def test_plan_json_round_trip():
    p = ErrorPlan(((0, S), (-1, I), (4, D)), rng_seed=3, profile_ref="abc")
    assert ErrorPlan.from_dict(p.to_dict()) == p


# -- decoration --------------------------------------------------------------


def test_decorate_tylenol():
    clean, noisy = decorate_example_pair("I took a Tylenol", "I shook tie-and-all")
    assert clean.render() == "I {took a Tylenol}"
    assert noisy.render() == "I {shook tie-and-all}"


def test_decorate_diarrhea():
    clean, noisy = decorate_example_pair(
        "I just had some diarrhea for the last three days",
        "I just had some diary for the last three days",
    )
    assert clean.render() == "I just had some {diarrhea} for the last three days"
    assert noisy.render() == "I just had some {diary} for the last three days"


def test_decorate_identical():
    clean, noisy = decorate_example_pair("same words here", "same words here")
    assert clean.is_plain and noisy.is_plain


def test_decorate_deletion_and_insertion():
    clean, noisy = decorate_example_pair("a b c d", "a c d e")
    assert clean.render() == "a c d (INSERTION)"
    assert clean.deleted_tokens == ((1, "b"),)
    assert noisy.render() == "a c d {e}"
