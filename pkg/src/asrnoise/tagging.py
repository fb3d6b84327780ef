"""Error-tag syntax: plan sampling, tag application, example decoration, parsing.

Tag syntax, bit-exact:

* ``{w1 w2}``   words the model must replace with similar-sounding words
* ``(INSERTION)`` a position where a generic word must be added
* deletions carry no tag; the words are removed before prompting
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .alignment import EditKind, align
from .error_profile import ErrorProfile
from .transcript import DEFAULT_POLICY, INSERTION_TOKEN, NormalizationPolicy, TokenSequence, Turn, tokenize

MASK64 = (1 << 64) - 1


class TagSyntaxError(ValueError):
    """Malformed tagged text. ``code`` is one of
    ``unbalanced-brace``, ``nested-brace``, ``empty-span``."""

    def __init__(self, code: str, message: str, position: int | None = None):
        self.code = code
        self.position = position
        super().__init__(f"{code}: {message}")


class PlanError(ValueError):
    pass


def _check_word(word: str) -> None:
    if not word or any(c.isspace() for c in word) or "{" in word or "}" in word or word == INSERTION_TOKEN:
        raise ValueError(f"invalid word for tagged text: {word!r}")


@dataclass(frozen=True)
class Plain:
    words: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if not self.words:
            raise ValueError("plain segment is empty")
        for w in self.words:
            _check_word(w)

    def render(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class SubstitutionSpan:
    words: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if not self.words:
            raise ValueError("substitution span is empty")
        for w in self.words:
            _check_word(w)

    def render(self) -> str:
        return "{" + " ".join(self.words) + "}"


@dataclass(frozen=True)
class InsertionMarker:
    def render(self) -> str:
        return INSERTION_TOKEN


Segment = Union[Plain, SubstitutionSpan, InsertionMarker]


def merge_plain(segments: Iterable[Segment]) -> tuple[Segment, ...]:
    out: list[Segment] = []
    for seg in segments:
        if isinstance(seg, Plain) and out and isinstance(out[-1], Plain):
            out[-1] = Plain(out[-1].words + seg.words)
        else:
            out.append(seg)
    return tuple(out)


@dataclass(frozen=True)
class TaggedText:
    segments: tuple[Segment, ...]
    deleted_tokens: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", merge_plain(self.segments))
        object.__setattr__(self, "deleted_tokens", tuple((int(i), str(t)) for i, t in self.deleted_tokens))

    def render(self) -> str:
        return " ".join(seg.render() for seg in self.segments)

    __str__ = render

    @property
    def words(self) -> list[str]:
        """Every word with tags stripped (insertion markers dropped)."""
        out: list[str] = []
        for seg in self.segments:
            if not isinstance(seg, InsertionMarker):
                out.extend(seg.words)
        return out

    def plain_text(self) -> str:
        return " ".join(self.words)

    @property
    def spans(self) -> list[SubstitutionSpan]:
        return [s for s in self.segments if isinstance(s, SubstitutionSpan)]

    @property
    def insertion_count(self) -> int:
        return sum(isinstance(s, InsertionMarker) for s in self.segments)

    @property
    def is_plain(self) -> bool:
        return all(isinstance(s, Plain) for s in self.segments)


def render(tagged: TaggedText) -> str:
    return tagged.render()


def parse_tagged(text: str) -> TaggedText:
    """Parse the tag syntax back into segments.

    Raises:
        TagSyntaxError: unbalanced or nested braces, or an empty ``{}`` span.
    """
    segments: list[Segment] = []
    buf: list[str] = []
    open_at = None

    def flush_outside(chunk: str) -> None:
        for word in chunk.split():
            if word == INSERTION_TOKEN:
                segments.append(InsertionMarker())
            else:
                segments.append(Plain((word,)))

    for pos, ch in enumerate(text):
        if ch == "{":
            if open_at is not None:
                raise TagSyntaxError("nested-brace", f"'{{' at {pos} inside span opened at {open_at}", pos)
            flush_outside("".join(buf))
            buf = []
            open_at = pos
        elif ch == "}":
            if open_at is None:
                raise TagSyntaxError("unbalanced-brace", f"'}}' at {pos} has no opening brace", pos)
            words = "".join(buf).split()
            if not words:
                raise TagSyntaxError("empty-span", f"empty span at {open_at}", open_at)
            segments.append(SubstitutionSpan(tuple(words)))
            buf = []
            open_at = None
        else:
            buf.append(ch)
    if open_at is not None:
        raise TagSyntaxError("unbalanced-brace", f"span opened at {open_at} is never closed", open_at)
    flush_outside("".join(buf))
    return TaggedText(tuple(segments))


def strip_tags(text: str) -> str:
    return parse_tagged(text).plain_text()


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed from a master seed and identifying parts.

    Uses BLAKE2b so results do not depend on Python's salted ``hash``.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed) & MASK64).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int) -> np.random.Generator:
    # PCG64 streams are identical across platforms for a given seed.
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


@dataclass(frozen=True)
class ErrorPlan:
    """Per-token error decisions. An insertion at index ``i`` goes after token ``i``
    (``-1`` means before the first token)."""

    decisions: tuple[tuple[int, EditKind], ...]
    rng_seed: int = 0
    profile_ref: str = ""

    def __post_init__(self):
        decisions = tuple(sorted((int(i), EditKind(k)) for i, k in self.decisions))
        seen = set()
        for i, k in decisions:
            if k is EditKind.MATCH:
                raise PlanError("plans hold error decisions only")
            if i in seen:
                raise PlanError(f"more than one decision for token {i}")
            if i < 0 and not (i == -1 and k is EditKind.INSERTION):
                raise PlanError(f"invalid index {i} for {k.value}")
            seen.add(i)
        object.__setattr__(self, "decisions", decisions)

    def __len__(self) -> int:
        return len(self.decisions)

    def as_dict(self) -> dict[int, EditKind]:
        return dict(self.decisions)

    def indices(self, kind: EditKind) -> list[int]:
        return [i for i, k in self.decisions if k is kind]

    def to_dict(self) -> dict:
        return {
            "decisions": [[i, k.value] for i, k in self.decisions],
            "rng_seed": self.rng_seed,
            "profile_ref": self.profile_ref,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "ErrorPlan":
        return cls(
            tuple((int(i), EditKind(k)) for i, k in record["decisions"]),
            int(record.get("rng_seed", 0)),
            str(record.get("profile_ref", "")),
        )


def sample_error_plan(tokens: Sequence[str], profile: ErrorProfile, seed: int) -> ErrorPlan:
    """Mark each token corrupted with probability ``min(wer, 1)`` and draw its
    error type from the profile's conditional distribution."""
    n = len(tokens)
    rng = make_rng(seed)
    corrupt_draw = rng.random(n)
    kind_draw = rng.random(n)
    kinds = [k for k, p in profile.conditional.items() if p > 0.0]
    thresholds = np.cumsum([profile.conditional[k] for k in kinds])
    if len(thresholds):
        thresholds[-1] = np.inf
    rate = profile.corruption_rate
    decisions = []
    for i in np.flatnonzero(corrupt_draw < rate):
        slot = int(np.searchsorted(thresholds, kind_draw[i], side="right"))
        decisions.append((int(i), kinds[slot]))
    return ErrorPlan(tuple(decisions), int(seed) & MASK64, profile.fingerprint)


def _surface(tokens: TokenSequence | Sequence[str], i: int) -> str:
    if isinstance(tokens, TokenSequence):
        word = tokens.surface(i)
        try:
            _check_word(word)
        except ValueError:
            return tokens.tokens[i]
        return word
    return tokens[i]


def apply_plan(tokens: TokenSequence | Sequence[str], plan: ErrorPlan) -> TaggedText:
    """Render ``tokens`` with the plan's tags, keeping original spellings.

    Consecutive substituted tokens share one brace span; deleted tokens are
    dropped from the output and listed in ``deleted_tokens``.

    Raises:
        PlanError: a decision index lies outside the token range.
    """
    n = len(tokens)
    decisions = plan.as_dict()
    for i in decisions:
        if i >= n:
            raise PlanError(f"decision index {i} out of range for {n} tokens")
    segments: list[Segment] = []
    deleted = []
    span: list[str] = []

    def close_span():
        if span:
            segments.append(SubstitutionSpan(tuple(span)))
            span.clear()

    if decisions.get(-1) is EditKind.INSERTION:
        segments.append(InsertionMarker())
    for i in range(n):
        kind = decisions.get(i)
        word = _surface(tokens, i)
        if kind is EditKind.SUBSTITUTION:
            span.append(word)
            continue
        close_span()
        if kind is EditKind.DELETION:
            deleted.append((i, word))
        else:
            segments.append(Plain((word,)))
            if kind is EditKind.INSERTION:
                segments.append(InsertionMarker())
    close_span()
    return TaggedText(tuple(segments), tuple(deleted))


def decorate_example_pair(
    clean: Turn | str, noisy: Turn | str, policy: NormalizationPolicy = DEFAULT_POLICY
) -> tuple[TaggedText, TaggedText]:
    """Tag a (clean, ASR) utterance pair from their word alignment.

    Each maximal run of consecutive non-matching positions becomes one
    braced span on both sides when it contains a substitution (so a
    substitution next to a deletion reads as one multi-word confusion).
    Runs of pure deletions are removed from the clean side and recorded;
    runs of pure insertions put one ``(INSERTION)`` per inserted word on
    the clean side and the braced inserted word on the noisy side.
    """
    clean_text = clean.text if isinstance(clean, Turn) else clean
    noisy_text = noisy.text if isinstance(noisy, Turn) else noisy
    ref = tokenize(clean_text, policy)
    hyp = tokenize(noisy_text, policy)
    script = align(ref.tokens, hyp.tokens)

    clean_segs: list[Segment] = []
    noisy_segs: list[Segment] = []
    deleted = []
    ops = script.ops
    k = 0
    while k < len(ops):
        op = ops[k]
        if op.kind is EditKind.MATCH:
            clean_segs.append(Plain((_surface(ref, op.ref_index),)))
            noisy_segs.append(Plain((_surface(hyp, op.hyp_index),)))
            k += 1
            continue
        run = []
        while k < len(ops) and ops[k].kind is not EditKind.MATCH:
            run.append(ops[k])
            k += 1
        kinds = {o.kind for o in run}
        ref_words = [_surface(ref, o.ref_index) for o in run if o.ref_index is not None]
        hyp_words = [_surface(hyp, o.hyp_index) for o in run if o.hyp_index is not None]
        if EditKind.SUBSTITUTION in kinds or kinds == {EditKind.DELETION, EditKind.INSERTION}:
            clean_segs.append(SubstitutionSpan(tuple(ref_words)))
            noisy_segs.append(SubstitutionSpan(tuple(hyp_words)))
        elif kinds == {EditKind.DELETION}:
            deleted.extend((o.ref_index, _surface(ref, o.ref_index)) for o in run)
        else:
            for word in hyp_words:
                clean_segs.append(InsertionMarker())
                noisy_segs.append(SubstitutionSpan((word,)))
    return TaggedText(tuple(clean_segs), tuple(deleted)), TaggedText(tuple(noisy_segs))
