"""Rule-based offline corruptor used when no model endpoint is available."""

from __future__ import annotations

from ..tagging import InsertionMarker, SubstitutionSpan, TaggedText, make_rng
from ..transcript import DEFAULT_POLICY

# sound-alike confusions, keyed by normalized word
HOMOPHONES: dict[str, tuple[str, ...]] = {
    "wheezy": ("weesy",),
    "tylenol": ("tie-and-all",),
    "diarrhea": ("diary", "diure"),
    "white": ("whish",),
    "spots": ("spits",),
    "throat": ("throt", "throws"),
    "redness": ("readiness", "reddness"),
    "noticed": ("notice",),
    "you": ("ya",),
    "your": ("yer", "you're"),
    "back": ("bak",),
    "took": ("shook",),
    "stool": ("stall",),
    "stools": ("stalls",),
    "toilet": ("toy-let",),
    "stomach": ("stomack",),
    "know": ("no",),
    "no": ("know",),
    "there": ("their",),
    "their": ("there",),
    "two": ("to", "too"),
    "to": ("two",),
    "for": ("four",),
    "four": ("for",),
    "hear": ("here",),
    "here": ("hear",),
    "right": ("write",),
    "week": ("weak",),
    "weak": ("week",),
    "pain": ("pane",),
    "sore": ("saw",),
    "flu": ("flew",),
    "cough": ("cuff",),
    "chest": ("chess",),
    "ibuprofen": ("i-be-profen",),
    "paracetamol": ("para-seat-amol",),
    "nausea": ("nosier",),
    "fever": ("fiver",),
    "headache": ("head-ache",),
    "allergies": ("allergy's",),
    "tablets": ("tablet's",),
    "mild": ("milled",),
    "would": ("wood",),
    "been": ("bean",),
}

FILLERS = ("uh", "um", "so", "and", "like", "well", "yeah", "oh", "just", "the")

_VOWEL_SHIFT = {"a": "e", "e": "i", "i": "e", "o": "u", "u": "o", "y": "i"}


def _valid(candidate: str, original: str) -> bool:
    return bool(candidate) and candidate != original and DEFAULT_POLICY.normalize_word(candidate) == candidate


def _vowel_swap(word: str, rng) -> str | None:
    spots = [i for i, ch in enumerate(word) if ch in _VOWEL_SHIFT]
    if not spots:
        return None
    i = spots[int(rng.integers(len(spots)))]
    return word[:i] + _VOWEL_SHIFT[word[i]] + word[i + 1:]


def _consonants(word: str) -> list[int]:
    return [i for i, ch in enumerate(word) if ch.isalpha() and ch not in "aeiouy"]


def _double_consonant(word: str, rng) -> str | None:
    spots = _consonants(word)
    if not spots:
        return None
    i = spots[int(rng.integers(len(spots)))]
    return word[:i + 1] + word[i] + word[i + 1:]


def _drop_consonant(word: str, rng) -> str | None:
    spots = _consonants(word)
    if not spots or len(word) < 2:
        return None
    i = spots[int(rng.integers(len(spots)))]
    return word[:i] + word[i + 1:]


_MUTATIONS = (_vowel_swap, _double_consonant, _drop_consonant)


def mutate_word(word: str, rng) -> str:
    """Return a sound-alike misspelling of ``word`` that normalizes differently."""
    key = DEFAULT_POLICY.normalize_word(word) or word.lower()
    options = HOMOPHONES.get(key)
    if options:
        return options[int(rng.integers(len(options)))]
    for idx in rng.permutation(len(_MUTATIONS)):
        out = _MUTATIONS[int(idx)](key, rng)
        if out is not None and _valid(out, key):
            return out
    return key + "h"


def fallback_corrupt(tagged: TaggedText, seed: int) -> str:
    """Realize a tagged sentence without a model.

    Braced words get a pseudo-phonetic mutation and stay braced; each
    insertion marker becomes one filler word that is not one of the
    sentence's deleted words. Plain words are copied verbatim.
    """
    rng = make_rng(seed)
    deleted = {DEFAULT_POLICY.normalize_word(t) for _, t in tagged.deleted_tokens}
    fillers = [f for f in FILLERS if f not in deleted]
    out = []
    for seg in tagged.segments:
        if isinstance(seg, SubstitutionSpan):
            out.append("{" + " ".join(mutate_word(w, rng) for w in seg.words) + "}")
        elif isinstance(seg, InsertionMarker):
            out.append(fillers[int(rng.integers(len(fillers)))])
        else:
            out.append(seg.render())
    return " ".join(out)
