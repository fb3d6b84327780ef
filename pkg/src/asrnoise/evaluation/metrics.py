"""Transcript-level metrics: Rouge-L and gazetteer entity F1."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, NamedTuple, Sequence

from ..alignment import EmptyReferenceError
from .lexicon import EntityLexicon, LexiconError


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> PRF:
    """LCS precision/recall/F1 (beta = 1).

    Raises:
        EmptyReferenceError: the reference has no tokens.
    """
    if not len(reference):
        raise EmptyReferenceError("Rouge-L needs a non-empty reference")
    lcs = lcs_length(list(candidate), list(reference))
    p = lcs / len(candidate) if len(candidate) else 0.0
    r = lcs / len(reference)
    return PRF(p, r, _f1(p, r))


def corpus_rouge_l(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> PRF:
    """Token-pooled Rouge-L over (candidate, reference) pairs."""
    lcs = cand = ref = 0
    for c, r in pairs:
        lcs += lcs_length(list(c), list(r))
        cand += len(c)
        ref += len(r)
    if ref == 0:
        raise EmptyReferenceError("Rouge-L needs a non-empty reference")
    p = lcs / cand if cand else 0.0
    r = lcs / ref
    return PRF(p, r, _f1(p, r))


def _prf_from_counts(overlap: int, n_cand: int, n_ref: int) -> PRF:
    if n_cand == 0 and n_ref == 0:
        return PRF(1.0, 1.0, 1.0)
    p = overlap / n_cand if n_cand else 0.0
    r = overlap / n_ref if n_ref else 0.0
    return PRF(p, r, _f1(p, r))


def entity_counts(candidate: Sequence[str], reference: Sequence[str], lexicon: EntityLexicon) -> tuple[int, int, int]:
    if not lexicon.terms:
        raise LexiconError("entity F1 needs a non-empty lexicon")
    cand = Counter(lexicon.find(candidate))
    ref = Counter(lexicon.find(reference))
    return sum((cand & ref).values()), sum(cand.values()), sum(ref.values())


def entity_f1(candidate: Sequence[str], reference: Sequence[str], lexicon: EntityLexicon) -> PRF:
    """Multiset overlap of lexicon entities found in both token sequences.

    When neither side mentions any entity the score is (1, 1, 1).

    Raises:
        LexiconError: the lexicon is empty.
    """
    return _prf_from_counts(*entity_counts(candidate, reference, lexicon))


def corpus_entity_f1(pairs: Iterable[tuple[Sequence[str], Sequence[str]]], lexicon: EntityLexicon) -> PRF:
    overlap = n_cand = n_ref = 0
    for c, r in pairs:
        o, nc, nr = entity_counts(c, r, lexicon)
        overlap += o
        n_cand += nc
        n_ref += nr
    return _prf_from_counts(overlap, n_cand, n_ref)
