"""Acceptance check for a model's corrupted sentence against its error plan."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..alignment import EditKind
from ..tagging import ErrorPlan, InsertionMarker, SubstitutionSpan, TagSyntaxError, parse_tagged
from ..transcript import DEFAULT_POLICY, NormalizationPolicy, TokenSequence

# rejection reason codes
PARSE_ERROR = "parse-error"
UNTAGGED_MODIFIED = "untagged-region-modified"
SUB_NOT_PERFORMED = "substitution-not-performed"
SUB_NOT_BRACED = "substitution-not-braced"
SUB_MISSING = "substitution-missing"
INS_NOT_PERFORMED = "insertion-not-performed"
INS_TOO_LONG = "insertion-too-long"
INS_DOMAIN_TERM = "insertion-domain-term"
DELETED_RESURRECTED = "deleted-token-resurrected"

MAX_INSERTED_WORDS = 3
_MAX_PLAIN_FOR_SPAN_EXTRA = 3


@dataclass(frozen=True)
class ValidationResult:
    accepted: bool
    reasons: tuple[str, ...] = ()
    text: str = ""

    def __bool__(self) -> bool:
        return self.accepted


def _query_items(original: Sequence[str], plan: ErrorPlan):
    """Expected structure: ('word', tok) | ('span', toks) | ('ins', None) | ('gap', tok)."""
    decisions = plan.as_dict()
    items = []
    if decisions.get(-1) is EditKind.INSERTION:
        items.append(("ins", None))
    span: list[str] = []
    for i, tok in enumerate(original):
        kind = decisions.get(i)
        if kind is EditKind.SUBSTITUTION:
            span.append(tok)
            continue
        if span:
            items.append(("span", tuple(span)))
            span = []
        if kind is EditKind.DELETION:
            items.append(("gap", tok))
        else:
            items.append(("word", tok))
            if kind is EditKind.INSERTION:
                items.append(("ins", None))
    if span:
        items.append(("span", tuple(span)))
    return items


def _candidate_items(candidate: str, policy: NormalizationPolicy):
    tagged = parse_tagged(candidate)
    items = []
    for seg in tagged.segments:
        if isinstance(seg, InsertionMarker):
            items.append(("marker", None))
            continue
        words = tuple(w for w in (policy.normalize_word(x) for x in seg.words) if w)
        if isinstance(seg, SubstitutionSpan):
            items.append(("span", words))
        else:
            items.extend(("word", w) for w in words)
    return tagged, items


def _nearby_deleted(items) -> list[set[str]]:
    """For each query position, deleted tokens in the gap runs touching it."""
    n = len(items)
    near = [set() for _ in range(n + 1)]
    for pos in range(n + 1):
        j = pos - 1
        while j >= 0 and items[j][0] == "gap":
            near[pos].add(items[j][1])
            j -= 1
        j = pos
        while j < n and items[j][0] == "gap":
            near[pos].add(items[j][1])
            j += 1
    return near


def validate_candidate(
    candidate: str,
    plan: ErrorPlan,
    original: TokenSequence | Sequence[str],
    lexicon=None,
    policy: NormalizationPolicy = DEFAULT_POLICY,
) -> ValidationResult:
    """Check a corrupted sentence against the plan it was asked to realize.

    The candidate is accepted when it parses, every requested span is braced
    with changed content, each insertion marker became one to three generic
    words, the untagged words are unchanged and no deleted word came back
    next to where it was removed. Rejections list reason codes; this never
    raises.
    """
    tokens = list(original.tokens if isinstance(original, TokenSequence) else original)
    try:
        tagged, cand = _candidate_items(candidate, policy)
    except TagSyntaxError as exc:
        return ValidationResult(False, (f"{PARSE_ERROR}:{exc.code}",))

    query = _query_items(tokens, plan)
    near = _nearby_deleted(query)
    Q, C = len(query), len(cand)
    inf = (float("inf"), float("inf"))
    # cost[q][c]: (violations, generic violations) matching query[q:] against cand[c:];
    # among equally bad explanations prefer the one with the most specific reasons
    cost = [[inf] * (C + 1) for _ in range(Q + 1)]
    choice: list[list[tuple | None]] = [[None] * (C + 1) for _ in range(Q + 1)]
    cost[Q][C] = (0, 0)

    def is_domain(words) -> bool:
        return lexicon is not None and bool(lexicon.find(list(words)))

    for q in range(Q, -1, -1):
        for c in range(C, -1, -1):
            if q == Q and c == C:
                continue
            best, pick = inf, None

            def consider(dq, dc, reason):
                nonlocal best, pick
                if q + dq > Q or c + dc > C:
                    return
                v, g = cost[q + dq][c + dc]
                total = (v + (1 if reason else 0), g + (reason == UNTAGGED_MODIFIED))
                if total < best:
                    best, pick = total, (dq, dc, reason)

            if c < C:
                ctype, cval = cand[c]
                if ctype == "word" and cval in near[q]:
                    consider(0, 1, DELETED_RESURRECTED)
                else:
                    consider(0, 1, UNTAGGED_MODIFIED)
            if q < Q:
                qtype, qval = query[q]
                if qtype == "gap":
                    consider(1, 0, None)
                elif qtype == "word":
                    consider(1, 0, UNTAGGED_MODIFIED)
                    if c < C and cand[c][0] == "word":
                        consider(1, 1, None if cand[c][1] == qval else UNTAGGED_MODIFIED)
                elif qtype == "span":
                    consider(1, 0, SUB_MISSING)
                    if c < C and cand[c][0] == "span":
                        consider(1, 1, SUB_NOT_PERFORMED if cand[c][1] in (qval, ()) else None)
                    for k in range(1, len(qval) + _MAX_PLAIN_FOR_SPAN_EXTRA + 1):
                        if c + k > C or any(t != "word" for t, _ in cand[c:c + k]):
                            break
                        words = tuple(v for _, v in cand[c:c + k])
                        consider(1, k, SUB_NOT_PERFORMED if words == qval else SUB_NOT_BRACED)
                else:  # insertion
                    consider(1, 0, INS_NOT_PERFORMED)
                    around = near[q] | near[q + 1]
                    if c < C and cand[c][0] == "marker":
                        consider(1, 1, INS_NOT_PERFORMED)
                    if c < C and cand[c][0] == "span" and cand[c][1]:
                        consider(1, 1, _inserted_reason(cand[c][1], around, is_domain))
                    for k in range(1, 2 * MAX_INSERTED_WORDS + 1):
                        if c + k > C or any(t != "word" for t, _ in cand[c:c + k]):
                            break
                        words = tuple(v for _, v in cand[c:c + k])
                        consider(1, k, _inserted_reason(words, around, is_domain))
            cost[q][c] = best
            choice[q][c] = pick

    reasons: list[str] = []
    q = c = 0
    while (q, c) != (Q, C):
        dq, dc, reason = choice[q][c]
        if reason and reason not in reasons:
            reasons.append(reason)
        q, c = q + dq, c + dc
    accepted = cost[0][0][0] == 0
    return ValidationResult(accepted, tuple(reasons), tagged.plain_text() if accepted else "")


def _inserted_reason(words, deleted_nearby, is_domain) -> str | None:
    if len(words) > MAX_INSERTED_WORDS:
        return INS_TOO_LONG
    if any(w in deleted_nearby for w in words):
        return DELETED_RESURRECTED
    if is_domain(words):
        return INS_DOMAIN_TERM
    return None
