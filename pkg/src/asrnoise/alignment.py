"""Wagner-Fischer word alignment, typed edit scripts and word error rate."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence


class EditKind(str, enum.Enum):
    MATCH = "match"
    SUBSTITUTION = "substitution"
    DELETION = "deletion"
    INSERTION = "insertion"


ERROR_KINDS = (EditKind.SUBSTITUTION, EditKind.DELETION, EditKind.INSERTION)

_M, _S, _D, _I = 0, 1, 2, 3
_KINDS = (EditKind.MATCH, EditKind.SUBSTITUTION, EditKind.DELETION, EditKind.INSERTION)


class EmptyReferenceError(ValueError):
    pass


class EditOp(NamedTuple):
    """One aligned position; deletions carry only ``ref_index``, insertions only ``hyp_index``."""

    kind: EditKind
    ref_index: int | None
    hyp_index: int | None


@dataclass(frozen=True)
class EditScript:
    ops: tuple[EditOp, ...]
    ref_len: int
    hyp_len: int

    @property
    def cost(self) -> int:
        return sum(1 for op in self.ops if op.kind is not EditKind.MATCH)

    def counts(self) -> "ErrorCounts":
        return error_counts(self)


@dataclass(frozen=True)
class ErrorCounts:
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    matches: int = 0
    ref_len: int = 0

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def __add__(self, other: "ErrorCounts") -> "ErrorCounts":
        return ErrorCounts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.matches + other.matches,
            self.ref_len + other.ref_len,
        )

    def of_kind(self, kind: EditKind) -> int:
        return {
            EditKind.SUBSTITUTION: self.substitutions,
            EditKind.DELETION: self.deletions,
            EditKind.INSERTION: self.insertions,
            EditKind.MATCH: self.matches,
        }[kind]

    @property
    def wer(self) -> float:
        if self.ref_len == 0:
            raise EmptyReferenceError("word error rate undefined for an empty reference")
        return self.errors / self.ref_len


def align(reference: Sequence[str], hypothesis: Sequence[str]) -> EditScript:
    """Minimal unit-cost alignment of two token sequences.

    Costs are kept in two rolling rows; a byte table of back-pointers records
    the preferred predecessor of every cell. Ties prefer the diagonal
    (match/substitution), then deletion, then insertion, so the script is
    reproducible.
    """
    ref = list(reference)
    hyp = list(hypothesis)
    n, m = len(ref), len(hyp)
    width = m + 1
    back = bytearray(b"\x03" * width) + bytearray((n) * width)
    prev = list(range(width))
    for i in range(1, n + 1):
        r = ref[i - 1]
        cur = [i] + [0] * m
        row = i * width
        back[row] = _D
        for j in range(1, width):
            if r == hyp[j - 1]:
                diag = prev[j - 1]
                code = _M
            else:
                diag = prev[j - 1] + 1
                code = _S
            up = prev[j] + 1
            left = cur[j - 1] + 1
            if diag <= up and diag <= left:
                cur[j] = diag
                back[row + j] = code
            elif up <= left:
                cur[j] = up
                back[row + j] = _D
            else:
                cur[j] = left
                back[row + j] = _I
        prev = cur

    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        code = back[i * width + j]
        if code <= _S:
            i -= 1
            j -= 1
            ops.append(EditOp(_KINDS[code], i, j))
        elif code == _D:
            i -= 1
            ops.append(EditOp(EditKind.DELETION, i, None))
        else:
            j -= 1
            ops.append(EditOp(EditKind.INSERTION, None, j))
    ops.reverse()
    return EditScript(tuple(ops), n, m)


def error_counts(script: EditScript) -> ErrorCounts:
    tally = [0, 0, 0, 0]
    for op in script.ops:
        tally[_KINDS.index(op.kind)] += 1
    return ErrorCounts(
        substitutions=tally[_S],
        deletions=tally[_D],
        insertions=tally[_I],
        matches=tally[_M],
        ref_len=script.ref_len,
    )


def word_error_rate(script: EditScript) -> float:
    """(S + D + I) / reference length; can exceed 1 when insertions dominate."""
    if script.ref_len == 0:
        raise EmptyReferenceError("word error rate undefined for an empty reference")
    return script.cost / script.ref_len
