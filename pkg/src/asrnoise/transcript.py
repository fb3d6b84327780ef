"""Dialogue data model, word normalization and JSONL corpus ingestion."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

INSERTION_TOKEN = "(INSERTION)"
_METACHARS = re.compile(r"[{}]")
_CHUNK = re.compile(r"\S+")


class CorpusError(ValueError):
    """A corpus file could not be ingested."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class DuplicateIdError(CorpusError):
    pass


def strip_tag_metacharacters(text: str) -> str:
    """Remove braces and literal insertion markers so tag syntax stays unambiguous."""
    text = text.replace(INSERTION_TOKEN, " ")
    text = _METACHARS.sub(" ", text)
    return " ".join(text.split())


@dataclass(frozen=True)
class Turn:
    speaker: str
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("turn text is empty")
        if _METACHARS.search(self.text) or INSERTION_TOKEN in self.text:
            raise ValueError(f"turn text contains tag metacharacters: {self.text!r}")

    @classmethod
    def ingest(cls, speaker: str, text: str) -> "Turn":
        return cls(normalize_speaker(speaker), strip_tag_metacharacters(text))

    def to_dict(self) -> dict:
        return {"speaker": self.speaker, "text": self.text}


def normalize_speaker(label: str) -> str:
    label = (label or "other").strip()
    if label.lower() in ("doctor", "patient"):
        return label.lower()
    return label or "other"


@dataclass(frozen=True)
class Dialogue:
    id: str
    turns: tuple[Turn, ...]

    def __post_init__(self):
        if not self.turns:
            raise ValueError(f"dialogue {self.id!r} has no turns")
        object.__setattr__(self, "turns", tuple(self.turns))

    @classmethod
    def from_dict(cls, record: dict, skip_empty: bool = False) -> "Dialogue":
        if not isinstance(record, dict):
            raise ValueError("dialogue record must be a JSON object")
        if "id" not in record or "turns" not in record:
            raise ValueError("dialogue record needs 'id' and 'turns'")
        turns = []
        for turn in record["turns"]:
            if not isinstance(turn, dict) or "text" not in turn:
                raise ValueError("turn record needs 'text'")
            if skip_empty and not strip_tag_metacharacters(str(turn["text"])):
                continue
            turns.append(Turn.ingest(turn.get("speaker", "other"), str(turn["text"])))
        return cls(str(record["id"]), tuple(turns))

    def to_dict(self) -> dict:
        return {"id": self.id, "turns": [t.to_dict() for t in self.turns]}

    @property
    def text(self) -> str:
        return " ".join(t.text for t in self.turns)


@dataclass(frozen=True)
class NormalizationPolicy:
    """How raw text is turned into comparable word tokens.

    The default lowercases and keeps apostrophes and hyphens only when they
    sit between two alphanumeric characters.
    """

    lowercase: bool = True
    keep_apostrophes: bool = True
    keep_hyphens: bool = True

    @property
    def version(self) -> str:
        flags = []
        if not self.lowercase:
            flags.append("case")
        if not self.keep_apostrophes:
            flags.append("noapos")
        if not self.keep_hyphens:
            flags.append("nohyph")
        return "v1" if not flags else "v1+" + "+".join(flags)

    def normalize_word(self, chunk: str) -> str:
        if self.lowercase:
            chunk = chunk.lower()
        keep = ""
        if self.keep_apostrophes:
            keep += "'"
        if self.keep_hyphens:
            keep += "-"
        out = []
        last = len(chunk) - 1
        for i, ch in enumerate(chunk):
            if ch.isalnum():
                out.append(ch)
            elif ch in keep and 0 < i < last and chunk[i - 1].isalnum() and chunk[i + 1].isalnum():
                out.append(ch)
        return "".join(out)


DEFAULT_POLICY = NormalizationPolicy()


@dataclass(frozen=True)
class TokenSequence:
    """Normalized tokens plus the character span each came from in ``text``."""

    tokens: tuple[str, ...]
    spans: tuple[tuple[int, int], ...] = ()
    text: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "spans", tuple(tuple(s) for s in self.spans))
        if self.spans and len(self.spans) != len(self.tokens):
            raise ValueError("span map length differs from token count")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def surface(self, i: int) -> str:
        """Original spelling of token ``i`` (falls back to the normalized form)."""
        if self.text is not None and self.spans:
            start, end = self.spans[i]
            return self.text[start:end]
        return self.tokens[i]

    @classmethod
    def of(cls, tokens: Iterable[str]) -> "TokenSequence":
        return cls(tuple(tokens))


def tokenize(text: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> TokenSequence:
    tokens = []
    spans = []
    for m in _CHUNK.finditer(text):
        word = policy.normalize_word(m.group())
        if word:
            tokens.append(word)
            spans.append(m.span())
    return TokenSequence(tuple(tokens), tuple(spans), text)


def check_unique_ids(dialogues: Sequence[Dialogue], path: str | None = None) -> None:
    seen = set()
    for dialogue in dialogues:
        if dialogue.id in seen:
            raise DuplicateIdError(f"duplicate dialogue id {dialogue.id!r}", path=path)
        seen.add(dialogue.id)


def _read_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON: {exc.msg}", lineno, str(path)) from None


def load_corpus(path, format: str = "jsonl") -> list[Dialogue]:
    """Read a corpus file, one dialogue per line, preserving file order.

    Raises:
        CorpusError: a line does not parse as a dialogue.
        DuplicateIdError: two lines share an id.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    path = Path(path)
    dialogues = []
    seen: dict[str, int] = {}
    for lineno, record in _read_jsonl(path):
        try:
            dialogue = Dialogue.from_dict(record)
        except ValueError as exc:
            raise CorpusError(str(exc), lineno, str(path)) from None
        if dialogue.id in seen:
            raise DuplicateIdError(
                f"duplicate dialogue id {dialogue.id!r} (first seen on line {seen[dialogue.id]})",
                lineno,
                str(path),
            )
        seen[dialogue.id] = lineno
        dialogues.append(dialogue)
    return dialogues


def dump_jsonl(records: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=False) + "\n")


def save_corpus(dialogues: Iterable[Dialogue], path, meta: dict | None = None) -> None:
    records = []
    for d in dialogues:
        record = d.to_dict()
        if meta:
            record["meta"] = meta
        records.append(record)
    dump_jsonl(records, path)


def load_paired_corpus(path, hypothesis_path=None) -> list[tuple[Dialogue, Dialogue]]:
    """Load (reference, hypothesis) dialogue pairs.

    Either a single file whose lines hold ``reference`` and ``hypothesis``
    dialogues, or two parallel corpus files joined on id (reference order).
    """
    if hypothesis_path is not None:
        refs = load_corpus(path)
        hyps = {d.id: d for d in load_corpus(hypothesis_path)}
        missing = [d.id for d in refs if d.id not in hyps]
        if missing:
            raise CorpusError(f"hypothesis corpus lacks ids: {', '.join(missing)}", path=str(hypothesis_path))
        return [(d, hyps[d.id]) for d in refs]

    path = Path(path)
    pairs = []
    seen = set()
    for lineno, record in _read_jsonl(path):
        try:
            pid = str(record["id"])
            ref = Dialogue.from_dict({"id": pid, **_sub(record, "reference")})
            # ASR output can legitimately be empty for a turn
            hyp = Dialogue.from_dict({"id": pid, **_sub(record, "hypothesis")}, skip_empty=True)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"malformed paired record: {exc}", lineno, str(path)) from None
        if pid in seen:
            raise DuplicateIdError(f"duplicate dialogue id {pid!r}", lineno, str(path))
        seen.add(pid)
        pairs.append((ref, hyp))
    return pairs


def _sub(record: dict, key: str) -> dict:
    sub = record[key]
    if not isinstance(sub, dict):
        raise TypeError(f"{key!r} must be a dialogue object")
    return {k: v for k, v in sub.items() if k != "id"}


def save_paired_corpus(pairs: Iterable[tuple[Dialogue, Dialogue]], path) -> None:
    dump_jsonl(
        (
            {
                "id": ref.id,
                "reference": {"turns": [t.to_dict() for t in ref.turns]},
                "hypothesis": {"turns": [t.to_dict() for t in hyp.turns]},
            }
            for ref, hyp in pairs
        ),
        path,
    )


@dataclass
class TurnPair:
    """Reference/hypothesis text units aligned together."""

    dialogue_id: str
    turn_index: int | None
    reference: str
    hypothesis: str
    speaker: str = field(default="other")


def pair_turns(reference: Dialogue, hypothesis: Dialogue) -> list[TurnPair]:
    """Pair turns by index; mismatched turn counts fall back to one whole-dialogue unit."""
    if len(reference.turns) == len(hypothesis.turns):
        return [
            TurnPair(reference.id, i, r.text, h.text, r.speaker)
            for i, (r, h) in enumerate(zip(reference.turns, hypothesis.turns))
        ]
    return [TurnPair(reference.id, None, reference.text, hypothesis.text)]
