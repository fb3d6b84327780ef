"""Gazetteer of domain-specific entities, matched by greedy longest match."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from ..transcript import DEFAULT_POLICY, NormalizationPolicy, tokenize


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class EntityLexicon:
    terms: frozenset[tuple[str, ...]]
    label: str = "entities"

    def __post_init__(self):
        object.__setattr__(self, "terms", frozenset(tuple(t) for t in self.terms))
        if any(not t or any(not w for w in t) for t in self.terms):
            raise LexiconError("lexicon terms must be non-empty")

    @classmethod
    def from_strings(
        cls, terms: Iterable[str], label: str = "entities", policy: NormalizationPolicy = DEFAULT_POLICY
    ) -> "EntityLexicon":
        normalized = set()
        for term in terms:
            toks = tokenize(term, policy).tokens
            if toks:
                normalized.add(toks)
        return cls(frozenset(normalized), label)

    @property
    def max_len(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term) -> bool:
        if isinstance(term, str):
            term = tokenize(term).tokens
        return tuple(term) in self.terms

    def find(self, tokens: Sequence[str]) -> list[tuple[str, ...]]:
        """Left-to-right greedy longest-match entity extraction."""
        tokens = list(tokens)
        found = []
        longest = self.max_len
        i = 0
        while i < len(tokens):
            for width in range(min(longest, len(tokens) - i), 0, -1):
                cand = tuple(tokens[i:i + width])
                if cand in self.terms:
                    found.append(cand)
                    i += width
                    break
            else:
                i += 1
        return found


def load_lexicon(path=None, label: str | None = None) -> EntityLexicon:
    """Read a UTF-8 term list (one term per line, ``#`` comments).

    With no path the bundled clinical term list is used.
    """
    if path is None:
        text = resources.files("asrnoise").joinpath("data/medical_terms.txt").read_text(encoding="utf-8")
        label = label or "medical"
    else:
        text = Path(path).read_text(encoding="utf-8")
        label = label or Path(path).stem
    terms = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            terms.append(line)
    lexicon = EntityLexicon.from_strings(terms, label)
    if not lexicon.terms:
        raise LexiconError(f"lexicon {label!r} has no terms")
    return lexicon
