"""Cross-corpus similarity matrices (ASR corpora as rows, synthetic corpora as columns)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..error_profile import ErrorProfile, estimate_profile, profile_distance
from ..transcript import DEFAULT_POLICY, Dialogue, NormalizationPolicy, pair_turns, tokenize
from .lexicon import EntityLexicon, load_lexicon
from .metrics import corpus_entity_f1, corpus_rouge_l

METRICS = ("profile_distance", "wer_agreement", "rouge_l_cross", "entity_f1_cross")
LOWER_IS_BETTER = {"profile_distance"}


class IdMismatchError(ValueError):
    def __init__(self, label: str, missing: Sequence[str]):
        self.label = label
        self.missing = list(missing)
        super().__init__(f"corpus {label!r} is missing dialogue ids: {', '.join(self.missing)}")


@dataclass
class SimilarityMatrix:
    row_labels: list[str]
    col_labels: list[str]
    cells: list[list[float]]
    metric_name: str

    def __post_init__(self):
        if len(self.cells) != len(self.row_labels):
            raise ValueError("row count does not match row labels")
        for row in self.cells:
            if len(row) != len(self.col_labels):
                raise ValueError("column count does not match column labels")
            if not all(math.isfinite(v) for v in row):
                raise ValueError("similarity cells must be finite")

    @property
    def higher_is_better(self) -> bool:
        return self.metric_name not in LOWER_IS_BETTER

    def best_in_row(self, i: int) -> int:
        row = self.cells[i]
        pick = max if self.higher_is_better else min
        return row.index(pick(row))

    def best_in_column(self, j: int) -> int:
        col = [row[j] for row in self.cells]
        pick = max if self.higher_is_better else min
        return col.index(pick(col))

    def diagonal_dominant(self, strict: bool = True) -> bool:
        """True when every row's best cell is its diagonal cell."""
        n = min(len(self.row_labels), len(self.col_labels))
        for i in range(n):
            diag = self.cells[i][i]
            for j, v in enumerate(self.cells[i]):
                if j == i:
                    continue
                better = v > diag if self.higher_is_better else v < diag
                if better or (strict and v == diag):
                    return False
        return True

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_name,
            "higher_is_better": self.higher_is_better,
            "rows": self.row_labels,
            "columns": self.col_labels,
            "cells": self.cells,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.metric_name] + self.col_labels)
        for label, row in zip(self.row_labels, self.cells):
            writer.writerow([label] + [f"{v:.6f}" for v in row])
        return buf.getvalue()


def check_ids(label: str, corpus: Sequence[Dialogue], reference: Sequence[Dialogue]) -> None:
    have = {d.id for d in corpus}
    missing = [d.id for d in reference if d.id not in have]
    if missing:
        raise IdMismatchError(label, missing)


def _token_pairs(candidate: Sequence[Dialogue], reference: Sequence[Dialogue], policy):
    by_id = {d.id: d for d in candidate}
    for ref in reference:
        for unit in pair_turns(ref, by_id[ref.id]):
            yield tokenize(unit.hypothesis, policy).tokens, tokenize(unit.reference, policy).tokens


def similarity_matrix(
    synthetic: Mapping[str, Sequence[Dialogue]],
    asr: Mapping[str, Sequence[Dialogue]],
    reference: Sequence[Dialogue],
    metric: str = "profile_distance",
    lexicon: EntityLexicon | None = None,
    policy: NormalizationPolicy = DEFAULT_POLICY,
) -> SimilarityMatrix:
    """Score how closely each synthetic corpus (column) matches each ASR corpus (row).

    ``profile_distance`` and ``wer_agreement`` compare error profiles measured
    against the clean reference; ``rouge_l_cross`` and ``entity_f1_cross``
    compare the two noisy corpora to each other directly.

    Raises:
        IdMismatchError: a corpus lacks some reference dialogue ids.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    for label, corpus in list(asr.items()) + list(synthetic.items()):
        check_ids(label, corpus, reference)

    profiles: dict[tuple[str, str], ErrorProfile] = {}

    def profile_of(side: str, label: str, corpus) -> ErrorProfile:
        key = (side, label)
        if key not in profiles:
            by_id = {d.id: d for d in corpus}
            profiles[key] = estimate_profile([(r, by_id[r.id]) for r in reference], label, policy)
        return profiles[key]

    if metric == "entity_f1_cross" and lexicon is None:
        lexicon = load_lexicon()

    rows = []
    for a_label, a_corpus in asr.items():
        row = []
        for s_label, s_corpus in synthetic.items():
            if metric == "profile_distance":
                value = profile_distance(profile_of("asr", a_label, a_corpus), profile_of("syn", s_label, s_corpus))
            elif metric == "wer_agreement":
                a = profile_of("asr", a_label, a_corpus).wer
                s = profile_of("syn", s_label, s_corpus).wer
                value = 1.0 - abs(a - s)
            elif metric == "rouge_l_cross":
                value = corpus_rouge_l(_token_pairs(s_corpus, a_corpus, policy)).f1
            else:
                value = corpus_entity_f1(_token_pairs(s_corpus, a_corpus, policy), lexicon).f1
            row.append(float(value))
        rows.append(row)
    return SimilarityMatrix(list(asr), list(synthetic), rows, metric)
