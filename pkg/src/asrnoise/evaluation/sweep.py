"""Noise-rate sweep: realized noise and transcript quality versus tag rate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..error_profile import ErrorProfile, count_errors
from ..generator.pipeline import GenerationConfig, generate_corpus, realized_pairs
from ..generator.prompt import Example
from ..transcript import Dialogue, pair_turns, tokenize
from .lexicon import EntityLexicon, load_lexicon
from .metrics import corpus_entity_f1, corpus_rouge_l


@dataclass(frozen=True)
class SweepRow:
    scale: float
    wer_parameter: float
    realized_wer: float
    rouge_l_f1: float
    entity_f1: float

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "wer_parameter": self.wer_parameter,
            "realized_wer": self.realized_wer,
            "rouge_l_f1": self.rouge_l_f1,
            "entity_f1": self.entity_f1,
        }


def noise_sweep(
    clean: Sequence[Dialogue],
    base_profile: ErrorProfile,
    scales: Sequence[float],
    config: GenerationConfig | None = None,
    examples: Sequence[Example] = (),
    client=None,
    lexicon: EntityLexicon | None = None,
) -> list[SweepRow]:
    """Generate a synthetic corpus per scale at ``wer = min(scale * base wer, 1)``.

    Every scale reuses the same per-turn seeds, so a higher rate tags a
    superset of the positions tagged at a lower one.
    """
    if not scales:
        raise ValueError("at least one scale is required")
    if any(s < 0 for s in scales):
        raise ValueError("scales must be nonnegative")
    config = config or GenerationConfig()
    lexicon = lexicon or load_lexicon()
    rows = []
    for scale in sorted(scales):
        wer = min(scale * base_profile.wer, 1.0)
        synthetic, _, _ = generate_corpus(clean, examples, base_profile.with_wer(wer), config, client)
        pairs = realized_pairs(clean, synthetic, config.multiplicity)
        counts = count_errors(pairs, config.policy)
        token_pairs = [
            (tokenize(u.hypothesis, config.policy).tokens, tokenize(u.reference, config.policy).tokens)
            for ref, syn in pairs
            for u in pair_turns(ref, syn)
        ]
        rows.append(
            SweepRow(
                scale=float(scale),
                wer_parameter=wer,
                realized_wer=counts.wer,
                rouge_l_f1=corpus_rouge_l(token_pairs).f1,
                entity_f1=corpus_entity_f1(token_pairs, lexicon).f1,
            )
        )
    return rows

