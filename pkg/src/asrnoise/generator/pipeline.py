"""Synthetic noisy corpus generation: plan, tag, prompt, validate, repair."""

from __future__ import annotations

import enum
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from ..alignment import EditKind
from ..error_profile import ErrorProfile, count_errors, profile_from_counts
from ..tagging import ErrorPlan, TaggedText, apply_plan, derive_seed, make_rng, sample_error_plan
from ..transcript import DEFAULT_POLICY, Dialogue, NormalizationPolicy, TokenSequence, Turn, tokenize
from .client import LLMClient, TransportError
from .fallback import fallback_corrupt
from .prompt import DEFAULT_SYSTEM_TEMPLATE, Example, PromptBundle, build_prompt
from .validate import validate_candidate

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class Outcome(str, enum.Enum):
    ACCEPTED = "accepted"
    REPAIRED_BY_FALLBACK = "repaired_by_fallback"
    FAILED = "failed"


@dataclass(frozen=True)
class RetryPolicy:
    retries: int = 2
    fallback: bool = True

    def __post_init__(self):
        if self.retries < 0:
            raise ConfigError("retry limit must be >= 0")

    @property
    def max_attempts(self) -> int:
        return self.retries + 1


@dataclass
class GenerationRecord:
    dialogue_id: str
    turn_index: int
    plan: ErrorPlan
    prompt: PromptBundle | None
    raw_output: str
    accepted_text: str
    verdict: Outcome
    attempt_count: int
    reasons: list[str] = field(default_factory=list)
    copy_index: int = 0
    transport_failures: int = 0
    query: str = ""

    def to_dict(self) -> dict:
        return {
            "dialogue_id": self.dialogue_id,
            "turn_index": self.turn_index,
            "copy_index": self.copy_index,
            "plan": self.plan.to_dict(),
            "query": self.query or (self.prompt.query if self.prompt else ""),
            "prompt_digest": self.prompt.digest if self.prompt else None,
            "raw_output": self.raw_output,
            "accepted_text": self.accepted_text,
            "verdict": self.verdict.value,
            "attempt_count": self.attempt_count,
            "reasons": self.reasons,
        }


@dataclass
class GenerationConfig:
    master_seed: int = 0
    examples_k: int = 4
    example_strategy: str = "random"
    multiplicity: int = 1
    retries: int = 2
    fallback: bool = True
    concurrency: int = 1
    system_template: str = DEFAULT_SYSTEM_TEMPLATE
    policy: NormalizationPolicy = DEFAULT_POLICY
    lexicon: object = None

    def validate(self) -> None:
        if self.retries < 0:
            raise ConfigError("retry limit must be >= 0")
        if self.concurrency < 1:
            raise ConfigError("concurrency limit must be >= 1")
        if self.multiplicity < 1:
            raise ConfigError("multiplicity must be >= 1")
        if self.examples_k < 1:
            raise ConfigError("examples_k must be >= 1")
        if self.example_strategy not in ("first", "random"):
            raise ConfigError(f"unknown example strategy {self.example_strategy!r}")

    @property
    def retry_policy(self) -> RetryPolicy:
        return RetryPolicy(self.retries, self.fallback)

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "examples_k": self.examples_k,
            "example_strategy": self.example_strategy,
            "multiplicity": self.multiplicity,
            "retries": self.retries,
            "fallback": self.fallback,
            "system_template_sha": hashlib.sha256(self.system_template.encode()).hexdigest()[:16],
            "normalization_policy_version": self.policy.version,
        }


def config_hash(settings: dict) -> str:
    return hashlib.sha256(json.dumps(settings, sort_keys=True).encode()).hexdigest()[:16]


def select_examples(pool: Sequence[Example], k: int, strategy: str = "random", seed: int = 0) -> list[Example]:
    """Pick ``k`` in-context examples: the first ``k`` or a seeded random subset (pool order kept)."""
    if not pool:
        raise ConfigError("no in-context examples available")
    if k >= len(pool):
        return list(pool)
    if strategy == "first":
        return list(pool[:k])
    chosen = make_rng(derive_seed(seed, "examples")).choice(len(pool), size=k, replace=False)
    return [pool[int(i)] for i in sorted(chosen)]


def generate_utterance(
    bundle: PromptBundle | None,
    client: LLMClient | None,
    policy: RetryPolicy,
    plan: ErrorPlan,
    original: TokenSequence,
    tagged: TaggedText | None = None,
    *,
    dialogue_id: str = "",
    turn_index: int = 0,
    seed: int = 0,
    lexicon=None,
) -> GenerationRecord:
    """Ask the model for one corrupted utterance, retrying on invalid output.

    With ``client=None`` the rule-based corruptor is used directly. Transport
    errors are recorded as rejection reasons and count as failed attempts.
    """
    if tagged is None:
        tagged = apply_plan(original, plan)
    reasons: list[str] = []
    raw = ""
    attempts = 0
    transport_failures = 0
    if client is not None:
        if bundle is None:
            raise ConfigError("a prompt is required to query a model")
        messages = bundle.messages()
        for _ in range(policy.max_attempts):
            attempts += 1
            try:
                raw = client.complete(messages)
            except TransportError as exc:
                transport_failures += 1
                reasons.append(f"transport: {exc}")
                continue
            result = validate_candidate(raw, plan, original, lexicon=lexicon)
            if result.accepted:
                return GenerationRecord(
                    dialogue_id, turn_index, plan, bundle, raw, result.text,
                    Outcome.ACCEPTED, attempts, reasons, transport_failures=transport_failures,
                )
            reasons.extend(result.reasons)
        logger.debug("%s/%s: no valid output after %d attempts", dialogue_id, turn_index, attempts)

    if client is None or policy.fallback:
        text = fallback_corrupt(tagged, derive_seed(seed, "fallback"))
        result = validate_candidate(text, plan, original, lexicon=lexicon)
        if result.accepted:
            return GenerationRecord(
                dialogue_id, turn_index, plan, bundle, raw, result.text,
                Outcome.REPAIRED_BY_FALLBACK, attempts, reasons, transport_failures=transport_failures,
            )
        logger.warning("%s/%s: fallback output rejected: %s", dialogue_id, turn_index, result.reasons)
        reasons.extend(result.reasons)
    return GenerationRecord(
        dialogue_id, turn_index, plan, bundle, raw, "",
        Outcome.FAILED, attempts, reasons, transport_failures=transport_failures,
    )


def _keep_nonempty(plan: ErrorPlan, n: int) -> ErrorPlan:
    # A turn cannot become empty: if every token is deleted, the last one is substituted instead.
    if n and len(plan.indices(EditKind.DELETION)) == n:
        decisions = dict(plan.decisions)
        decisions[n - 1] = EditKind.SUBSTITUTION
        return ErrorPlan(tuple(decisions.items()), plan.rng_seed, plan.profile_ref)
    return plan


@dataclass
class _Job:
    dialogue_id: str
    turn_index: int
    copy_index: int
    turn: Turn
    tokens: TokenSequence
    plan: ErrorPlan
    tagged: TaggedText
    seed: int


def synthetic_id(dialogue_id: str, copy_index: int, multiplicity: int) -> str:
    return dialogue_id if multiplicity == 1 else f"{dialogue_id}-syn{copy_index}"


def generate_corpus(
    clean: Sequence[Dialogue],
    examples: Sequence[Example],
    profile: ErrorProfile,
    config: GenerationConfig | None = None,
    client: LLMClient | None = None,
) -> tuple[list[Dialogue], list[GenerationRecord], dict]:
    """Produce ``multiplicity`` noisy copies of every clean dialogue.

    Per-turn seeds come from (master seed, dialogue id, turn index, copy),
    so the output does not depend on request completion order. Turns that
    fail outright keep their clean text and are flagged in the records.

    Returns:
        (synthetic dialogues, per-turn records, summary report)
    """
    config = config or GenerationConfig()
    config.validate()
    if client is None and not config.fallback:
        raise ConfigError("fallback must be enabled when no endpoint is configured")
    if client is not None and not examples:
        raise ConfigError("in-context examples are required to prompt a model")
    chosen = []
    if examples:
        chosen = select_examples(examples, config.examples_k, config.example_strategy, config.master_seed)
    retry = config.retry_policy

    jobs: list[_Job] = []
    for copy in range(config.multiplicity):
        for dialogue in clean:
            for t_idx, turn in enumerate(dialogue.turns):
                seed = derive_seed(config.master_seed, dialogue.id, t_idx, copy)
                tokens = tokenize(turn.text, config.policy)
                plan = _keep_nonempty(sample_error_plan(tokens.tokens, profile, seed), len(tokens))
                jobs.append(_Job(dialogue.id, t_idx, copy, turn, tokens, plan, apply_plan(tokens, plan), seed))

    def run(job: _Job) -> GenerationRecord:
        if not job.plan.decisions:
            # nothing to corrupt: the clean text passes through unchanged
            return GenerationRecord(
                job.dialogue_id, job.turn_index, job.plan, None, "", job.turn.text,
                Outcome.ACCEPTED, 0, copy_index=job.copy_index,
            )
        bundle = build_prompt(chosen, job.tagged, config.system_template) if chosen else None
        record = generate_utterance(
            bundle, client, retry, job.plan, job.tokens, job.tagged,
            dialogue_id=job.dialogue_id, turn_index=job.turn_index, seed=job.seed, lexicon=config.lexicon,
        )
        record.copy_index = job.copy_index
        record.query = job.tagged.render()
        return record

    if client is not None and config.concurrency > 1:
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            records = list(pool.map(run, jobs))
    else:
        records = [run(job) for job in jobs]

    synthetic: list[Dialogue] = []
    by_key = {(r.dialogue_id, r.turn_index, r.copy_index): r for r in records}
    for copy in range(config.multiplicity):
        for dialogue in clean:
            turns = []
            for t_idx, turn in enumerate(dialogue.turns):
                rec = by_key[(dialogue.id, t_idx, copy)]
                text = rec.accepted_text if rec.verdict is not Outcome.FAILED else turn.text
                turns.append(Turn.ingest(turn.speaker, text))
            synthetic.append(Dialogue(synthetic_id(dialogue.id, copy, config.multiplicity), tuple(turns)))

    summary = summarize(clean, synthetic, records, profile, config)
    return synthetic, records, summary


def realized_pairs(clean: Sequence[Dialogue], synthetic: Sequence[Dialogue], multiplicity: int = 1):
    by_id = {d.id: d for d in clean}
    pairs = []
    for syn in synthetic:
        base = syn.id
        if multiplicity > 1:
            base = syn.id.rsplit("-syn", 1)[0]
        pairs.append((by_id[base], syn))
    return pairs


def summarize(clean, synthetic, records, profile: ErrorProfile, config: GenerationConfig) -> dict:
    pairs = realized_pairs(clean, synthetic, config.multiplicity)
    verdicts = {o.value: 0 for o in Outcome}
    for r in records:
        verdicts[r.verdict.value] += 1
    counts = count_errors(pairs, config.policy)
    report = {
        "master_seed": config.master_seed,
        "config_hash": config_hash(config.to_dict()),
        "config": config.to_dict(),
        "target_profile": profile.to_dict(),
        "dialogues": len(synthetic),
        "turns": len(records),
        "verdicts": verdicts,
        "failed_turns": [[r.dialogue_id, r.turn_index, r.copy_index] for r in records if r.verdict is Outcome.FAILED],
        "transport_failures": sum(r.transport_failures for r in records),
        "llm_attempts": sum(r.attempt_count for r in records),
    }
    if counts.ref_len:
        realized = profile_from_counts(counts, "synthetic", config.policy)
        whole = count_errors(
            [(c, Dialogue(s.id, (Turn("other", s.text),))) for c, s in pairs], config.policy
        )
        report["realized"] = {
            "wer": realized.wer,
            "wer_whole_dialogue": whole.wer,
            "conditional": {k.value: v for k, v in realized.conditional.items()},
            "substitutions": counts.substitutions,
            "deletions": counts.deletions,
            "insertions": counts.insertions,
            "reference_tokens": counts.ref_len,
        }
    return report
