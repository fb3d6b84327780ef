"""Error profiles of ASR systems: corruption rate and error-type distribution."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .alignment import ERROR_KINDS, EditKind, ErrorCounts, align, error_counts
from .transcript import DEFAULT_POLICY, Dialogue, NormalizationPolicy, pair_turns, tokenize

_TOL = 1e-9


class ProfileError(ValueError):
    pass


class EmptyCorpusError(ProfileError):
    pass


class PolicyMismatchError(ProfileError):
    pass


def _uniform() -> dict[EditKind, float]:
    return {k: 1.0 / 3.0 for k in ERROR_KINDS}


@dataclass(frozen=True)
class ErrorProfile:
    """Per-word corruption probability plus P(error type | corrupted).

    ``wer`` may exceed 1 (insertion-heavy systems); :attr:`corruption_rate`
    is the value clamped to [0, 1] that sampling uses.
    """

    wer: float
    conditional: Mapping[EditKind, float] = field(default_factory=_uniform)
    token_count: int = 0
    source_label: str = ""
    normalization_policy_version: str = DEFAULT_POLICY.version
    zero_error: bool = False
    unit_costs: bool = True

    def __post_init__(self):
        cond = {EditKind(k): float(v) for k, v in dict(self.conditional).items()}
        if EditKind.MATCH in cond:
            raise ProfileError("conditional distribution cannot contain 'match'")
        for kind in ERROR_KINDS:
            cond.setdefault(kind, 0.0)
        for kind, p in cond.items():
            if not (0.0 <= p <= 1.0) or math.isnan(p):
                raise ProfileError(f"conditional probability for {kind.value} out of range: {p}")
        total = sum(cond.values())
        if abs(total - 1.0) > _TOL:
            raise ProfileError(f"conditional probabilities sum to {total}, expected 1")
        if not (self.wer >= 0.0) or math.isinf(self.wer):
            raise ProfileError(f"wer must be a finite nonnegative number, got {self.wer}")
        object.__setattr__(self, "conditional", {k: cond[k] for k in ERROR_KINDS})

    @property
    def corruption_rate(self) -> float:
        return min(self.wer, 1.0)

    def with_wer(self, wer: float) -> "ErrorProfile":
        return ErrorProfile(
            wer=wer,
            conditional=self.conditional,
            token_count=self.token_count,
            source_label=self.source_label,
            normalization_policy_version=self.normalization_policy_version,
            zero_error=self.zero_error,
            unit_costs=self.unit_costs,
        )

    def to_dict(self) -> dict:
        return {
            "wer": self.wer,
            "conditional": {k.value: self.conditional[k] for k in ERROR_KINDS},
            "token_count": self.token_count,
            "source_label": self.source_label,
            "normalization_policy_version": self.normalization_policy_version,
            "zero_error": self.zero_error,
            "unit_costs": self.unit_costs,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "ErrorProfile":
        try:
            return cls(
                wer=float(record["wer"]),
                conditional={EditKind(k): float(v) for k, v in record["conditional"].items()},
                token_count=int(record.get("token_count", 0)),
                source_label=str(record.get("source_label", "")),
                normalization_policy_version=str(
                    record.get("normalization_policy_version", DEFAULT_POLICY.version)
                ),
                zero_error=bool(record.get("zero_error", False)),
                unit_costs=bool(record.get("unit_costs", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ProfileError):
                raise
            raise ProfileError(f"malformed profile: {exc}") from None

    @property
    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def save_profile(profile: ErrorProfile, path) -> None:
    Path(path).write_text(json.dumps(profile.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_profile(path) -> ErrorProfile:
    try:
        record = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: malformed JSON: {exc.msg}") from None
    return ErrorProfile.from_dict(record)


def count_errors(
    pairs: Iterable[tuple[Dialogue, Dialogue]], policy: NormalizationPolicy = DEFAULT_POLICY
) -> ErrorCounts:
    """Sum per-turn alignment counts over a paired corpus."""
    total = ErrorCounts()
    for ref, hyp in pairs:
        for unit in pair_turns(ref, hyp):
            script = align(tokenize(unit.reference, policy).tokens, tokenize(unit.hypothesis, policy).tokens)
            total = total + error_counts(script)
    return total


def profile_from_counts(
    counts: ErrorCounts, source_label: str = "", policy: NormalizationPolicy = DEFAULT_POLICY
) -> ErrorProfile:
    if counts.ref_len == 0:
        raise EmptyCorpusError("no reference tokens observed")
    errors = counts.errors
    if errors == 0:
        conditional, zero = _uniform(), True
    else:
        conditional = {k: counts.of_kind(k) / errors for k in ERROR_KINDS}
        zero = False
    return ErrorProfile(
        wer=errors / counts.ref_len,
        conditional=conditional,
        token_count=counts.ref_len,
        source_label=source_label,
        normalization_policy_version=policy.version,
        zero_error=zero,
    )


def estimate_profile(
    pairs: Sequence[tuple[Dialogue, Dialogue]],
    source_label: str = "",
    policy: NormalizationPolicy = DEFAULT_POLICY,
) -> ErrorProfile:
    """Estimate an ErrorProfile from (reference, hypothesis) dialogue pairs.

    WER is pooled over the corpus; the conditional distribution is the share
    of each error type among all errors. A corpus with no errors yields a
    uniform conditional and ``zero_error=True``.

    Raises:
        EmptyCorpusError: no pairs, or no reference tokens.
    """
    if not pairs:
        raise EmptyCorpusError("cannot estimate a profile from an empty corpus")
    return profile_from_counts(count_errors(pairs, policy), source_label, policy)


def joint_error_probability(profile: ErrorProfile, kind: EditKind) -> float:
    """Probability that a given word is tagged with ``kind``."""
    kind = EditKind(kind)
    if kind is EditKind.MATCH:
        raise ProfileError("joint probability is defined for error kinds only")
    return profile.conditional[kind] * profile.corruption_rate


def total_variation(p: Mapping[EditKind, float], q: Mapping[EditKind, float]) -> float:
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in ERROR_KINDS)


def profile_distance(a: ErrorProfile, b: ErrorProfile) -> float:
    """|WER difference| plus total-variation distance of the conditionals.

    Raises:
        PolicyMismatchError: the profiles were measured under different
            normalization policies and are not comparable.
    """
    if a.normalization_policy_version != b.normalization_policy_version:
        raise PolicyMismatchError(
            f"normalization policies differ: {a.normalization_policy_version} vs "
            f"{b.normalization_policy_version}"
        )
    return abs(a.wer - b.wer) + total_variation(a.conditional, b.conditional)
