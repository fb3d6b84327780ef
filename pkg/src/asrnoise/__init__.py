"""Measure ASR word-error profiles and generate synthetic ASR-like noisy dialogues."""

from .alignment import EditKind, EditOp, EditScript, ErrorCounts, align, error_counts, word_error_rate
from .error_profile import ErrorProfile, estimate_profile, joint_error_probability, profile_distance
from .tagging import (
    ErrorPlan,
    InsertionMarker,
    Plain,
    SubstitutionSpan,
    TaggedText,
    TagSyntaxError,
    apply_plan,
    decorate_example_pair,
    parse_tagged,
    sample_error_plan,
)
from .transcript import Dialogue, NormalizationPolicy, TokenSequence, Turn, load_corpus, save_corpus, tokenize

__version__ = "0.1.0"

__all__ = [
    "Dialogue",
    "EditKind",
    "EditOp",
    "EditScript",
    "ErrorCounts",
    "ErrorPlan",
    "ErrorProfile",
    "InsertionMarker",
    "NormalizationPolicy",
    "Plain",
    "SubstitutionSpan",
    "TagSyntaxError",
    "TaggedText",
    "TokenSequence",
    "Turn",
    "align",
    "apply_plan",
    "decorate_example_pair",
    "error_counts",
    "estimate_profile",
    "joint_error_probability",
    "load_corpus",
    "parse_tagged",
    "profile_distance",
    "sample_error_plan",
    "save_corpus",
    "tokenize",
    "word_error_rate",
]
