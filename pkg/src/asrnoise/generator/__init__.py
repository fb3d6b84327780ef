from .client import HttpChatClient, LLMClient, TransportError
from .fallback import fallback_corrupt, mutate_word
from .pipeline import (
    ConfigError,
    GenerationConfig,
    GenerationRecord,
    Outcome,
    RetryPolicy,
    generate_corpus,
    generate_utterance,
    select_examples,
)
from .prompt import DEFAULT_SYSTEM_TEMPLATE, PromptBundle, PromptError, build_prompt
from .validate import ValidationResult, validate_candidate

__all__ = [
    "ConfigError",
    "DEFAULT_SYSTEM_TEMPLATE",
    "GenerationConfig",
    "GenerationRecord",
    "HttpChatClient",
    "LLMClient",
    "Outcome",
    "PromptBundle",
    "PromptError",
    "RetryPolicy",
    "TransportError",
    "ValidationResult",
    "build_prompt",
    "fallback_corrupt",
    "generate_corpus",
    "generate_utterance",
    "mutate_word",
    "select_examples",
    "validate_candidate",
]
