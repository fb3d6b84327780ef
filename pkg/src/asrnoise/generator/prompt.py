"""Few-shot prompt assembly in the ``### Input`` / ``### Response`` layout."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence, Union

from ..tagging import TaggedText, parse_tagged

DEFAULT_SYSTEM_TEMPLATE = """\
You imitate the mistakes an automatic speech recognition (ASR) system makes when it transcribes spoken conversation. Each input sentence carries tags that say where to make mistakes and which kind.

Tags:
- Words inside curly braces { } must be replaced by words that sound alike, the way an ASR system mishears them. Keep the braces around your replacement, e.g. {wheezy} can become {weesy}.
- The marker (INSERTION) must be replaced by one to three short, common words. Never insert medical terms such as drug names, symptoms or procedures.
- Words to be deleted have already been removed; do not add them back.
- Copy every word outside the tags exactly as given.

Answer with the corrupted sentence only."""


class PromptError(ValueError):
    pass


Example = tuple[Union[TaggedText, str], Union[TaggedText, str]]


def _rendered(x: TaggedText | str) -> str:
    return x.render() if isinstance(x, TaggedText) else str(x)


@dataclass(frozen=True)
class PromptBundle:
    system_instruction: str
    examples: tuple[tuple[str, str], ...]
    query: str

    def __post_init__(self):
        if not self.examples:
            raise PromptError("a prompt needs at least one in-context example")
        if not self.query.strip():
            raise PromptError("prompt query is empty")

    def user_content(self) -> str:
        blocks = [f"### Input: {clean}\n### Response: {noisy}" for clean, noisy in self.examples]
        blocks.append(f"### Input: {self.query}\n### Response:")
        return "\n\n".join(blocks)

    def render(self) -> str:
        return f"### System Prompt:\n{self.system_instruction}\n\n{self.user_content()}"

    def messages(self) -> list[dict]:
        return [
            {"role": "system", "content": self.system_instruction},
            {"role": "user", "content": self.user_content()},
        ]

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.render().encode("utf-8")).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "system_instruction": self.system_instruction,
            "examples": [list(e) for e in self.examples],
            "query": self.query,
        }


def build_prompt(
    examples: Sequence[Example],
    tagged_query: TaggedText | str,
    template: str = DEFAULT_SYSTEM_TEMPLATE,
) -> PromptBundle:
    """Assemble the system instruction, rendered example pairs and the query.

    Raises:
        PromptError: no examples, or an example that does not parse as tagged text.
    """
    if not examples:
        raise PromptError("a prompt needs at least one in-context example")
    rendered = []
    for clean, noisy in examples:
        pair = (_rendered(clean), _rendered(noisy))
        for side in pair:
            parse_tagged(side)
        rendered.append(pair)
    return PromptBundle(template, tuple(rendered), _rendered(tagged_query))


def extract_query(user_content: str) -> str:
    """Recover the final ``### Input:`` line from a rendered user message."""
    marker = "### Input:"
    idx = user_content.rfind(marker)
    if idx < 0:
        raise PromptError("no '### Input:' block found")
    rest = user_content[idx + len(marker):]
    return rest.split("\n### Response:", 1)[0].strip()
