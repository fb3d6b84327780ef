"""HTTP chat-completion client for the noise-generating model."""

from __future__ import annotations

import logging
import os
from typing import Protocol

import requests

logger = logging.getLogger(__name__)


class TransportError(RuntimeError):
    """The endpoint could not be reached or returned an unusable response."""


class LLMClient(Protocol):
    def complete(self, messages: list[dict]) -> str: ...


def extract_path(payload, path: str):
    """Follow a dotted path such as ``choices.0.message.content``."""
    node = payload
    for part in path.split("."):
        if isinstance(node, list):
            try:
                node = node[int(part)]
            except (ValueError, IndexError):
                raise KeyError(path) from None
        elif isinstance(node, dict):
            node = node[part]
        else:
            raise KeyError(path)
    return node


class HttpChatClient:
    """POSTs ``{"model", "messages", "temperature", "max_tokens"}`` as JSON.

    The bearer token is read from the environment variable named by
    ``api_key_env`` at request time, so it never lands in configs or logs.
    """

    def __init__(
        self,
        url: str,
        model: str = "",
        api_key_env: str | None = "ASRNOISE_API_KEY",
        temperature: float = 0.7,
        max_tokens: int = 256,
        response_path: str = "choices.0.message.content",
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.url = url
        self.model = model
        self.api_key_env = api_key_env
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.response_path = response_path
        self.timeout = timeout
        self.session = session or requests.Session()

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.api_key_env) if self.api_key_env else None
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, messages: list[dict]) -> str:
        body = {
            "model": self.model,
            "messages": [{"role": m["role"], "content": m["content"]} for m in messages],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        try:
            resp = self.session.post(self.url, json=body, headers=self._headers(), timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"request to {self.url} failed: {exc}") from exc
        if resp.status_code >= 400:
            raise TransportError(f"{self.url} returned HTTP {resp.status_code}")
        try:
            text = extract_path(resp.json(), self.response_path)
        except (ValueError, KeyError, TypeError):
            raise TransportError(f"response has no text at {self.response_path!r}") from None
        if not isinstance(text, str):
            raise TransportError(f"value at {self.response_path!r} is not a string")
        return text.strip()
