"""Clients for the text and speech models the pipeline calls out to.

Two protocols: text completion (QA generation, judging) and speech question
answering (answering over an audio span). HTTP backends speak a chat-style
JSON API; stub backends return scripted responses for tests and demos.
Responses can be cached on disk keyed by request content, which makes
reruns deterministic and cheap.
"""

from __future__ import annotations

import abc
import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, TypeVar

import requests

T = TypeVar("T")


class ClientError(RuntimeError):
    """A model call failed after exhausting retries."""


class TextLLMClient(abc.ABC):
    @abc.abstractmethod
    def complete(self, prompt: str) -> str:
        """Returns the model's text response for a prompt."""


class SpeechLLMClient(abc.ABC):
    @abc.abstractmethod
    def answer(self, audio_uri: str, start_s: float, end_s: float, question: str) -> str:
        """Answers a question about one span of one audio clip."""


def _api_key(api_key_env: str | None) -> str | None:
    if not api_key_env:
        return None
    key = os.environ.get(api_key_env)
    if not key:
        raise ClientError(f"environment variable {api_key_env} is not set")
    return key


@dataclass
class HTTPTextClient(TextLLMClient):
    """Chat-completions endpoint: POST {model, messages} -> choices[0]."""

    endpoint: str
    model: str
    api_key_env: str | None = None
    temperature: float | None = None
    timeout_s: float = 120.0

    def complete(self, prompt: str) -> str:
        payload: dict = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        if self.temperature is not None:
            payload["temperature"] = self.temperature
        headers = {"Content-Type": "application/json"}
        key = _api_key(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = requests.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout_s)
            resp.raise_for_status()
            body = resp.json()
            return body["choices"][0]["message"]["content"]
        except (requests.RequestException, KeyError, IndexError, TypeError, ValueError) as exc:
            raise ClientError(f"text completion against {self.endpoint} failed: {exc}") from None


@dataclass
class HTTPSpeechClient(SpeechLLMClient):
    """Speech QA endpoint: POST {model, question, audio_uri, span} -> {answer}."""

    endpoint: str
    model: str
    api_key_env: str | None = None
    timeout_s: float = 300.0

    def answer(self, audio_uri: str, start_s: float, end_s: float, question: str) -> str:
        payload = {
            "model": self.model,
            "question": question,
            "audio_uri": audio_uri,
            "start_s": start_s,
            "end_s": end_s,
        }
        headers = {"Content-Type": "application/json"}
        key = _api_key(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = requests.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout_s)
            resp.raise_for_status()
            body = resp.json()
            return str(body["answer"])
        except (requests.RequestException, KeyError, TypeError, ValueError) as exc:
            raise ClientError(f"speech answer against {self.endpoint} failed: {exc}") from None


@dataclass
class StubTextClient(TextLLMClient):
    """Scripted client: responses keyed by substring, else a default.

    ``fail_first`` makes the first N calls raise, for retry tests.
    """

    responses: Mapping[str, str] = field(default_factory=dict)
    default: str = ""
    fail_first: int = 0
    calls: list[str] = field(default_factory=list)

    def complete(self, prompt: str) -> str:
        self.calls.append(prompt)
        if len(self.calls) <= self.fail_first:
            raise ClientError(f"scripted failure {len(self.calls)}")
        for needle, response in self.responses.items():
            if needle in prompt:
                return response
        return self.default


@dataclass
class StubSpeechClient(SpeechLLMClient):
    """Deterministic canned answers; echoes the span so tests can assert it."""

    responses: Mapping[str, str] = field(default_factory=dict)
    fail_first: int = 0
    calls: list[tuple[str, float, float, str]] = field(default_factory=list)

    def answer(self, audio_uri: str, start_s: float, end_s: float, question: str) -> str:
        self.calls.append((audio_uri, start_s, end_s, question))
        if len(self.calls) <= self.fail_first:
            raise ClientError(f"scripted failure {len(self.calls)}")
        if question in self.responses:
            return self.responses[question]
        return f"answer[{audio_uri} {start_s:.2f}-{end_s:.2f}]: {question}"


class ResponseCache:
    """Content-addressed response store: one JSON file per request."""

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def _key(request: dict) -> str:
        blob = json.dumps(request, sort_keys=True, ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def get(self, request: dict) -> str | None:
        path = self.cache_dir / f"{self._key(request)}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))["response"]

    def put(self, request: dict, response: str) -> None:
        path = self.cache_dir / f"{self._key(request)}.json"
        path.write_text(
            json.dumps({"request": request, "response": response}, ensure_ascii=False, indent=2),
            encoding="utf-8",
        )


@dataclass
class CachedTextClient(TextLLMClient):
    inner: TextLLMClient
    cache: ResponseCache
    tag: str = "text"

    def complete(self, prompt: str) -> str:
        request = {"kind": self.tag, "prompt": prompt}
        hit = self.cache.get(request)
        if hit is not None:
            return hit
        response = self.inner.complete(prompt)
        self.cache.put(request, response)
        return response


@dataclass
class CachedSpeechClient(SpeechLLMClient):
    inner: SpeechLLMClient
    cache: ResponseCache

    def answer(self, audio_uri: str, start_s: float, end_s: float, question: str) -> str:
        request = {
            "kind": "speech",
            "audio_uri": audio_uri,
            "start_s": start_s,
            "end_s": end_s,
            "question": question,
        }
        hit = self.cache.get(request)
        if hit is not None:
            return hit
        response = self.inner.answer(audio_uri, start_s, end_s, question)
        self.cache.put(request, response)
        return response


def call_with_retry(
    fn: Callable[[], T],
    retries: int = 2,
    backoff_s: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[T, int]:
    """Calls fn, retrying on ClientError; returns (result, attempts used).

    Backoff doubles per retry. The last error propagates once retries are
    exhausted.
    """
    if retries < 0:
        raise ValueError(f"retries = {retries} must be >= 0")
    attempt = 0
    while True:
        try:
            return fn(), attempt
        except ClientError:
            if attempt >= retries:
                raise
            sleep(backoff_s * (2.0 ** attempt))
            attempt += 1
