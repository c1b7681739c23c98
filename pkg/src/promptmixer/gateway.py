"""Completion backends: a live HTTP chat endpoint and a deterministic stub.

The gateway never rewrites a chain; it transmits the compiled messages and
sampling parameters verbatim and retries only transient transport failures.
Credentials come from an environment variable and are never logged.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass

import requests

from .compiler import PromptChain
from .errors import (
    AuthFailedError,
    BackendError,
    ConfigError,
    GatewayError,
    GatewayTimeoutError,
    RateLimitedError,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompletionRequest:
    chain: PromptChain
    timeout_ms: int = 30_000
    retry_budget: int = 2

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ConfigError("timeout must be positive")
        if self.retry_budget < 0:
            raise ConfigError("retry budget cannot be negative")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    backend_id: str
    latency_ms: int
    sampling: dict
    retries: int = 0

    def __post_init__(self):
        if not self.text:
            raise BackendError("backend returned an empty completion")


class StubBackend:
    """Offline backend: a pure function of the chain bytes.

    The reply is assembled from the tile words plus filler picked by the
    chain digest, and coarsely honors the length and sarcasm clauses so a
    demo without network still reacts to the knobs.
    """

    id = "stub"

    _FILLER = (
        "hums", "drifts", "unravels", "sharpens", "echoes", "blooms",
        "fractures", "settles", "wanders", "ignites", "dissolves", "turns",
    )

    # substrings of shipped clause templates -> tone words echoed back
    _TONE_MARKERS = (
        ("optimist", "bright"),
        ("pessimist", "bleak"),
        ("imagina", "dreamlike"),
        ("practical", "plain"),
        ("command", "firm"),
        ("submissive", "meek"),
        ("playful", "teasing"),
        ("serious", "solemn"),
        ("trust", "open"),
        ("suspici", "guarded"),
        ("sarcas", "wry"),
        ("hysteria", "frantic"),
        ("panic", "frantic"),
        ("anxious", "uneasy"),
        ("malevolen", "dark"),
        ("benevolen", "kind"),
    )

    def complete(self, chain: PromptChain, timeout_ms: int = 0) -> str:
        data = chain.to_bytes()
        digest = hashlib.sha256(data).digest()
        words = chain.user_text.split()
        system = chain.system_text.lower()

        if "exactly one word" in system:
            pool = words or list(self._FILLER)
            return pool[digest[0] % len(pool)]

        tones = [tone for marker, tone in self._TONE_MARKERS if marker in system]
        verb = self._FILLER[digest[1] % len(self._FILLER)]
        lead = f"{' and '.join(tones[:2])}, " if tones else ""
        body = f"{lead}{chain.user_text} {verb}".strip()
        sentence = body[0].upper() + body[1:] + "."
        if "multiple paragraphs" in system:
            second = self._FILLER[digest[2] % len(self._FILLER)]
            sentence += f"\n\nIt {second} again, {' '.join(reversed(words))}."
        if "sarcas" in system:
            sentence += " How original."
        return sentence


def stub_complete(chain: PromptChain) -> str:
    return StubBackend().complete(chain)


class HttpBackend:
    """Chat-completion HTTP backend.

    Request body: ``{"model", "messages": [{"role", "content"}...],
    "temperature"?}``; the first choice's ``message.content`` is the reply.
    Empty system messages (mixerless chains) are omitted on the wire.
    """

    def __init__(self, endpoint: str, model: str,
                 credential_env: str = "PROMPTMIXER_API_KEY",
                 backend_id: str = "http"):
        self.endpoint = endpoint
        self.model = model
        self.credential_env = credential_env
        self.id = backend_id

    def complete(self, chain: PromptChain, timeout_ms: int = 30_000) -> str:
        credential = os.environ.get(self.credential_env)
        if not credential:
            raise AuthFailedError(
                f"no credential in ${self.credential_env}"
            )
        body = {
            "model": self.model,
            "messages": [
                {"role": role, "content": text}
                for role, text in chain.messages
                if text
            ],
        }
        if chain.sampling.get("temperature") is not None:
            body["temperature"] = chain.sampling["temperature"]
        try:
            response = requests.post(
                self.endpoint,
                json=body,
                headers={"Authorization": f"Bearer {credential}"},
                timeout=timeout_ms / 1000,
            )
        except requests.Timeout as exc:
            raise GatewayTimeoutError(str(exc)) from exc
        except requests.RequestException as exc:
            raise BackendError(f"transport failure: {exc}") from exc

        if response.status_code in (401, 403):
            raise AuthFailedError(f"backend rejected credential "
                                  f"({response.status_code})")
        if response.status_code == 429:
            raise RateLimitedError("backend rate limit")
        if response.status_code >= 400:
            raise BackendError(f"backend returned {response.status_code}",
                               status=response.status_code)
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError) as exc:
            raise BackendError(f"malformed backend response: {exc}") from exc


@dataclass
class Gateway:
    """Retry wrapper around a backend; one logical completion per call."""

    backend: object
    backoff_base_s: float = 0.5
    clock: callable = time.monotonic
    sleep: callable = time.sleep

    def complete(self, request: CompletionRequest) -> CompletionResult:
        """Run the chain; retry transient failures with exponential backoff.

        Auth failures and client-side backend errors are never retried.
        """
        started = self.clock()
        attempt = 0
        while True:
            try:
                text = self.backend.complete(request.chain,
                                             timeout_ms=request.timeout_ms)
                latency_ms = int((self.clock() - started) * 1000)
                return CompletionResult(
                    text=text,
                    backend_id=self.backend.id,
                    latency_ms=latency_ms,
                    sampling=dict(request.chain.sampling),
                    retries=attempt,
                )
            except GatewayError as exc:
                if not exc.retryable or attempt >= request.retry_budget:
                    raise
                delay = self.backoff_base_s * (2 ** attempt)
                log.warning("completion attempt %d failed (%s); retrying in %.2fs",
                            attempt + 1, exc.code, delay)
                self.sleep(delay)
                attempt += 1
