"""Chat-completion providers: live HTTP, record, and replay."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Protocol

import httpx

log = logging.getLogger(__name__)

DEFAULT_API_BASE = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4o"


class ProviderError(RuntimeError):
    pass


class TransportError(ProviderError):
    def __init__(self, message: str, status: Optional[int] = None):
        super().__init__(message if status is None else f"{message} (HTTP {status})")
        self.status = status


class AuthError(ProviderError):
    pass


class ReplayExhausted(ProviderError):
    pass


class ReplayMismatch(ProviderError):
    pass


@dataclass(frozen=True)
class GenerationRequest:
    user_prompt: str
    system_role: str = ""
    temperature: float = 0.0
    top_p: float = 1.0
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError(f"temperature must lie in [0, 1], got {self.temperature}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p must lie in (0, 1], got {self.top_p}")

    def fingerprint(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def messages(self) -> list[dict]:
        msgs = []
        if self.system_role:
            msgs.append({"role": "system", "content": self.system_role})
        msgs.append({"role": "user", "content": self.user_prompt})
        return msgs


class Provider(Protocol):
    name: str

    def complete(self, request: GenerationRequest) -> str: ...


def complete(request: GenerationRequest, provider: Provider) -> str:
    return provider.complete(request)


@dataclass(frozen=True)
class TranscriptEntry:
    fingerprint: str
    response: str


@dataclass
class Transcript:
    entries: list[TranscriptEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> str:
        return json.dumps([asdict(e) for e in self.entries], indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        raw = json.loads(text)
        if not isinstance(raw, list):
            raise ValueError("transcript must be a JSON array")
        return cls([TranscriptEntry(str(r["fingerprint"]), str(r["response"])) for r in raw])

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Transcript":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


class LiveProvider:
    """OpenAI-style ``/chat/completions`` client.

    Configuration falls back to ``TGEN_API_KEY``, ``TGEN_API_BASE`` and
    ``TGEN_MODEL``. Transport failures are retried with exponential backoff;
    authentication failures are not.
    """

    def __init__(
        self,
        api_key: Optional[str] = None,
        base_url: Optional[str] = None,
        model: Optional[str] = None,
        timeout: float = 60.0,
        attempts: int = 3,
        backoff: float = 1.0,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.api_key = api_key if api_key is not None else os.environ.get("TGEN_API_KEY")
        self.base_url = (base_url or os.environ.get("TGEN_API_BASE") or DEFAULT_API_BASE).rstrip("/")
        self.model = model or os.environ.get("TGEN_MODEL") or DEFAULT_MODEL
        self.timeout = timeout
        self.attempts = max(1, attempts)
        self.backoff = backoff
        self._transport = transport
        self.name = f"live:{self.model}"

    def _post(self, client: httpx.Client, body: dict) -> httpx.Response:
        return client.post(
            f"{self.base_url}/chat/completions",
            json=body,
            headers={"Authorization": f"Bearer {self.api_key}"},
        )

    def complete(self, request: GenerationRequest) -> str:
        if not self.api_key:
            raise AuthError("no API credential; set TGEN_API_KEY")
        body = {
            "model": self.model,
            "messages": request.messages(),
            "temperature": request.temperature,
            "top_p": request.top_p,
            "frequency_penalty": request.frequency_penalty,
            "presence_penalty": request.presence_penalty,
        }
        last: Optional[TransportError] = None
        with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
            for attempt in range(self.attempts):
                if attempt:
                    time.sleep(self.backoff * 2 ** (attempt - 1))
                try:
                    resp = self._post(client, body)
                except httpx.HTTPError as exc:
                    last = TransportError(f"request failed: {exc}")
                    log.warning("transport error on attempt %d: %s", attempt + 1, exc)
                    continue
                if resp.status_code in (401, 403):
                    raise AuthError(f"credential rejected (HTTP {resp.status_code})")
                if resp.status_code >= 400:
                    last = TransportError("provider returned an error", resp.status_code)
                    log.warning("HTTP %d on attempt %d", resp.status_code, attempt + 1)
                    continue
                try:
                    return resp.json()["choices"][0]["message"]["content"]
                except (ValueError, KeyError, IndexError, TypeError) as exc:
                    raise TransportError(f"unexpected response shape: {exc}", resp.status_code) from exc
        assert last is not None
        raise last


class RecordingProvider:
    """Wraps another provider and keeps every (fingerprint, response) pair."""

    def __init__(self, inner: Provider):
        self.inner = inner
        self.name = inner.name
        self.session: list[TranscriptEntry] = []

    def complete(self, request: GenerationRequest) -> str:
        response = self.inner.complete(request)
        self.session.append(TranscriptEntry(request.fingerprint(), response))
        return response


def record_transcript(session: RecordingProvider) -> Transcript:
    return Transcript(list(session.session))


class ReplayProvider:
    """Serves recorded responses strictly in order."""

    def __init__(self, transcript: Transcript, check_fingerprints: bool = True):
        self.transcript = transcript
        self.check_fingerprints = check_fingerprints
        self.position = 0
        self.name = "replay"

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "ReplayProvider":
        return cls(Transcript.load(path))

    @property
    def remaining(self) -> int:
        return len(self.transcript) - self.position

    def complete(self, request: GenerationRequest) -> str:
        if self.position >= len(self.transcript):
            raise ReplayExhausted(f"transcript exhausted after {self.position} calls")
        entry = self.transcript.entries[self.position]
        if self.check_fingerprints and entry.fingerprint != request.fingerprint():
            raise ReplayMismatch(
                f"call {self.position}: request fingerprint {request.fingerprint()[:12]} "
                f"does not match recorded {entry.fingerprint[:12]}"
            )
        self.position += 1
        return entry.response
