"""Statement similarity providers for node matching."""

from __future__ import annotations

import enum
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import httpx
import numpy as np

DEFAULT_THRESHOLD = 0.75

_TOKEN = re.compile(r"[^0-9a-z]+")


class EndpointError(RuntimeError):
    pass


class SimilarityProvider(str, enum.Enum):
    LEXICAL = "lexical"
    EMBEDDING = "embedding-endpoint"


@dataclass(frozen=True)
class SimilarityConfig:
    provider: SimilarityProvider = SimilarityProvider.LEXICAL
    threshold: float = DEFAULT_THRESHOLD
    endpoint: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "provider", SimilarityProvider(self.provider))
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN.split(text.lower()) if t]


def lexical_similarity(a: str, b: str) -> float:
    """Cosine of term-frequency vectors over lowercase alphanumeric tokens."""
    ta, tb = Counter(tokenize(a)), Counter(tokenize(b))
    if not ta or not tb:
        return 1.0 if ta == tb else 0.0
    dot = sum(ta[t] * tb[t] for t in ta.keys() & tb.keys())
    norm = math.sqrt(sum(v * v for v in ta.values())) * math.sqrt(sum(v * v for v in tb.values()))
    return min(1.0, dot / norm)


class EmbeddingClient:
    """Client for an endpoint taking ``{"texts": [...]}`` and returning ``{"vectors": [...]}``."""

    def __init__(self, url: str, timeout: float = 60.0, transport: Optional[httpx.BaseTransport] = None):
        self.url = url
        self.timeout = timeout
        self._transport = transport
        self._cache: dict[str, np.ndarray] = {}

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        missing = list(dict.fromkeys(t for t in texts if t not in self._cache))
        if missing:
            try:
                with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
                    resp = client.post(self.url, json={"texts": missing})
                    resp.raise_for_status()
                    vectors = resp.json()["vectors"]
            except (httpx.HTTPError, ValueError, KeyError, TypeError) as exc:
                raise EndpointError(f"embedding request failed: {exc}") from exc
            if len(vectors) != len(missing):
                raise EndpointError(f"asked for {len(missing)} vectors, got {len(vectors)}")
            for text, vec in zip(missing, vectors):
                v = np.asarray(vec, dtype=float)
                norm = np.linalg.norm(v)
                self._cache[text] = v / norm if norm > 0 else v
        return np.array([self._cache[t] for t in texts])


_clients: dict[str, EmbeddingClient] = {}


def _client(config: SimilarityConfig) -> EmbeddingClient:
    if not config.endpoint:
        raise EndpointError("embedding provider selected but no endpoint configured")
    if config.endpoint not in _clients:
        _clients[config.endpoint] = EmbeddingClient(config.endpoint)
    return _clients[config.endpoint]


def similarity(a: str, b: str, config: SimilarityConfig = SimilarityConfig()) -> float:
    if config.provider is SimilarityProvider.LEXICAL:
        return lexical_similarity(a, b)
    va, vb = _client(config).embed([a, b])
    return float(np.clip(va @ vb, 0.0, 1.0))


def similarity_matrix(
    rows: Sequence[str], cols: Sequence[str], config: SimilarityConfig = SimilarityConfig()
) -> np.ndarray:
    if config.provider is SimilarityProvider.LEXICAL:
        out = np.zeros((len(rows), len(cols)))
        for i, a in enumerate(rows):
            for j, b in enumerate(cols):
                out[i, j] = lexical_similarity(a, b)
        return out
    if not rows or not cols:
        return np.zeros((len(rows), len(cols)))
    vecs = _client(config).embed(list(rows) + list(cols))
    return np.clip(vecs[: len(rows)] @ vecs[len(rows):].T, 0.0, 1.0)
