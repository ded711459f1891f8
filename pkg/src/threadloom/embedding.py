"""Text embedding providers and vector similarity.

Two providers share one interface: a deterministic offline embedder used by
tests, fixtures, and replay runs, and a remote HTTP embedder for live runs.
Every vector produced by a provider instance has the same dimensionality, is
L2-normalized by the offline provider, and supports cosine comparison.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .errors import ProviderUnreachableError

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmptyTextError(ValueError):
    """Raised when a text to embed has no content after normalization."""

    def __init__(self, index: int, text: str):
        super().__init__(f"text at index {index} has no embeddable tokens: {text!r}")
        self.index = index


class DimensionMismatchError(ValueError):
    """Raised when two vectors of different dimensionality are compared."""


@dataclass(frozen=True)
class EmbeddingVector:
    """A fixed-dimension float vector for one text."""

    values: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity in [-1, 1].

    Raises:
        DimensionMismatchError: if the vectors have different dimensions.
        ValueError: if either vector has zero norm.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot compare dim {a.dim} with dim {b.dim}")
    na = float(np.linalg.norm(a.values))
    nb = float(np.linalg.norm(b.values))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for a zero vector")
    value = float(np.dot(a.values, b.values) / (na * nb))
    # Guard against float drift outside the legal range.
    return max(-1.0, min(1.0, value))


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, in order of appearance."""
    return _TOKEN_RE.findall(text.lower())


class EmbeddingProvider(Protocol):
    """Order-preserving batch text embedder."""

    dim: int

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        """Embed texts one-to-one, preserving input order."""
        ...


def embed_each(
    provider: "EmbeddingProvider", texts: list[str]
) -> list[EmbeddingVector | None]:
    """Embed texts one-to-one, mapping per-item failures to None.

    Tries a single batch first; if anything in the batch fails, retries
    item by item so one bad text cannot sink its neighbors.
    """
    if not texts:
        return []
    try:
        return list(provider.embed(texts))
    except Exception:
        pass
    vectors: list[EmbeddingVector | None] = []
    for text in texts:
        try:
            vectors.append(provider.embed([text])[0])
        except Exception:
            vectors.append(None)
    return vectors


class HashingEmbedder:
    """Deterministic offline embedder: L2-normalized token-hash bag of words.

    Each token is hashed into one of `dim` buckets with a keyed blake2b
    digest, so the mapping is stable across processes and platforms. The
    same text always embeds to the same vector and texts sharing no token
    buckets embed to orthogonal vectors.

    Args:
        dim: number of hash buckets (vector dimensionality).
        seed: hash key; different seeds give unrelated bucket assignments.
    """

    def __init__(self, dim: int = 256, seed: int = 0):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.seed = seed
        self._key = seed.to_bytes(8, "little", signed=False)

    def bucket(self, token: str) -> int:
        """Hash bucket index for a single token."""
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=self._key)
        return int.from_bytes(digest.digest(), "little") % self.dim

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        vectors = []
        for index, text in enumerate(texts):
            tokens = tokenize(text)
            if not tokens:
                raise EmptyTextError(index, text)
            values = np.zeros(self.dim, dtype=np.float64)
            for token in tokens:
                values[self.bucket(token)] += 1.0
            values /= np.linalg.norm(values)
            vectors.append(EmbeddingVector(values))
        return vectors


class RemoteEmbedder:
    """HTTP embedding provider.

    Sends batches of texts to a JSON endpoint and returns the float arrays
    in request order. Transport failures raise ProviderUnreachableError so
    callers can retry or degrade.

    Args:
        endpoint: full URL of the embedding endpoint.
        model: model identifier passed through to the provider.
        api_key: bearer token; omitted from headers when None.
        dim: expected dimensionality of returned vectors.
        batch_size: maximum texts per request.
        timeout: per-request timeout in seconds.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        dim: int = 1536,
        batch_size: int = 64,
        timeout: float = 30.0,
    ):
        import httpx

        self.endpoint = endpoint
        self.model = model
        self.dim = dim
        self.batch_size = batch_size
        headers = {}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(headers=headers, timeout=timeout)

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        for index, text in enumerate(texts):
            if not tokenize(text):
                raise EmptyTextError(index, text)
        vectors: list[EmbeddingVector] = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            vectors.extend(self._embed_batch(batch))
        return vectors

    def _embed_batch(self, batch: list[str]) -> list[EmbeddingVector]:
        import httpx

        try:
            response = self._client.post(
                self.endpoint, json={"model": self.model, "texts": batch}
            )
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise ProviderUnreachableError("embedding", str(exc)) from exc
        payload = response.json()
        rows = payload["embeddings"]
        if len(rows) != len(batch):
            raise ProviderUnreachableError(
                "embedding", f"expected {len(batch)} vectors, got {len(rows)}"
            )
        out = []
        for row in rows:
            values = np.asarray(row, dtype=np.float64)
            if values.shape[0] != self.dim:
                raise ProviderUnreachableError(
                    "embedding", f"expected dim {self.dim}, got {values.shape[0]}"
                )
            out.append(EmbeddingVector(values))
        return out
