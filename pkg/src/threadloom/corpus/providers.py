"""Provider interfaces for paper metadata, PDF discovery, and structure parsing.

The corpus client only speaks to these interfaces. Live implementations
call JSON-over-HTTP endpoints with shared rate limiting and an on-disk
request cache; tests and replay runs substitute in-memory or snapshot-backed
implementations of the same protocols.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Protocol

from ..errors import ProviderUnreachableError
from .cache import NullCache, RequestCache
from .models import ParsedDocument, PaperRecord
from .ratelimit import NullLimiter, TokenBucket


class ParseError(Exception):
    """A PDF could not be parsed into a structured document."""


@dataclass
class Citation:
    """One citation link as returned by a metadata provider.

    `paper` is the neighbor on the other end of the link and `contexts`
    holds the citing passages the provider exposes for the link.
    """

    paper: PaperRecord
    contexts: list[str]


class MetadataProvider(Protocol):
    """Bibliographic lookups over a citation index."""

    def get_paper(self, paper_id: str) -> PaperRecord | None:
        """Fetch one paper record, or None if the id is unknown."""
        ...

    def get_citations(self, paper_id: str, limit: int) -> list[Citation]:
        """Papers citing `paper_id`, most cited first, at most `limit`."""
        ...

    def get_references(self, paper_id: str, limit: int) -> list[Citation]:
        """Papers cited by `paper_id`, most cited first, at most `limit`."""
        ...


class PdfSearchProvider(Protocol):
    """Web search restricted to PDF results."""

    def search_pdf(self, title: str) -> list[str]:
        """Candidate PDF URLs for a paper title, best match first."""
        ...


class PdfFetcher(Protocol):
    def fetch(self, url: str) -> bytes:
        """Download PDF bytes; raises ProviderUnreachableError on failure."""
        ...


class StructureParser(Protocol):
    def parse(self, paper_id: str, pdf_bytes: bytes) -> ParsedDocument:
        """Parse PDF bytes into sections, sentences, and a bibliography.

        Raises ParseError when the bytes cannot be interpreted.
        """
        ...


def sort_most_cited(citations: list[Citation]) -> list[Citation]:
    """Most-cited ordering: citation_count desc, then paper_id asc."""
    return sorted(
        citations, key=lambda c: (-c.paper.citation_count, c.paper.paper_id)
    )


class HttpMetadataProvider:
    """Live metadata provider over a JSON HTTP index.

    Endpoints:
        GET {base}/papers/{id}
        GET {base}/papers/{id}/citations?limit=N
        GET {base}/papers/{id}/references?limit=N

    Responses are cached on disk keyed by (operation, paper_id, limit) and
    every network call passes through the shared token bucket.
    """

    cache_name = "metadata"

    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        cache: RequestCache | None = None,
        limiter: TokenBucket | NullLimiter | None = None,
        timeout: float = 30.0,
    ):
        import httpx

        self.base_url = base_url.rstrip("/")
        self.cache = cache or NullCache()
        self.limiter = limiter or NullLimiter()
        headers = {}
        if api_key:
            headers["x-api-key"] = api_key
        self._client = httpx.Client(headers=headers, timeout=timeout)

    def _get_json(self, url: str, params: dict | None = None):
        import httpx

        self.limiter.acquire()
        try:
            response = self._client.get(url, params=params)
        except httpx.HTTPError as exc:
            raise ProviderUnreachableError("metadata", str(exc)) from exc
        if response.status_code == 404:
            return None
        if response.status_code >= 400:
            raise ProviderUnreachableError(
                "metadata", f"{url} returned {response.status_code}"
            )
        return response.json()

    def get_paper(self, paper_id: str) -> PaperRecord | None:
        request = {"op": "paper", "paper_id": paper_id}
        payload = self.cache.get_or_call(
            self.cache_name,
            request,
            lambda: self._get_json(f"{self.base_url}/papers/{paper_id}"),
        )
        return PaperRecord.from_dict(payload) if payload else None

    def get_citations(self, paper_id: str, limit: int) -> list[Citation]:
        return self._links(paper_id, "citations", limit)

    def get_references(self, paper_id: str, limit: int) -> list[Citation]:
        return self._links(paper_id, "references", limit)

    def _links(self, paper_id: str, direction: str, limit: int) -> list[Citation]:
        request = {"op": direction, "paper_id": paper_id, "limit": limit}
        payload = self.cache.get_or_call(
            self.cache_name,
            request,
            lambda: self._get_json(
                f"{self.base_url}/papers/{paper_id}/{direction}",
                params={"limit": limit},
            ),
        )
        if payload is None:
            return []
        rows = payload.get(direction, [])
        citations = [
            Citation(
                paper=PaperRecord.from_dict(row["paper"]),
                contexts=list(row.get("contexts", [])),
            )
            for row in rows
        ]
        return sort_most_cited(citations)[:limit]


class HttpPdfSearchProvider:
    """Live PDF web search: GET {base}/search?q=...&filetype=pdf."""

    cache_name = "search"

    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        cache: RequestCache | None = None,
        limiter: TokenBucket | NullLimiter | None = None,
        timeout: float = 30.0,
    ):
        import httpx

        self.base_url = base_url.rstrip("/")
        self.cache = cache or NullCache()
        self.limiter = limiter or NullLimiter()
        headers = {}
        if api_key:
            headers["x-api-key"] = api_key
        self._client = httpx.Client(headers=headers, timeout=timeout)

    def search_pdf(self, title: str) -> list[str]:
        import httpx

        request = {"op": "search_pdf", "q": title}

        def call():
            self.limiter.acquire()
            try:
                response = self._client.get(
                    f"{self.base_url}/search",
                    params={"q": title, "filetype": "pdf"},
                )
                response.raise_for_status()
            except httpx.HTTPError as exc:
                raise ProviderUnreachableError("search", str(exc)) from exc
            return response.json()

        payload = self.cache.get_or_call(self.cache_name, request, call)
        return [row["url"] for row in payload.get("results", []) if row.get("url")]


class HttpPdfFetcher:
    """Live PDF downloader with rate limiting (bytes are not disk-cached)."""

    def __init__(
        self,
        limiter: TokenBucket | NullLimiter | None = None,
        timeout: float = 60.0,
    ):
        import httpx

        self.limiter = limiter or NullLimiter()
        self._client = httpx.Client(timeout=timeout, follow_redirects=True)

    def fetch(self, url: str) -> bytes:
        import httpx

        self.limiter.acquire()
        try:
            response = self._client.get(url)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise ProviderUnreachableError("pdf-fetch", str(exc)) from exc
        return response.content


class HttpStructureParser:
    """Live structure parser: POST {base}/parse?paper_id=... with PDF bytes.

    Parse output is cached keyed by the sha256 of the PDF bytes, so
    re-running a batch does not re-parse downloaded documents.
    """

    cache_name = "parse"

    def __init__(
        self,
        base_url: str,
        cache: RequestCache | None = None,
        limiter: TokenBucket | NullLimiter | None = None,
        timeout: float = 120.0,
    ):
        import httpx

        self.base_url = base_url.rstrip("/")
        self.cache = cache or NullCache()
        self.limiter = limiter or NullLimiter()
        self._client = httpx.Client(timeout=timeout)

    def parse(self, paper_id: str, pdf_bytes: bytes) -> ParsedDocument:
        import httpx

        digest = hashlib.sha256(pdf_bytes).hexdigest()
        request = {"op": "parse", "paper_id": paper_id, "sha256": digest}

        def call():
            self.limiter.acquire()
            try:
                response = self._client.post(
                    f"{self.base_url}/parse",
                    params={"paper_id": paper_id},
                    content=pdf_bytes,
                    headers={"Content-Type": "application/pdf"},
                )
            except httpx.HTTPError as exc:
                raise ProviderUnreachableError("parse", str(exc)) from exc
            if response.status_code == 422:
                raise ParseError(f"parser rejected document for {paper_id}")
            if response.status_code >= 400:
                raise ProviderUnreachableError(
                    "parse", f"parse returned {response.status_code}"
                )
            return response.json()

        payload = self.cache.get_or_call(self.cache_name, request, call)
        try:
            return ParsedDocument.from_dict(payload)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed parse payload for {paper_id}") from exc
