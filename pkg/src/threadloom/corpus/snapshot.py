"""Recordable, replayable fixtures for corpus provider traffic.

A snapshot directory captures one neighborhood fetch plus the acquisition
outcomes for a set of papers:

    <dir>/manifest.json       seeds, cap, and creation time
    <dir>/neighborhood.json   paper records + per-call link results
    <dir>/papers/<id>.json    acquisition source + parsed document

Recording wrappers sit in front of live providers and write every response
into the store; replay providers serve the same calls back without any
network access. Replay of a call the snapshot never saw raises
SnapshotMissError.
"""

from __future__ import annotations

import datetime
import json
import threading
from pathlib import Path
from urllib.parse import quote

from ..errors import SnapshotMissError
from ..jsonio import write_json_atomic
from .models import (
    ParsedDocument,
    PaperRecord,
    SOURCE_CORPUS_INDEX,
    SOURCE_FALLBACK,
    SOURCE_WEB_SEARCH,
)
from .providers import Citation, MetadataProvider, ParseError

SNAP_URL_PREFIX = "snap://"


def _call_key(direction: str, paper_id: str, limit: int) -> str:
    return f"{direction}:{paper_id}:{limit}"


class SnapshotStore:
    """Reads and writes one snapshot directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._papers: dict[str, dict] = {}
        self._calls: dict[str, list[dict]] = {}
        self._loaded = False
        self._lock = threading.Lock()

    # -- write side ----------------------------------------------------

    def record_manifest(self, seed_ids: list[str], per_direction_cap: int) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        write_json_atomic(
            self.root / "manifest.json",
            {
                "seed_ids": sorted(seed_ids),
                "per_direction_cap": per_direction_cap,
                "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            },
        )

    def record_paper(self, record: PaperRecord) -> None:
        with self._lock:
            self._papers.setdefault(record.paper_id, record.to_dict())

    def record_call(self, key: str, citations: list[Citation]) -> None:
        rows = [
            {"paper": c.paper.to_dict(), "contexts": list(c.contexts)}
            for c in citations
        ]
        with self._lock:
            self._calls[key] = rows
            for citation in citations:
                self._papers.setdefault(
                    citation.paper.paper_id, citation.paper.to_dict()
                )

    def flush_neighborhood(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        with self._lock:
            payload = {
                "papers": {pid: self._papers[pid] for pid in sorted(self._papers)},
                "calls": {key: self._calls[key] for key in sorted(self._calls)},
            }
        write_json_atomic(self.root / "neighborhood.json", payload)

    def record_document(
        self, paper_id: str, source: str, document: ParsedDocument | None
    ) -> None:
        papers_dir = self.root / "papers"
        papers_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "paper_id": paper_id,
            "source": source,
            "document": document.to_dict() if document is not None else None,
        }
        write_json_atomic(papers_dir / f"{_safe_name(paper_id)}.json", payload)

    # -- read side -----------------------------------------------------

    def _ensure_loaded(self) -> None:
        if self._loaded:
            return
        path = self.root / "neighborhood.json"
        if not path.exists():
            raise SnapshotMissError(f"snapshot has no neighborhood file: {path}")
        data = json.loads(path.read_text(encoding="utf-8"))
        self._papers = data.get("papers", {})
        self._calls = data.get("calls", {})
        self._loaded = True

    def manifest(self) -> dict:
        path = self.root / "manifest.json"
        if not path.exists():
            raise SnapshotMissError(f"snapshot has no manifest: {path}")
        return json.loads(path.read_text(encoding="utf-8"))

    def paper(self, paper_id: str) -> dict | None:
        self._ensure_loaded()
        return self._papers.get(paper_id)

    def call(self, key: str) -> list[dict]:
        self._ensure_loaded()
        rows = self._calls.get(key)
        if rows is None:
            raise SnapshotMissError(f"snapshot has no recorded call {key!r}")
        return rows

    def acquisition(self, paper_id: str) -> dict | None:
        path = self.root / "papers" / f"{_safe_name(paper_id)}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))


def _safe_name(paper_id: str) -> str:
    return quote(paper_id, safe="")


# ----------------------------------------------------------------------
# Recording wrappers


class RecordingMetadataProvider:
    """Passes through to a live metadata provider, recording every response."""

    def __init__(self, inner: MetadataProvider, store: SnapshotStore):
        self.inner = inner
        self.store = store

    def get_paper(self, paper_id: str) -> PaperRecord | None:
        record = self.inner.get_paper(paper_id)
        if record is not None:
            self.store.record_paper(record)
        return record

    def get_citations(self, paper_id: str, limit: int) -> list[Citation]:
        links = self.inner.get_citations(paper_id, limit)
        self.store.record_call(_call_key("citations", paper_id, limit), links)
        return links

    def get_references(self, paper_id: str, limit: int) -> list[Citation]:
        links = self.inner.get_references(paper_id, limit)
        self.store.record_call(_call_key("references", paper_id, limit), links)
        return links


# ----------------------------------------------------------------------
# Replay providers


class SnapshotMetadataProvider:
    """Serves recorded metadata; unknown papers are None, unseen calls raise.

    PDF URLs are rewritten so the acquisition chain stays inside the
    snapshot: papers whose recorded acquisition came from the corpus index
    get a snap:// URL, everything else gets no URL.
    """

    def __init__(self, store: SnapshotStore):
        self.store = store

    def _rewrite(self, data: dict) -> PaperRecord:
        record = PaperRecord.from_dict(data)
        acquisition = self.store.acquisition(record.paper_id)
        if acquisition and acquisition["source"] == SOURCE_CORPUS_INDEX:
            record.pdf_url = f"{SNAP_URL_PREFIX}{record.paper_id}"
        else:
            record.pdf_url = None
        return record

    def get_paper(self, paper_id: str) -> PaperRecord | None:
        data = self.store.paper(paper_id)
        return self._rewrite(data) if data else None

    def get_citations(self, paper_id: str, limit: int) -> list[Citation]:
        return self._links("citations", paper_id, limit)

    def get_references(self, paper_id: str, limit: int) -> list[Citation]:
        return self._links("references", paper_id, limit)

    def _links(self, direction: str, paper_id: str, limit: int) -> list[Citation]:
        rows = self.store.call(_call_key(direction, paper_id, limit))
        return [
            Citation(
                paper=self._rewrite(row["paper"]),
                contexts=list(row.get("contexts", [])),
            )
            for row in rows
        ]


class SnapshotPdfSearchProvider:
    """Replays web-search hits for papers recorded with a web-search source."""

    def __init__(self, store: SnapshotStore):
        self.store = store
        self._by_title: dict[str, str] | None = None

    def search_pdf(self, title: str) -> list[str]:
        if self._by_title is None:
            self.store._ensure_loaded()
            self._by_title = {
                data["title"]: pid for pid, data in self.store._papers.items()
            }
        paper_id = self._by_title.get(title)
        if paper_id is None:
            return []
        acquisition = self.store.acquisition(paper_id)
        if acquisition and acquisition["source"] == SOURCE_WEB_SEARCH:
            return [f"{SNAP_URL_PREFIX}{paper_id}"]
        return []


class SnapshotPdfFetcher:
    """Returns marker bytes naming the paper; no bytes are stored."""

    def fetch(self, url: str) -> bytes:
        if not url.startswith(SNAP_URL_PREFIX):
            raise SnapshotMissError(f"snapshot fetcher cannot serve {url!r}")
        return url[len(SNAP_URL_PREFIX) :].encode("utf-8")


class SnapshotStructureParser:
    """Serves recorded parsed documents keyed by the fetcher's marker bytes."""

    def __init__(self, store: SnapshotStore):
        self.store = store

    def parse(self, paper_id: str, pdf_bytes: bytes) -> ParsedDocument:
        acquisition = self.store.acquisition(paper_id)
        if acquisition is None or acquisition.get("document") is None:
            raise ParseError(f"snapshot has no parsed document for {paper_id}")
        return ParsedDocument.from_dict(acquisition["document"])


def replay_providers(store: SnapshotStore):
    """Build the full provider bundle for offline replay of a snapshot."""
    return {
        "metadata": SnapshotMetadataProvider(store),
        "search": SnapshotPdfSearchProvider(store),
        "fetcher": SnapshotPdfFetcher(),
        "parser": SnapshotStructureParser(store),
    }


def record_acquisitions(client, store: SnapshotStore, paper_ids: list[str]):
    """Run the acquisition chain and persist each outcome into the store.

    Fallback outcomes are recorded with a null document so replay repeats
    the fallback instead of missing.
    """
    pairs = client.acquire_with_documents(paper_ids)
    for result, document in pairs:
        source = result.source if document is not None else SOURCE_FALLBACK
        store.record_document(result.paper_id, source, document)
    return [result for result, _ in pairs]
