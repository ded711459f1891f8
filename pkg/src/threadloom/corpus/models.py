"""Core record types for papers, citation contexts, and fetched corpora.

All types round-trip through plain dicts so snapshots, caches, and service
responses share one canonical JSON form. Canonical serialization sorts
papers by id and edges by (citing_id, cited_id) so identical fetches produce
byte-identical files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

MAX_CONTEXT_CHARS = 1000

_WS_RE = re.compile(r"\s+")


def normalize_whitespace(text: str) -> str:
    """Collapse runs of whitespace to single spaces and strip the ends."""
    return _WS_RE.sub(" ", text).strip()


@dataclass
class PaperRecord:
    """Bibliographic metadata for one paper."""

    paper_id: str
    title: str
    abstract: str | None = None
    year: int | None = None
    venue: str | None = None
    authors: list[str] = field(default_factory=list)
    citation_count: int = 0
    reference_ids: list[str] = field(default_factory=list)
    pdf_url: str | None = None

    def __post_init__(self):
        if not self.paper_id:
            raise ValueError("paper_id must be non-empty")
        if self.paper_id in self.reference_ids:
            raise ValueError(f"paper {self.paper_id} lists itself as a reference")
        if len(set(self.reference_ids)) != len(self.reference_ids):
            raise ValueError(f"paper {self.paper_id} has duplicate reference_ids")

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "abstract": self.abstract,
            "year": self.year,
            "venue": self.venue,
            "authors": list(self.authors),
            "citation_count": self.citation_count,
            "reference_ids": list(self.reference_ids),
            "pdf_url": self.pdf_url,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PaperRecord":
        return cls(
            paper_id=data["paper_id"],
            title=data["title"],
            abstract=data.get("abstract"),
            year=data.get("year"),
            venue=data.get("venue"),
            authors=list(data.get("authors", [])),
            citation_count=int(data.get("citation_count", 0)),
            reference_ids=list(data.get("reference_ids", [])),
            pdf_url=data.get("pdf_url"),
        )


@dataclass
class CitationContext:
    """One citing passage: consecutive sentences that cite at least one paper.

    `text` is whitespace-normalized and capped at MAX_CONTEXT_CHARS.
    `cited_ids` may be empty only for fallback pseudo-contexts built from a
    paper's own title and abstract.
    """

    context_id: str
    source_paper_id: str
    text: str
    cited_ids: list[str] = field(default_factory=list)
    section_header: str | None = None
    page_number: int | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"context {self.context_id} has empty text")
        if len(self.text) > MAX_CONTEXT_CHARS:
            raise ValueError(
                f"context {self.context_id} exceeds {MAX_CONTEXT_CHARS} chars"
            )

    def to_dict(self) -> dict:
        return {
            "context_id": self.context_id,
            "source_paper_id": self.source_paper_id,
            "text": self.text,
            "cited_ids": list(self.cited_ids),
            "section_header": self.section_header,
            "page_number": self.page_number,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CitationContext":
        return cls(
            context_id=data["context_id"],
            source_paper_id=data["source_paper_id"],
            text=data["text"],
            cited_ids=list(data.get("cited_ids", [])),
            section_header=data.get("section_header"),
            page_number=data.get("page_number"),
        )


SOURCE_CORPUS_INDEX = "corpus-index"
SOURCE_WEB_SEARCH = "web-search"
SOURCE_FALLBACK = "fallback-title-abstract"

ACQUISITION_SOURCES = (SOURCE_CORPUS_INDEX, SOURCE_WEB_SEARCH, SOURCE_FALLBACK)


@dataclass
class AcquisitionResult:
    """Outcome of full-text acquisition for one paper."""

    paper_id: str
    source: str
    contexts: list[CitationContext] = field(default_factory=list)
    degraded: bool = False

    def __post_init__(self):
        if self.source not in ACQUISITION_SOURCES:
            raise ValueError(f"unknown acquisition source {self.source!r}")

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "source": self.source,
            "contexts": [c.to_dict() for c in self.contexts],
            "degraded": self.degraded,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AcquisitionResult":
        return cls(
            paper_id=data["paper_id"],
            source=data["source"],
            contexts=[CitationContext.from_dict(c) for c in data.get("contexts", [])],
            degraded=bool(data.get("degraded", False)),
        )


@dataclass
class CorpusEdge:
    """A directed citation between two corpus papers with its citing passages."""

    citing_id: str
    cited_id: str
    contexts: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "citing_id": self.citing_id,
            "cited_id": self.cited_id,
            "contexts": list(self.contexts),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusEdge":
        return cls(
            citing_id=data["citing_id"],
            cited_id=data["cited_id"],
            contexts=list(data.get("contexts", [])),
        )


@dataclass
class Corpus:
    """A fetched citation neighborhood: unique papers plus directed edges.

    `seed_ids` records the seeds the neighborhood was expanded from and
    `candidates` maps each seed to its candidate paper ids in discovery
    order (seeds excluded).
    """

    papers: dict[str, PaperRecord] = field(default_factory=dict)
    edges: list[CorpusEdge] = field(default_factory=list)
    seed_ids: list[str] = field(default_factory=list)
    candidates: dict[str, list[str]] = field(default_factory=dict)

    def edge_key_map(self) -> dict[tuple[str, str], CorpusEdge]:
        return {(e.citing_id, e.cited_id): e for e in self.edges}

    def to_dict(self) -> dict:
        return {
            "seed_ids": sorted(self.seed_ids),
            "papers": {
                pid: self.papers[pid].to_dict() for pid in sorted(self.papers)
            },
            "edges": [
                e.to_dict()
                for e in sorted(self.edges, key=lambda e: (e.citing_id, e.cited_id))
            ],
            "candidates": {
                seed: list(ids) for seed, ids in sorted(self.candidates.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Corpus":
        return cls(
            papers={
                pid: PaperRecord.from_dict(p) for pid, p in data["papers"].items()
            },
            edges=[CorpusEdge.from_dict(e) for e in data["edges"]],
            seed_ids=list(data.get("seed_ids", [])),
            candidates={s: list(ids) for s, ids in data.get("candidates", {}).items()},
        )


@dataclass
class ParsedSentence:
    """One body sentence with its page, as produced by a structure parser."""

    text: str
    page_number: int | None = None

    def to_dict(self) -> dict:
        return {"text": self.text, "page_number": self.page_number}

    @classmethod
    def from_dict(cls, data: dict) -> "ParsedSentence":
        return cls(text=data["text"], page_number=data.get("page_number"))


@dataclass
class ParsedSection:
    """A titled run of sentences from a parsed document body."""

    header: str | None
    sentences: list[ParsedSentence] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "sentences": [s.to_dict() for s in self.sentences],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParsedSection":
        return cls(
            header=data.get("header"),
            sentences=[ParsedSentence.from_dict(s) for s in data.get("sentences", [])],
        )


@dataclass
class ParsedDocument:
    """Structured parse of one paper: body sections plus a resolved bibliography.

    `bibliography` maps inline marker keys (the digits inside brackets) to
    provider paper ids; unresolved entries map to None.
    """

    paper_id: str
    sections: list[ParsedSection] = field(default_factory=list)
    bibliography: dict[str, str | None] = field(default_factory=dict)

    def body_text(self) -> str:
        """All body sentences, whitespace-normalized and joined with spaces."""
        parts = []
        for section in self.sections:
            for sentence in section.sentences:
                parts.append(normalize_whitespace(sentence.text))
        return " ".join(p for p in parts if p)

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "sections": [s.to_dict() for s in self.sections],
            "bibliography": dict(sorted(self.bibliography.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParsedDocument":
        return cls(
            paper_id=data["paper_id"],
            sections=[ParsedSection.from_dict(s) for s in data.get("sections", [])],
            bibliography=dict(data.get("bibliography", {})),
        )
