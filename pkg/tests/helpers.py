"""Shared test support: an in-memory citation world and token helpers."""

from __future__ import annotations

import socket
from contextlib import contextmanager

from threadloom.corpus.client import CorpusClient
from threadloom.corpus.models import (
    PaperRecord,
    ParsedDocument,
    ParsedSection,
    ParsedSentence,
)
from threadloom.corpus.providers import Citation, ParseError, sort_most_cited
from threadloom.embedding import HashingEmbedder
from threadloom.errors import ProviderUnreachableError


class SyntheticWorld:
    """In-memory citation graph with optional parsed documents.

    Serves as the backing store for provider fakes so client, pipeline,
    and service tests can share one world-building vocabulary.
    """

    def __init__(self):
        self.papers: dict[str, PaperRecord] = {}
        self.citing: dict[str, list[str]] = {}
        self.link_contexts: dict[tuple[str, str], list[str]] = {}
        self.documents: dict[str, ParsedDocument] = {}
        self.search_urls: dict[str, list[str]] = {}  # title -> pdf urls
        self.parse_failures: set[str] = set()

    def add_paper(
        self,
        paper_id: str,
        title: str = "",
        abstract: str = "",
        year: int | None = None,
        venue: str | None = None,
        authors: tuple[str, ...] = (),
        citation_count: int = 0,
        references: tuple[str, ...] = (),
        pdf_url: str | None = None,
    ) -> PaperRecord:
        record = PaperRecord(
            paper_id=paper_id,
            title=title or f"Paper {paper_id}",
            abstract=abstract,
            year=year,
            venue=venue,
            authors=list(authors),
            citation_count=citation_count,
            reference_ids=list(references),
            pdf_url=pdf_url,
        )
        self.papers[paper_id] = record
        for cited in references:
            self.citing.setdefault(cited, []).append(paper_id)
        return record

    def add_link_context(self, citing_id: str, cited_id: str, text: str) -> None:
        self.link_contexts.setdefault((citing_id, cited_id), []).append(text)

    def add_document(
        self,
        paper_id: str,
        sentences_by_section: dict[str, list[str]],
        bibliography: dict[str, str | None],
    ) -> ParsedDocument:
        sections = [
            ParsedSection(
                header=header,
                sentences=[
                    ParsedSentence(text=text, page_number=1) for text in texts
                ],
            )
            for header, texts in sentences_by_section.items()
        ]
        document = ParsedDocument(
            paper_id=paper_id, sections=sections, bibliography=dict(bibliography)
        )
        self.documents[paper_id] = document
        return document


class WorldMetadata:
    """MetadataProvider backed by a SyntheticWorld, with a call log."""

    def __init__(self, world: SyntheticWorld, unreachable: bool = False):
        self.world = world
        self.unreachable = unreachable
        self.calls: list[tuple[str, str, int]] = []

    def _check(self):
        if self.unreachable:
            raise ProviderUnreachableError("metadata", "injected outage")

    def get_paper(self, paper_id: str) -> PaperRecord | None:
        self._check()
        self.calls.append(("paper", paper_id, 0))
        return self.world.papers.get(paper_id)

    def get_citations(self, paper_id: str, limit: int) -> list[Citation]:
        self._check()
        self.calls.append(("citations", paper_id, limit))
        links = [
            Citation(
                paper=self.world.papers[citer],
                contexts=list(self.world.link_contexts.get((citer, paper_id), [])),
            )
            for citer in self.world.citing.get(paper_id, [])
            if citer in self.world.papers
        ]
        return sort_most_cited(links)[:limit]

    def get_references(self, paper_id: str, limit: int) -> list[Citation]:
        self._check()
        self.calls.append(("references", paper_id, limit))
        record = self.world.papers.get(paper_id)
        if record is None:
            return []
        links = [
            Citation(
                paper=self.world.papers[cited],
                contexts=list(self.world.link_contexts.get((paper_id, cited), [])),
            )
            for cited in record.reference_ids
            if cited in self.world.papers
        ]
        return sort_most_cited(links)[:limit]


class WorldSearch:
    def __init__(self, world: SyntheticWorld):
        self.world = world
        self.queries: list[str] = []

    def search_pdf(self, title: str) -> list[str]:
        self.queries.append(title)
        return list(self.world.search_urls.get(title, []))


class WorldFetcher:
    def __init__(self, fail_urls: set[str] | None = None):
        self.fail_urls = fail_urls or set()
        self.fetched: list[str] = []

    def fetch(self, url: str) -> bytes:
        self.fetched.append(url)
        if url in self.fail_urls:
            raise ProviderUnreachableError("pdf-fetch", f"injected failure {url}")
        return f"pdf-bytes:{url}".encode()


class WorldParser:
    def __init__(self, world: SyntheticWorld):
        self.world = world
        self.parsed: list[str] = []

    def parse(self, paper_id: str, pdf_bytes: bytes) -> ParsedDocument:
        self.parsed.append(paper_id)
        if paper_id in self.world.parse_failures:
            raise ParseError(f"injected parse failure for {paper_id}")
        document = self.world.documents.get(paper_id)
        if document is None:
            raise ParseError(f"no document for {paper_id}")
        return document


def world_client(world: SyntheticWorld, **kwargs) -> CorpusClient:
    return CorpusClient(
        WorldMetadata(world),
        search=WorldSearch(world),
        fetcher=WorldFetcher(),
        parser=WorldParser(world),
        **kwargs,
    )


def distinct_bucket_tokens(
    count: int, embedder: HashingEmbedder | None = None, exclude: set[int] | None = None
) -> list[str]:
    """Token strings whose hash buckets are pairwise distinct.

    Lets tests construct texts with exactly known cosine similarities:
    with no bucket collisions, unit-count token sets give
    cosine = shared / sqrt(n1 * n2).
    """
    embedder = embedder or HashingEmbedder()
    taken: set[int] = set(exclude or ())
    tokens: list[str] = []
    index = 0
    while len(tokens) < count:
        token = f"tok{index:04d}"
        index += 1
        bucket = embedder.bucket(token)
        if bucket in taken:
            continue
        taken.add(bucket)
        tokens.append(token)
    return tokens


@contextmanager
def network_blocked():
    """Fail any socket connection attempt inside the block."""

    def deny(*args, **kwargs):
        raise AssertionError("network access attempted during offline test")

    original_connect = socket.socket.connect
    socket.socket.connect = deny
    try:
        yield
    finally:
        socket.socket.connect = original_connect


def build_two_topic_world(
    papers_per_topic: int = 6,
    contexts_per_paper: int = 3,
) -> tuple[SyntheticWorld, list[str], str]:
    """Small two-seed world with clusterable citation contexts.

    Returns (world, seed_ids, clip_text). Contexts share a common query
    vocabulary with the clip text plus per-subtopic marker tokens, so the
    filter keeps them and clustering finds subtopic structure.
    """
    world = SyntheticWorld()
    base = "anchor query shared tokens corpus study relevance passage method"
    subtopics = {
        "s1": ["sparse attention kernels", "energy folding dynamics"],
        "s2": ["policy gradient exploration", "graphene lattice phonon"],
    }
    seeds = ["s1", "s2"]
    for seed in seeds:
        world.add_paper(seed, title=f"Seed {seed}", citation_count=50)
    counter = 0
    for seed, topic_list in subtopics.items():
        for t_index, topic in enumerate(topic_list):
            for p_index in range(papers_per_topic):
                pid = f"{seed}_t{t_index}_p{p_index}"
                counter += 1
                world.add_paper(
                    pid,
                    title=f"Study of {topic} {p_index}",
                    citation_count=200 - counter,
                    references=(seed,),
                    pdf_url=f"http://pdfs/{pid}.pdf",
                )
                world.add_link_context(pid, seed, f"{base} {topic} link {p_index}.")
                sentences = [
                    f"{base} {topic} finding {j} [1]."
                    for j in range(contexts_per_paper)
                ]
                world.add_document(
                    pid,
                    {f"Section {j}": [s] for j, s in enumerate(sentences)},
                    {"1": seed},
                )
    return world, seeds, base
