"""Citation-neighborhood fetching and full-text acquisition.

`fetch_neighborhood` expands each seed two hops in both citation
directions, keeping the most-cited `per_direction_cap` links per hop and at
most `per_direction_cap**2` candidates per direction, so one seed never
contributes more than `per_direction_cap**2 * 2` candidate papers.

`acquire_fulltext` walks a fallback chain per paper: indexed PDF URL, then
PDF web search, then a pseudo-context built from the title and abstract.
The chain never fails a batch; every requested id yields a result.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

from .extract import extract_contexts
from .models import (
    MAX_CONTEXT_CHARS,
    AcquisitionResult,
    CitationContext,
    Corpus,
    CorpusEdge,
    ParsedDocument,
    PaperRecord,
    SOURCE_CORPUS_INDEX,
    SOURCE_FALLBACK,
    SOURCE_WEB_SEARCH,
    normalize_whitespace,
)
from .providers import (
    Citation,
    MetadataProvider,
    ParseError,
    PdfFetcher,
    PdfSearchProvider,
    sort_most_cited,
)

logger = logging.getLogger(__name__)

MAX_SEARCH_ATTEMPTS = 3


class UnknownSeedError(ValueError):
    """No requested seed id resolves in the metadata index."""

    def __init__(self, seed_ids: list[str]):
        joined = ", ".join(repr(s) for s in seed_ids)
        super().__init__(f"no seed resolves in the metadata index: {joined}")
        self.seed_ids = list(seed_ids)


class CorpusClient:
    """Facade over the corpus providers.

    Args:
        metadata: bibliographic index provider.
        search: PDF web-search provider; optional, skipped when absent.
        fetcher: PDF downloader; optional.
        parser: PDF structure parser; optional.
        fetch_parallelism: worker threads for hop fan-out and acquisition.
    """

    def __init__(
        self,
        metadata: MetadataProvider,
        search: PdfSearchProvider | None = None,
        fetcher: PdfFetcher | None = None,
        parser=None,
        fetch_parallelism: int = 8,
    ):
        self.metadata = metadata
        self.search = search
        self.fetcher = fetcher
        self.parser = parser
        self.fetch_parallelism = max(1, fetch_parallelism)

    # ------------------------------------------------------------------
    # Neighborhood fetching

    def fetch_neighborhood(
        self, seed_ids: list[str], per_direction_cap: int = 50
    ) -> Corpus:
        """Two-hop citation neighborhood around the seeds.

        Returns a corpus with unique papers, directed citation edges
        carrying citing passages, and per-seed candidate lists in discovery
        order (seeds excluded, capped at per_direction_cap**2 per direction).

        Seeds that do not resolve are reported (warning log) and skipped;
        the expansion proceeds with whatever resolves.

        Raises:
            UnknownSeedError: if no seed resolves at all.
        """
        if per_direction_cap < 1:
            raise ValueError("per_direction_cap must be at least 1")
        requested = sorted(set(seed_ids))
        if not requested:
            raise ValueError("at least one seed id is required")
        resolved: dict[str, PaperRecord] = {}
        for seed in requested:
            record = self.metadata.get_paper(seed)
            if record is None:
                logger.warning("seed %r not found in the metadata index", seed)
            else:
                resolved[seed] = record
        if not resolved:
            raise UnknownSeedError(requested)
        seeds = sorted(resolved)
        corpus = Corpus(seed_ids=seeds)
        edge_map: dict[tuple[str, str], CorpusEdge] = {}
        for seed in seeds:
            corpus.papers.setdefault(seed, resolved[seed])
        for seed in seeds:
            corpus.candidates[seed] = self._expand_seed(
                seed, per_direction_cap, corpus, edge_map
            )
        corpus.edges = list(edge_map.values())
        return corpus

    def _expand_seed(
        self,
        seed: str,
        cap: int,
        corpus: Corpus,
        edge_map: dict[tuple[str, str], CorpusEdge],
    ) -> list[str]:
        candidates: list[str] = []
        # Seeds are never candidates, their own or another query seed.
        seen: set[str] = set(corpus.seed_ids) | {seed}
        for direction in ("citations", "references"):
            budget = cap * cap
            admitted = 0

            def admit(citation: Citation, hop_anchor: str) -> None:
                nonlocal admitted
                neighbor = citation.paper
                pid = neighbor.paper_id
                is_new = pid not in seen
                if is_new and admitted >= budget:
                    return
                if is_new:
                    seen.add(pid)
                    candidates.append(pid)
                    admitted += 1
                    corpus.papers.setdefault(pid, neighbor)
                self._merge_edge(edge_map, direction, hop_anchor, citation)

            hop1 = self._fetch_links(seed, direction, cap)
            for citation in hop1:
                admit(citation, seed)
            hop1_ids = [c.paper.paper_id for c in hop1]
            hop2_lists = self._parallel_links(hop1_ids, direction, cap)
            for anchor_id, links in zip(hop1_ids, hop2_lists):
                for citation in links:
                    admit(citation, anchor_id)
        return candidates

    def _fetch_links(self, paper_id: str, direction: str, cap: int) -> list[Citation]:
        if direction == "citations":
            links = self.metadata.get_citations(paper_id, cap)
        else:
            links = self.metadata.get_references(paper_id, cap)
        # Providers should pre-sort, but the ordering rule is load-bearing
        # for determinism, so enforce it here as well.
        return sort_most_cited(links)[:cap]

    def _parallel_links(
        self, paper_ids: list[str], direction: str, cap: int
    ) -> list[list[Citation]]:
        if not paper_ids:
            return []
        with ThreadPoolExecutor(max_workers=self.fetch_parallelism) as pool:
            return list(
                pool.map(lambda pid: self._fetch_links(pid, direction, cap), paper_ids)
            )

    @staticmethod
    def _merge_edge(
        edge_map: dict[tuple[str, str], CorpusEdge],
        direction: str,
        anchor_id: str,
        citation: Citation,
    ) -> None:
        """Record the directed edge for one citation link.

        In the citations direction the neighbor cites the anchor; in the
        references direction the anchor cites the neighbor. Passages are
        merged across duplicate discoveries with exact-text deduplication.
        """
        neighbor_id = citation.paper.paper_id
        if direction == "citations":
            key = (neighbor_id, anchor_id)
        else:
            key = (anchor_id, neighbor_id)
        if key[0] == key[1]:
            return
        edge = edge_map.get(key)
        if edge is None:
            edge = CorpusEdge(citing_id=key[0], cited_id=key[1])
            edge_map[key] = edge
        for text in citation.contexts:
            cleaned = normalize_whitespace(text)
            if cleaned and cleaned not in edge.contexts:
                edge.contexts.append(cleaned)

    # ------------------------------------------------------------------
    # Full-text acquisition

    def acquire_fulltext(self, paper_ids: list[str]) -> list[AcquisitionResult]:
        """Acquire citation contexts for each paper, order-preserving.

        Never raises for an individual paper: the title/abstract fallback
        guarantees one result per requested id.
        """
        results = [r for r, _ in self.acquire_with_documents(paper_ids)]
        return results

    def acquire_with_documents(
        self, paper_ids: list[str]
    ) -> list[tuple[AcquisitionResult, ParsedDocument | None]]:
        """Like acquire_fulltext but also returns the parsed document.

        Snapshot recording uses the document to persist a replayable parse.
        """
        if not paper_ids:
            return []
        with ThreadPoolExecutor(max_workers=self.fetch_parallelism) as pool:
            return list(pool.map(self._acquire_one, paper_ids))

    def _acquire_one(
        self, paper_id: str
    ) -> tuple[AcquisitionResult, ParsedDocument | None]:
        record = None
        try:
            record = self.metadata.get_paper(paper_id)
        except Exception as exc:
            logger.warning("metadata lookup failed for %s: %s", paper_id, exc)
        document = self._try_indexed_pdf(paper_id, record)
        if document is not None:
            return self._document_result(paper_id, SOURCE_CORPUS_INDEX, document)
        document = self._try_web_search(paper_id, record)
        if document is not None:
            return self._document_result(paper_id, SOURCE_WEB_SEARCH, document)
        return self._fallback_result(paper_id, record), None

    def _try_indexed_pdf(
        self, paper_id: str, record: PaperRecord | None
    ) -> ParsedDocument | None:
        if record is None or not record.pdf_url:
            return None
        return self._fetch_and_parse(paper_id, record.pdf_url)

    def _try_web_search(
        self, paper_id: str, record: PaperRecord | None
    ) -> ParsedDocument | None:
        if self.search is None or record is None or not record.title:
            return None
        try:
            urls = self.search.search_pdf(record.title)
        except Exception as exc:
            logger.warning("pdf search failed for %s: %s", paper_id, exc)
            return None
        for url in urls[:MAX_SEARCH_ATTEMPTS]:
            document = self._fetch_and_parse(paper_id, url)
            if document is not None:
                return document
        return None

    def _fetch_and_parse(self, paper_id: str, url: str) -> ParsedDocument | None:
        if self.fetcher is None or self.parser is None:
            return None
        try:
            pdf_bytes = self.fetcher.fetch(url)
            return self.parser.parse(paper_id, pdf_bytes)
        except ParseError as exc:
            logger.info("parse failed for %s from %s: %s", paper_id, url, exc)
            return None
        except Exception as exc:
            logger.warning("pdf acquisition failed for %s from %s: %s", paper_id, url, exc)
            return None

    @staticmethod
    def _document_result(
        paper_id: str, source: str, document: ParsedDocument
    ) -> tuple[AcquisitionResult, ParsedDocument]:
        contexts = extract_contexts(document)
        result = AcquisitionResult(
            paper_id=paper_id, source=source, contexts=contexts, degraded=False
        )
        return result, document

    @staticmethod
    def _fallback_result(
        paper_id: str, record: PaperRecord | None
    ) -> AcquisitionResult:
        contexts = []
        if record is not None and record.title:
            text = record.title
            if record.abstract:
                text = f"{record.title}. {record.abstract}"
            text = normalize_whitespace(text)[:MAX_CONTEXT_CHARS].rstrip()
            if text:
                contexts.append(
                    CitationContext(
                        context_id=f"{paper_id}#fallback",
                        source_paper_id=paper_id,
                        text=text,
                        cited_ids=[],
                    )
                )
        return AcquisitionResult(
            paper_id=paper_id,
            source=SOURCE_FALLBACK,
            contexts=contexts,
            degraded=True,
        )
