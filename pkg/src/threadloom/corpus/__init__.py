"""Corpus access: metadata, neighborhoods, full text, and citation contexts."""

from .client import CorpusClient, UnknownSeedError
from .extract import extract_contexts, inline_marker_keys
from .models import (
    AcquisitionResult,
    CitationContext,
    Corpus,
    CorpusEdge,
    MAX_CONTEXT_CHARS,
    PaperRecord,
    ParsedDocument,
    ParsedSection,
    ParsedSentence,
    SOURCE_CORPUS_INDEX,
    SOURCE_FALLBACK,
    SOURCE_WEB_SEARCH,
    normalize_whitespace,
)
from .providers import (
    Citation,
    HttpMetadataProvider,
    HttpPdfFetcher,
    HttpPdfSearchProvider,
    HttpStructureParser,
    MetadataProvider,
    ParseError,
    PdfFetcher,
    PdfSearchProvider,
    StructureParser,
    sort_most_cited,
)
from .snapshot import (
    RecordingMetadataProvider,
    SnapshotMetadataProvider,
    SnapshotPdfFetcher,
    SnapshotPdfSearchProvider,
    SnapshotStore,
    SnapshotStructureParser,
    record_acquisitions,
    replay_providers,
)

__all__ = [
    "AcquisitionResult",
    "Citation",
    "CitationContext",
    "Corpus",
    "CorpusClient",
    "CorpusEdge",
    "HttpMetadataProvider",
    "HttpPdfFetcher",
    "HttpPdfSearchProvider",
    "HttpStructureParser",
    "MAX_CONTEXT_CHARS",
    "MetadataProvider",
    "PaperRecord",
    "ParseError",
    "ParsedDocument",
    "ParsedSection",
    "ParsedSentence",
    "PdfFetcher",
    "PdfSearchProvider",
    "RecordingMetadataProvider",
    "SOURCE_CORPUS_INDEX",
    "SOURCE_FALLBACK",
    "SOURCE_WEB_SEARCH",
    "SnapshotMetadataProvider",
    "SnapshotPdfFetcher",
    "SnapshotPdfSearchProvider",
    "SnapshotStore",
    "SnapshotStructureParser",
    "StructureParser",
    "UnknownSeedError",
    "extract_contexts",
    "inline_marker_keys",
    "normalize_whitespace",
    "record_acquisitions",
    "replay_providers",
    "sort_most_cited",
]
