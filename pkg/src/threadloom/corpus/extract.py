"""Citation context extraction from parsed documents.

A citation context is a maximal run of consecutive sentences, within one
section, where every sentence carries at least one inline citation marker
such as "[3]" or "[3, 7]". Markers resolve to paper ids through the
document bibliography; markers that do not resolve are dropped, and a run
is kept only if at least one marker resolves.
"""

from __future__ import annotations

import re

from .models import (
    MAX_CONTEXT_CHARS,
    CitationContext,
    ParsedDocument,
    ParsedSentence,
    normalize_whitespace,
)

_MARKER_RE = re.compile(r"\[(\d+(?:\s*[,;]\s*\d+)*)\]")


def inline_marker_keys(text: str) -> list[str]:
    """Marker keys cited in a sentence, in order of appearance.

    "[3]" yields ["3"]; "[3, 7]" yields ["3", "7"]. Duplicates are preserved
    here and deduplicated at the context level.
    """
    keys = []
    for match in _MARKER_RE.finditer(text):
        for part in re.split(r"[,;]", match.group(1)):
            keys.append(part.strip())
    return keys


def extract_contexts(document: ParsedDocument) -> list[CitationContext]:
    """Extract citation contexts from a parsed document.

    Returns contexts in document order with ids numbered sequentially as
    "<paper_id>#c<NNN>". Context text is whitespace-normalized, joined with
    single spaces, and truncated to MAX_CONTEXT_CHARS.
    """
    contexts: list[CitationContext] = []
    for section in document.sections:
        for run in _marker_runs(section.sentences):
            cited_ids = _resolve_run(run, document.bibliography)
            if not cited_ids:
                continue
            text = " ".join(normalize_whitespace(s.text) for s in run)
            text = text[:MAX_CONTEXT_CHARS].rstrip()
            if not text:
                continue
            contexts.append(
                CitationContext(
                    context_id=f"{document.paper_id}#c{len(contexts):03d}",
                    source_paper_id=document.paper_id,
                    text=text,
                    cited_ids=cited_ids,
                    section_header=section.header,
                    page_number=run[0].page_number,
                )
            )
    return contexts


def _marker_runs(sentences: list[ParsedSentence]) -> list[list[ParsedSentence]]:
    """Maximal runs of consecutive sentences that each carry a marker."""
    runs: list[list[ParsedSentence]] = []
    current: list[ParsedSentence] = []
    for sentence in sentences:
        if inline_marker_keys(sentence.text):
            current.append(sentence)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def _resolve_run(
    run: list[ParsedSentence], bibliography: dict[str, str | None]
) -> list[str]:
    """Resolved cited ids for a run, order-preserving and deduplicated."""
    cited: list[str] = []
    for sentence in run:
        for key in inline_marker_keys(sentence.text):
            paper_id = bibliography.get(key)
            if paper_id and paper_id not in cited:
                cited.append(paper_id)
    return cited
