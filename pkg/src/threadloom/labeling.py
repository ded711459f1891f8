"""Bottom-up thread labeling, similar-thread merging, and color assignment.

Labels are synthesized by a chat-style generator speaking a fixed protocol:
the reply must start with "Common topic: " followed by a topic of at most
six words. A deterministic keyword generator implements the same protocol
offline; the remote generator calls a chat endpoint at temperature 0.
Protocol violations get one retry and are then truncated; generator
failures fall back to deterministic keyword labels flagged as degraded.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingProvider, EmbeddingVector, cosine, tokenize
from .errors import ProviderUnreachableError
from .structure import FilteredContext, SkeletonNode

MAX_SNIPPETS = 25
MAX_LABEL_WORDS = 6
MERGE_THRESHOLD = 0.92

REPLY_PREFIX = "Common topic:"

SYSTEM_MESSAGE = (
    "You are an agent that summarizes scientific articles.\n"
    "- Follow the user's requirements carefully & to the letter."
)

USER_TEMPLATE = (
    "What is the topic commonly described in the following text snippets?\n"
    "Summarize the topic succinctly (i.e., 6 words or less).\n"
    'Reply with "Common topic: " followed by your response.\n'
    "---\n"
    "{documents}\n"
    "---"
)

FALLBACK_LABEL = "miscellaneous"

# Fixed stopword list for the deterministic keyword labeler.
STOPWORDS = frozenset(
    """
    a about above after again all also am an and any are as at be because
    been before being below between both but by can could did do does doing
    down during each few for from further had has have having he her here
    hers him his how i if in into is it its itself just me more most my no
    nor not of off on once only or other our ours out over own s same she
    should so some such t than that the their theirs them then there these
    they this those through to too under until up use used using very was
    we were what when where which while who whom why will with you your
    yours
    """.split()
)

# 12-color categorical palette; consumers index it with color_index % 12.
PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
    "#86bcb6",
    "#d37295",
)


@dataclass(frozen=True)
class LabelRequest:
    """Snippets for one labeling call; between 1 and MAX_SNIPPETS entries."""

    snippets: tuple[str, ...]

    def __post_init__(self):
        if not (1 <= len(self.snippets) <= MAX_SNIPPETS):
            raise ValueError(
                f"label request needs 1..{MAX_SNIPPETS} snippets, "
                f"got {len(self.snippets)}"
            )


def build_messages(request: LabelRequest) -> tuple[str, str]:
    """The (system, user) chat messages for a label request."""
    documents = "\n".join(request.snippets)
    return SYSTEM_MESSAGE, USER_TEMPLATE.format(documents=documents)


def parse_label_response(response: str | None) -> str | None:
    """Extract the topic from a protocol reply, or None on violation."""
    if response is None:
        return None
    text = response.strip()
    if not text.startswith(REPLY_PREFIX):
        return None
    topic = text[len(REPLY_PREFIX) :].strip().strip('"').strip()
    return topic or None


def keyword_label(
    texts: list[str], max_words: int = MAX_LABEL_WORDS
) -> str:
    """Most frequent content words across texts, ties alphabetical."""
    counts: Counter[str] = Counter()
    for text in texts:
        for token in tokenize(text):
            if token not in STOPWORDS:
                counts[token] += 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return " ".join(word for word, _ in ranked[:max_words])


class KeywordLabelGenerator:
    """Deterministic offline generator speaking the label protocol.

    Recovers the snippets from between the user message's fence lines and
    answers with their top content words, so the full request/response
    protocol is exercised without a model.
    """

    def complete(self, system: str, user: str) -> str:
        snippets = self._extract_snippets(user)
        label = keyword_label(snippets) or FALLBACK_LABEL
        return f"{REPLY_PREFIX} {label}"

    @staticmethod
    def _extract_snippets(user: str) -> list[str]:
        lines = user.split("\n")
        fences = [i for i, line in enumerate(lines) if line.strip() == "---"]
        if len(fences) < 2:
            return []
        return [
            line for line in lines[fences[0] + 1 : fences[-1]] if line.strip()
        ]


class RemoteChatGenerator:
    """Chat-endpoint generator; temperature 0 by default, bounded retries."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        temperature: float = 0.0,
        max_retries: int = 2,
        timeout: float = 60.0,
    ):
        import httpx

        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.max_retries = max(0, max_retries)
        headers = {}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(headers=headers, timeout=timeout)

    def complete(self, system: str, user: str) -> str:
        import httpx

        payload = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        last_error: Exception | None = None
        for _ in range(self.max_retries + 1):
            try:
                response = self._client.post(self.endpoint, json=payload)
                response.raise_for_status()
                return response.json()["content"]
            except (httpx.HTTPError, KeyError) as exc:
                last_error = exc
        raise ProviderUnreachableError("generation", str(last_error))


def select_snippets(
    texts: list[str],
    vectors: list[EmbeddingVector],
    max_snippets: int = MAX_SNIPPETS,
) -> list[str]:
    """At most max_snippets texts, keeping those nearest the centroid.

    Selection preserves the original order of the survivors. Ties on
    similarity keep the earlier text.
    """
    if len(texts) <= max_snippets:
        return list(texts)
    matrix = np.stack([v.values for v in vectors])
    centroid = EmbeddingVector(matrix.mean(axis=0))
    scored = [
        (-cosine(v, centroid), i) for i, v in enumerate(vectors)
    ]
    scored.sort()
    keep = sorted(i for _, i in scored[:max_snippets])
    return [texts[i] for i in keep]


def synthesize_label(
    texts: list[str],
    vectors: list[EmbeddingVector],
    generator,
    max_snippets: int = MAX_SNIPPETS,
    max_words: int = MAX_LABEL_WORDS,
) -> tuple[str, bool]:
    """One label for a set of member texts.

    Returns (label, degraded). Degraded means the generator failed outright
    and the deterministic keyword fallback was used.
    """
    snippets = select_snippets(texts, vectors, max_snippets)
    request = LabelRequest(snippets=tuple(snippets))
    system, user = build_messages(request)
    last_response: str | None = None
    for _ in range(2):
        try:
            last_response = generator.complete(system, user)
        except Exception:
            last_response = None
            continue
        topic = parse_label_response(last_response)
        if topic is not None and len(topic.split()) <= max_words:
            return topic, False
    if last_response is not None:
        # Out-of-protocol reply survived the retry: salvage by truncation.
        text = last_response.strip()
        if text.startswith(REPLY_PREFIX):
            text = text[len(REPLY_PREFIX) :]
        words = text.strip().strip('"').split()
        if words:
            return " ".join(words[:max_words]), False
    label = keyword_label(texts, max_words) or FALLBACK_LABEL
    return label, True


# ----------------------------------------------------------------------
# Thread tree


@dataclass
class ThreadNode:
    """A labeled hierarchy node; root holds groups, groups hold threads."""

    node_id: str
    level: str
    label: str = ""
    label_embedding: EmbeddingVector | None = field(default=None, repr=False)
    color_index: int | None = None
    degraded: bool = False
    children: list["ThreadNode"] = field(default_factory=list)
    contexts: list[FilteredContext] = field(default_factory=list)

    def all_contexts(self) -> list[FilteredContext]:
        collected = list(self.contexts)
        for child in self.children:
            collected.extend(child.all_contexts())
        return collected

    def total_context_count(self) -> int:
        return len(self.all_contexts())

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "level": self.level,
            "label": self.label,
            "color_index": self.color_index,
            "degraded": self.degraded,
            "children": [child.to_dict() for child in self.children],
            "contexts": [fc.to_dict() for fc in self.contexts],
        }


def label_hierarchy(
    skeleton: SkeletonNode,
    generator,
    embedder: EmbeddingProvider,
    max_snippets: int = MAX_SNIPPETS,
    max_words: int = MAX_LABEL_WORDS,
) -> ThreadNode:
    """Convert a skeleton into a labeled thread tree, labeling bottom-up.

    Nodes whose children are contexts are labeled from the member context
    texts (at most max_snippets, centroid-nearest); nodes with child nodes
    are labeled from the children's labels. The root is a container and is
    not labeled.
    """
    root = _to_thread_tree(skeleton, depth=0)
    _label_node(root, generator, embedder, max_snippets, max_words)
    return root


def _to_thread_tree(node: SkeletonNode, depth: int) -> ThreadNode:
    level = {0: "root", 1: "group"}.get(depth, "thread")
    return ThreadNode(
        node_id=node.node_id,
        level=level,
        children=[_to_thread_tree(child, depth + 1) for child in node.children],
        contexts=list(node.contexts),
    )


def _label_node(
    node: ThreadNode,
    generator,
    embedder: EmbeddingProvider,
    max_snippets: int,
    max_words: int,
) -> None:
    for child in node.children:
        _label_node(child, generator, embedder, max_snippets, max_words)
    if node.level == "root":
        return
    texts: list[str] = [child.label for child in node.children]
    vectors: list[EmbeddingVector | None] = [
        child.label_embedding for child in node.children
    ]
    texts.extend(fc.context.text for fc in node.contexts)
    vectors.extend(fc.embedding for fc in node.contexts)
    usable = [(t, v) for t, v in zip(texts, vectors) if t and v is not None]
    if not usable:
        node.label = FALLBACK_LABEL
        node.degraded = True
    else:
        node.label, node.degraded = synthesize_label(
            [t for t, _ in usable],
            [v for _, v in usable],
            generator,
            max_snippets,
            max_words,
        )
    node.label_embedding = embedder.embed([node.label])[0]


def merge_similar_threads(
    root: ThreadNode,
    generator,
    embedder: EmbeddingProvider,
    threshold: float = MERGE_THRESHOLD,
    max_snippets: int = MAX_SNIPPETS,
    max_words: int = MAX_LABEL_WORDS,
) -> ThreadNode:
    """Greedily merge near-duplicate sibling threads within each group.

    Repeatedly merges the sibling pair with the highest label-embedding
    cosine at or above the threshold; the survivor keeps the smaller
    node_id, concatenates the children, and gets a freshly synthesized
    label and embedding. Afterwards single-child chains are re-spliced.
    """
    for group in root.children:
        _merge_in_group(group, generator, embedder, threshold, max_snippets, max_words)
        if len(group.children) == 1 and not group.contexts:
            only = group.children[0]
            group.contexts = only.contexts
            group.children = only.children
    return root


def _merge_in_group(
    group: ThreadNode,
    generator,
    embedder: EmbeddingProvider,
    threshold: float,
    max_snippets: int,
    max_words: int,
) -> None:
    while len(group.children) >= 2:
        best: tuple[float, str, str] | None = None
        best_pair: tuple[ThreadNode, ThreadNode] | None = None
        threads = group.children
        for i in range(len(threads)):
            for j in range(i + 1, len(threads)):
                a, b = threads[i], threads[j]
                if a.label_embedding is None or b.label_embedding is None:
                    continue
                sim = cosine(a.label_embedding, b.label_embedding)
                if sim < threshold:
                    continue
                first, second = sorted((a, b), key=lambda t: t.node_id)
                key = (-sim, first.node_id, second.node_id)
                if best is None or key < best:
                    best = key
                    best_pair = (first, second)
        if best_pair is None:
            return
        survivor, absorbed = best_pair
        survivor.contexts = survivor.contexts + absorbed.contexts
        survivor.children = survivor.children + absorbed.children
        group.children = [t for t in group.children if t is not absorbed]
        member = survivor.all_contexts()
        survivor.label, survivor.degraded = synthesize_label(
            [fc.context.text for fc in member],
            [fc.embedding for fc in member],
            generator,
            max_snippets,
            max_words,
        )
        survivor.label_embedding = embedder.embed([survivor.label])[0]


def assign_colors(root: ThreadNode) -> ThreadNode:
    """Color top-level groups by descending context count; ties by node_id."""
    ordered = sorted(
        root.children, key=lambda g: (-g.total_context_count(), g.node_id)
    )
    for rank, group in enumerate(ordered):
        group.color_index = rank % len(PALETTE)
    return root


def count_degraded(root: ThreadNode) -> int:
    total = 1 if root.degraded else 0
    for child in root.children:
        total += count_degraded(child)
    return total
