"""Context filtering, Ward clustering, and hierarchy cutting.

The structuring pass takes acquired citation contexts to a three-level
skeleton: contexts are filtered by mean similarity to the seed clips,
clustered bottom-up with Ward linkage, and the dendrogram is cut twice to
yield top-level groups of mid-level threads of leaf contexts. Undersized
threads are absorbed into their nearest sibling and redundant single-child
nodes are spliced out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus.models import CitationContext
from .embedding import EmbeddingProvider, EmbeddingVector, cosine, embed_each
from .graph import SeedClip

FILTER_THRESHOLD = 0.80
MAX_TOP_GROUPS = 8
MAX_THREADS = 25
MIN_THREAD_SIZE = 2


@dataclass
class FilteredContext:
    """A context that survived the clip-similarity filter."""

    context: CitationContext
    embedding: EmbeddingVector
    mean_clip_similarity: float

    @property
    def context_id(self) -> str:
        return self.context.context_id

    def to_dict(self) -> dict:
        payload = self.context.to_dict()
        payload["mean_clip_similarity"] = self.mean_clip_similarity
        return payload


def filter_contexts(
    contexts: list[CitationContext],
    clips: list[SeedClip],
    embedder: EmbeddingProvider,
    threshold: float = FILTER_THRESHOLD,
) -> list[FilteredContext]:
    """Keep contexts whose mean cosine to all clips strictly exceeds threshold.

    The comparison is exclusive: a mean similarity exactly at the threshold
    drops the context. Contexts that fail to embed are dropped. Input order
    is preserved.
    """
    if not clips:
        raise ValueError("at least one seed clip is required")
    clip_vectors = embedder.embed([clip.text for clip in clips])
    vectors = embed_each(embedder, [context.text for context in contexts])
    kept = []
    for context, vector in zip(contexts, vectors):
        if vector is None:
            continue
        mean = sum(cosine(vector, cv) for cv in clip_vectors) / len(clip_vectors)
        if mean > threshold:
            kept.append(
                FilteredContext(
                    context=context, embedding=vector, mean_clip_similarity=mean
                )
            )
    return kept


# ----------------------------------------------------------------------
# Agglomerative clustering


@dataclass(frozen=True)
class Merge:
    """One agglomeration step over cluster indices.

    Leaves are clusters 0..n-1; the merge at step s creates cluster n+s.
    `a` < `b` always; `height` is the Ward distance at which the pair
    merged and `size` the merged cluster's leaf count.
    """

    a: int
    b: int
    height: float
    size: int


@dataclass
class Dendrogram:
    """Leaves in canonical order plus the full merge sequence."""

    leaves: list[FilteredContext]
    merges: list[Merge]

    def clusters_after(self, k: int) -> list[list[int]]:
        """Leaf-index clusters after applying the first k merges.

        Clusters are ordered by their smallest leaf index.
        """
        members: dict[int, list[int]] = {i: [i] for i in range(len(self.leaves))}
        for step, merge in enumerate(self.merges[:k]):
            merged = members.pop(merge.a) + members.pop(merge.b)
            members[len(self.leaves) + step] = merged
        clusters = [sorted(m) for m in members.values()]
        clusters.sort(key=lambda c: c[0])
        return clusters


def cluster(items: list[FilteredContext]) -> Dendrogram:
    """Ward-linkage agglomerative clustering via the Lance-Williams update.

    Input is first put in canonical order by context_id so permutations of
    the same set produce the identical dendrogram. Base distances are
    squared Euclidean between embeddings; at each step the pair at minimum
    Ward distance merges, ties broken by the lexicographically smallest
    cluster-index pair.
    """
    ordered = sorted(items, key=lambda fc: fc.context_id)
    ids = [fc.context_id for fc in ordered]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate context_ids in clustering input")
    n = len(ordered)
    if n <= 1:
        return Dendrogram(leaves=ordered, merges=[])

    points = np.stack([fc.embedding.values for fc in ordered])
    sq_norms = np.sum(points * points, axis=1)
    base = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (points @ points.T)
    np.maximum(base, 0.0, out=base)

    total = 2 * n - 1
    dist = np.full((total, total), np.inf)
    dist[:n, :n] = base
    np.fill_diagonal(dist, np.inf)
    size = np.zeros(total, dtype=np.int64)
    size[:n] = 1

    active: list[int] = list(range(n))
    merges: list[Merge] = []
    for step in range(n - 1):
        act = np.array(active)
        sub = dist[np.ix_(act, act)]
        iu = np.triu_indices(len(act), k=1)
        flat = sub[iu]
        # argmin scans upper-triangle pairs in lexicographic (i, j) order,
        # so the first minimum is the required tie-break.
        k = int(np.argmin(flat))
        i = int(act[iu[0][k]])
        j = int(act[iu[1][k]])
        height = float(flat[k])
        new = n + step
        others = np.array([c for c in active if c != i and c != j], dtype=np.int64)
        if others.size:
            ni, nj = float(size[i]), float(size[j])
            nc = size[others].astype(np.float64)
            updated = (
                (ni + nc) * dist[i, others]
                + (nj + nc) * dist[j, others]
                - nc * dist[i, j]
            ) / (ni + nj + nc)
            dist[new, others] = updated
            dist[others, new] = updated
        size[new] = size[i] + size[j]
        active = [c for c in active if c != i and c != j] + [new]
        merges.append(Merge(a=i, b=j, height=height, size=int(size[new])))
    return Dendrogram(leaves=ordered, merges=merges)


def ward_merge_cost(
    a_indices: list[int], b_indices: list[int], points: np.ndarray
) -> float:
    """Ward distance between two disjoint leaf-index clusters.

    Equals 2 * |A||B| / (|A|+|B|) * ||centroid(A) - centroid(B)||^2, the
    same quantity the Lance-Williams recurrence tracks.
    """
    ca = points[a_indices].mean(axis=0)
    cb = points[b_indices].mean(axis=0)
    na, nb = float(len(a_indices)), float(len(b_indices))
    gap = ca - cb
    return 2.0 * (na * nb / (na + nb)) * float(np.dot(gap, gap))


# ----------------------------------------------------------------------
# Hierarchy cutting


@dataclass
class SkeletonNode:
    """A node of the cut hierarchy: child nodes plus directly held contexts."""

    node_id: str
    children: list["SkeletonNode"] = field(default_factory=list)
    contexts: list[FilteredContext] = field(default_factory=list)

    def payload_count(self) -> int:
        return len(self.children) + len(self.contexts)

    def all_contexts(self) -> list[FilteredContext]:
        collected = list(self.contexts)
        for child in self.children:
            collected.extend(child.all_contexts())
        return collected

    def depth(self) -> int:
        """Longest path from this node down to a context leaf."""
        best = 1 if self.contexts else 0
        for child in self.children:
            best = max(best, 1 + child.depth())
        return best


def cut_to_hierarchy(
    dendrogram: Dendrogram,
    max_top_groups: int = MAX_TOP_GROUPS,
    max_threads: int = MAX_THREADS,
    min_thread_size: int = MIN_THREAD_SIZE,
) -> SkeletonNode:
    """Cut a dendrogram into root -> groups -> threads -> contexts.

    The two cut heights are the smallest yielding at most `max_top_groups`
    top clusters and at most `max_threads` mid clusters; since heights are
    non-decreasing these reduce to applying the last and second-to-last
    prefixes of the merge sequence. Mid clusters smaller than
    `min_thread_size` are absorbed into their nearest sibling by Ward
    distance (when they have one), then every non-root node left holding a
    single payload is spliced out, which can place contexts directly under
    a group or the root for degenerate shapes.

    A single-leaf dendrogram keeps the full one-group, one-thread chain.
    """
    if max_top_groups < 1 or max_threads < 1 or min_thread_size < 1:
        raise ValueError("cut parameters must be at least 1")
    n = len(dendrogram.leaves)
    root = SkeletonNode(node_id="root")
    if n == 0:
        return root
    if n == 1:
        thread = SkeletonNode(node_id="g000.t000", contexts=list(dendrogram.leaves))
        group = SkeletonNode(node_id="g000", children=[thread])
        root.children.append(group)
        return root

    k_top = max(0, n - max_top_groups)
    k_mid = min(max(0, n - max_threads), k_top)
    tops = dendrogram.clusters_after(k_top)
    mids = dendrogram.clusters_after(k_mid)

    top_of_leaf: dict[int, int] = {}
    for top_index, members in enumerate(tops):
        for leaf in members:
            top_of_leaf[leaf] = top_index
    grouped: list[list[list[int]]] = [[] for _ in tops]
    for members in mids:
        grouped[top_of_leaf[members[0]]].append(members)

    points = np.stack([fc.embedding.values for fc in dendrogram.leaves])
    leaf_ids = [fc.context_id for fc in dendrogram.leaves]
    for group_index in range(len(grouped)):
        grouped[group_index] = _absorb_small(
            grouped[group_index], points, leaf_ids, min_thread_size
        )

    for group_index, threads in enumerate(grouped):
        group = SkeletonNode(node_id=f"g{group_index:03d}")
        for thread_index, members in enumerate(threads):
            thread = SkeletonNode(
                node_id=f"g{group_index:03d}.t{thread_index:03d}",
                contexts=[dendrogram.leaves[i] for i in members],
            )
            group.children.append(thread)
        root.children.append(group)

    _splice(root)
    _assign_ids(root)
    return root


def _absorb_small(
    threads: list[list[int]],
    points: np.ndarray,
    leaf_ids: list[str],
    min_thread_size: int,
) -> list[list[int]]:
    """Merge undersized threads into their nearest sibling, smallest first."""
    threads = [sorted(t) for t in threads]
    while len(threads) >= 2:
        small = [t for t in threads if len(t) < min_thread_size]
        if not small:
            break
        small.sort(key=lambda t: (len(t), leaf_ids[t[0]]))
        target = small[0]
        rest = [t for t in threads if t is not target]
        rest.sort(key=lambda t: (ward_merge_cost(target, t, points), leaf_ids[t[0]]))
        sibling = rest[0]
        merged = sorted(target + sibling)
        threads = [t for t in threads if t is not target and t is not sibling]
        threads.append(merged)
        threads.sort(key=lambda t: leaf_ids[t[0]])
    return threads


def _splice(node: SkeletonNode) -> None:
    """Remove descendants holding exactly one payload, bottom-up."""
    new_children: list[SkeletonNode] = []
    for child in node.children:
        _splice(child)
        if child.payload_count() == 1:
            if child.children:
                new_children.append(child.children[0])
            else:
                node.contexts.append(child.contexts[0])
        else:
            new_children.append(child)
    node.children = new_children


def _assign_ids(root: SkeletonNode) -> None:
    """Renumber internal nodes by position: g000, g000.t000, ..."""
    for group_index, group in enumerate(root.children):
        group.node_id = f"g{group_index:03d}"
        for thread_index, thread in enumerate(group.children):
            thread.node_id = f"g{group_index:03d}.t{thread_index:03d}"
