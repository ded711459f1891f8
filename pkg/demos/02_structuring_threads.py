"""From ranked papers to a labeled thread hierarchy, stage by stage.

Replays the checked-in snapshot (198 papers around two seed surveys) and
walks the middle of the pipeline by hand: acquire full text for the top
ranked papers, filter citation contexts against the clip, cluster them,
cut the dendrogram into groups and threads, and label every node. The
output shows what each stage adds.

Run from the repository root:

    python3 demos/02_structuring_threads.py
"""

from __future__ import annotations

from threadloom.corpus.client import CorpusClient
from threadloom.corpus.snapshot import SnapshotStore, replay_providers
from threadloom.embedding import HashingEmbedder
from threadloom.graph import SeedClip, build_graph, weight_edges
from threadloom.labeling import (
    KeywordLabelGenerator,
    assign_colors,
    label_hierarchy,
    merge_similar_threads,
)
from threadloom.lbp import rank_candidates, run_lbp
from threadloom.structure import cluster, cut_to_hierarchy, filter_contexts

from _support import FIXTURE_CLIP, banner, require_snapshot


def main() -> None:
    store = SnapshotStore(require_snapshot())
    seeds = store.manifest()["seed_ids"]
    client = CorpusClient(**replay_providers(store))
    clips = [SeedClip("clip000", FIXTURE_CLIP, list(seeds))]

    banner("Fetch and infer")
    corpus = client.fetch_neighborhood(seeds)
    graph = build_graph(corpus, clips)
    weight_edges(graph, clips, HashingEmbedder())
    table = run_lbp(graph)
    ranked = rank_candidates(table, corpus)
    print(f"{len(corpus.papers)} papers fetched; top 30 kept for reading:")
    for entry in ranked[:5]:
        print(
            f"  {corpus.papers[entry.paper_id].title:42s} "
            f"relevance={entry.relevance:.4f}"
        )
    print("  ...")

    banner("Acquire full text and extract citation contexts")
    acquire_ids = list(seeds) + [r.paper_id for r in ranked]
    acquisitions = client.acquire_fulltext(acquire_ids)
    contexts = [c for result in acquisitions for c in result.contexts]
    by_source: dict[str, int] = {}
    for result in acquisitions:
        by_source[result.source] = by_source.get(result.source, 0) + 1
    print(f"{len(acquisitions)} papers acquired, {len(contexts)} contexts")
    print("acquisition sources:", dict(sorted(by_source.items())))

    banner("Filter against the clip (strict 0.80 threshold)")
    embedder = HashingEmbedder()
    filtered = filter_contexts(contexts, clips, embedder)
    print(f"{len(filtered)} of {len(contexts)} contexts pass the filter")
    sample = filtered[0]
    print(
        f"example (similarity {sample.mean_clip_similarity:.3f}): "
        f"{sample.context.text[:90]}..."
    )

    banner("Cluster and cut into groups and threads")
    skeleton = cut_to_hierarchy(cluster(filtered))
    root = label_hierarchy(skeleton, KeywordLabelGenerator(), embedder)
    merge_similar_threads(root, KeywordLabelGenerator(), embedder)
    assign_colors(root)

    print("labeled hierarchy (color = palette slot, n = contexts):")
    _print_tree(root)


def _print_tree(node, depth: int = 0) -> None:
    indent = "  " * depth
    color = f" color={node.color_index}" if node.color_index is not None else ""
    count = _count(node)
    if node.node_id == "root":
        print(f"{indent}root ({count} contexts)")
    else:
        print(f"{indent}{node.node_id}  {node.label!r}{color}  n={count}")
    for child in node.children:
        _print_tree(child, depth + 1)


def _count(node) -> int:
    return len(node.contexts) + sum(_count(child) for child in node.children)


if __name__ == "__main__":
    main()
