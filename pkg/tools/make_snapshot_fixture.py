"""Regenerate the checked-in snapshot fixture and golden synthesis artifact.

Builds a deterministic ~200-paper citation world around two seed papers,
records it into tests/data/snapshot through the real recording providers,
replays the full pipeline twice to prove determinism, and freezes the
canonical result JSON as tests/data/golden/hierarchy.json.

Run from the repository root:

    python3 tools/make_snapshot_fixture.py
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

from helpers import (  # noqa: E402
    SyntheticWorld,
    WorldFetcher,
    WorldMetadata,
    WorldParser,
    WorldSearch,
)
from threadloom.corpus.client import CorpusClient  # noqa: E402
from threadloom.corpus.snapshot import (  # noqa: E402
    RecordingMetadataProvider,
    SnapshotStore,
    record_acquisitions,
    replay_providers,
)
from threadloom.embedding import HashingEmbedder  # noqa: E402
from threadloom.graph import SeedClip  # noqa: E402
from threadloom.jsonio import dumps_canonical  # noqa: E402
from threadloom.labeling import KeywordLabelGenerator  # noqa: E402
from threadloom.orchestrator import PipelineConfig, run_synthesis  # noqa: E402

SNAPSHOT_DIR = REPO / "tests" / "data" / "snapshot"
GOLDEN_PATH = REPO / "tests" / "data" / "golden" / "hierarchy.json"

# Shared methodology vocabulary. Contexts repeat all of it, so their
# cosine to the clip stays well above the 0.80 relevance filter while the
# per-topic marker words still dominate keyword labels.
BASE = (
    "anchor corpus baseline evidence measure method passage query "
    "relevance retrieval shared signal study survey tokens benchmark "
    "dataset protocol metric sampling replication artifact notation "
    "appendix citation footnote paragraph section table figure abstract "
    "introduction discussion conclusion review procedure material "
    "analysis experiment observation"
)

TOPICS = {
    "seed_alpha": [
        "sparse attention kernels",
        "protein folding dynamics",
        "quantum error correction",
        "federated gradient privacy",
    ],
    "seed_beta": [
        "graphene lattice phonons",
        "coral reef bleaching",
        "galaxy cluster lensing",
        "wildfire smoke transport",
    ],
}

PAPERS_PER_TOPIC = 7
CITERS_PER_PAPER = 2
SERIES = ["alpha", "bravo"]


def build_fixture_world() -> tuple[SyntheticWorld, list[str], str]:
    assert len(BASE.split()) == 40
    world = SyntheticWorld()
    seeds = sorted(TOPICS)

    # Classic literature on the reference side of each seed. One classic
    # is shared, giving every topic paper a one-reference overlap with
    # both its seed's bibliography.
    shared_classic = "classic_shared"
    world.add_paper(
        shared_classic,
        title="Classic shared foundation treatise",
        abstract="The originating formulation cited across both fields.",
        year=1981,
        citation_count=950,
    )
    older_ids: list[str] = []
    classics_by_seed: dict[str, list[str]] = {}
    for s_index, seed in enumerate(seeds):
        classics = [shared_classic]
        for c_index in range(3):
            classic_id = f"classic_{seed}_{c_index}"
            olders = []
            for o_index in range(3):
                older_id = f"older_{seed}_{c_index}_{o_index}"
                world.add_paper(
                    older_id,
                    title=f"Early groundwork volume {seed} {c_index}.{o_index}",
                    abstract="Original groundwork for later treatises.",
                    year=1970 + o_index,
                    citation_count=400 - 20 * s_index - 6 * c_index - o_index,
                )
                older_ids.append(older_id)
                olders.append(older_id)
            world.add_paper(
                classic_id,
                title=f"Classic treatise {seed} {c_index}",
                abstract="A canonical treatment of the foundations.",
                year=1990 + c_index,
                citation_count=900 - 10 * s_index - c_index,
                references=tuple(olders),
            )
            for older_id in olders:
                world.add_link_context(
                    classic_id, older_id,
                    "Extends the original formulation of the groundwork.",
                )
            classics.append(classic_id)
        classics_by_seed[seed] = classics

    for o_index in range(3):
        older_id = f"older_shared_{o_index}"
        world.add_paper(
            older_id,
            title=f"Early shared groundwork {o_index}",
            abstract="Shared groundwork behind the common treatise.",
            year=1965 + o_index,
            citation_count=380 - o_index,
        )
        older_ids.append(older_id)
    shared_olders = tuple(f"older_shared_{i}" for i in range(3))
    world.papers[shared_classic].reference_ids = list(shared_olders)
    for older_id in shared_olders:
        world.citing.setdefault(older_id, []).append(shared_classic)
        world.add_link_context(
            shared_classic, older_id,
            "Extends the original formulation of the groundwork.",
        )

    for s_index, seed in enumerate(seeds):
        world.add_paper(
            seed,
            title=f"Seed synthesis overview {seed.split('_')[1]}",
            abstract=f"Query overview spanning {BASE}.",
            year=2020,
            venue="Journal of Integrative Surveys",
            authors=("R. Example", "T. Sample"),
            citation_count=1000 - s_index,
            references=tuple(classics_by_seed[seed]),
        )
        for classic_id in classics_by_seed[seed]:
            world.add_link_context(
                seed, classic_id,
                "Grounded in the classical foundation of the field.",
            )

    # Topic papers cite their seed; two per seed are only reachable by
    # web search so the snapshot records every acquisition source.
    topic_rank = 0
    for seed in seeds:
        for t_index, topic in enumerate(TOPICS[seed]):
            markers = topic
            slug = topic.split()[0]
            for p_index in range(PAPERS_PER_TOPIC):
                pid = f"p_{slug}_{p_index:02d}"
                topic_rank += 1
                searched = t_index == 0 and p_index == 0
                title = f"Study of {markers} {p_index}"
                world.add_paper(
                    pid,
                    title=title,
                    abstract=f"Findings about {markers}.",
                    year=2015 + p_index % 8,
                    venue=f"Conference on {slug.title()} Research",
                    authors=(f"A. {slug.title()}", "B. Cowriter"),
                    citation_count=800 - topic_rank,
                    references=(seed, shared_classic),
                    pdf_url=None if searched else f"http://pdfs/{pid}.pdf",
                )
                if searched:
                    world.search_urls[title] = [f"http://mirror/{pid}.pdf"]
                world.add_link_context(
                    pid, seed, f"{markers} {BASE} {markers} link note."
                )
                sentences = {}
                bibliography = {}
                for j, series in enumerate(SERIES):
                    key = str(1 + (p_index * len(SERIES) + j) % 9)
                    bibliography[key] = seed
                    sentences[f"Section {j}"] = [
                        f"{markers} {BASE} {markers} insight {series} [{key}]."
                    ]
                world.add_document(pid, sentences, bibliography)

                for c_index in range(CITERS_PER_PAPER):
                    citer_id = f"cite_{slug}_{p_index:02d}_{c_index}"
                    world.add_paper(
                        citer_id,
                        title=f"Follow-up on {markers} {p_index}.{c_index}",
                        abstract="A later application of the pipeline.",
                        year=2021,
                        citation_count=300 - topic_rank * 2 - c_index,
                        references=(pid,),
                    )
                    world.add_link_context(
                        citer_id, pid,
                        "Builds directly on the earlier analysis pipeline.",
                    )

    # One short cycle per seed: the first follow-up in topic 0 also cites
    # the topic's second paper, so the inference graph is genuinely loopy.
    for seed in seeds:
        slug = TOPICS[seed][0].split()[0]
        citer = f"cite_{slug}_00_0"
        second = f"p_{slug}_01"
        world.papers[citer].reference_ids.append(second)
        world.citing.setdefault(second, []).append(citer)
        world.add_link_context(
            citer, second, "Combines both lines of prior analysis."
        )

    clip_text = BASE
    return world, seeds, clip_text


def record_snapshot(world, seeds) -> None:
    if SNAPSHOT_DIR.exists():
        shutil.rmtree(SNAPSHOT_DIR)
    store = SnapshotStore(SNAPSHOT_DIR)
    recording = RecordingMetadataProvider(WorldMetadata(world), store)
    client = CorpusClient(
        recording,
        search=WorldSearch(world),
        fetcher=WorldFetcher(),
        parser=WorldParser(world),
    )
    store.record_manifest(seeds, per_direction_cap=50)
    corpus = client.fetch_neighborhood(seeds, per_direction_cap=50)
    store.flush_neighborhood()
    record_acquisitions(client, store, sorted(corpus.papers))
    print(f"recorded {len(corpus.papers)} papers into {SNAPSHOT_DIR}")
    assert 180 <= len(corpus.papers) <= 240, len(corpus.papers)


def replay_once(seeds, clip_text) -> dict:
    providers = replay_providers(SnapshotStore(SNAPSHOT_DIR))
    client = CorpusClient(**providers)
    clips = [SeedClip("clip000", clip_text, list(seeds))]
    return run_synthesis(
        clips,
        client,
        HashingEmbedder(),
        KeywordLabelGenerator(),
        config=PipelineConfig(),
    )


def count_contexts(node: dict) -> int:
    total = len(node.get("contexts", []))
    for child in node.get("children", []):
        total += count_contexts(child)
    return total


def main() -> int:
    world, seeds, clip_text = build_fixture_world()
    record_snapshot(world, seeds)

    first = replay_once(seeds, clip_text)
    second = replay_once(seeds, clip_text)
    if dumps_canonical(first) != dumps_canonical(second):
        print("replay is not deterministic; refusing to freeze", file=sys.stderr)
        return 1

    assert first["empty"] is False
    groups = first["hierarchy"]["children"]
    contexts = count_contexts(first["hierarchy"])
    assert len(groups) >= 2, f"only {len(groups)} top groups"
    assert contexts >= 30, f"only {contexts} contexts survived the filter"
    assert len(first["ranked_papers"]) == 30

    GOLDEN_PATH.parent.mkdir(parents=True, exist_ok=True)
    GOLDEN_PATH.write_text(dumps_canonical(first), encoding="utf-8")
    print(
        f"golden written: {GOLDEN_PATH} "
        f"({len(groups)} groups, {contexts} contexts, "
        f"{len(first['papers'])} papers in result)"
    )
    labels = [child["label"] for child in groups]
    print("group labels:", labels)
    return 0


if __name__ == "__main__":
    sys.exit(main())
