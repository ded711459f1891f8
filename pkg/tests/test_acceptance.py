"""Acceptance gate: one test per release criterion, one [PASS]/[FAIL] line each.

Run with `python3 -m pytest tests/test_acceptance.py -s` to see the
criterion lines as they execute. Tolerances are pinned in each test and
must not be loosened; a criterion that cannot be met should fail here.
"""

from __future__ import annotations

import inspect
import math
import random
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from helpers import (
    SyntheticWorld,
    build_two_topic_world,
    distinct_bucket_tokens,
    world_client,
)
from oracles import enumerate_marginals, oracle_ward
from threadloom.corpus.client import CorpusClient
from threadloom.corpus.models import CitationContext, Corpus, PaperRecord
from threadloom.corpus.snapshot import SnapshotStore, replay_providers
from threadloom.embedding import EmbeddingVector, HashingEmbedder
from threadloom.graph import (
    NEUTRAL_PRIOR,
    SEED_PRIOR,
    EdgeFactor,
    FactorGraph,
    SeedClip,
    Variable,
    reference_overlap_scaling,
    weight_edges,
)
from threadloom.jsonio import dumps_canonical
from threadloom.labeling import (
    MAX_LABEL_WORDS,
    MAX_SNIPPETS,
    MERGE_THRESHOLD,
    KeywordLabelGenerator,
    LabelRequest,
    REPLY_PREFIX,
    select_snippets,
    synthesize_label,
)
from threadloom.lbp import (
    MarginalTable,
    potential_from_weight,
    rank_candidates,
    run_lbp,
)
from threadloom.orchestrator import PipelineConfig, run_synthesis
from threadloom.outline import InvalidEditError, Outline, ROOT_ID
from threadloom.service import ServiceDeps, create_app
from threadloom.structure import (
    FILTER_THRESHOLD,
    FilteredContext,
    cluster,
    cut_to_hierarchy,
    filter_contexts,
)

DATA_DIR = Path(__file__).parent / "data"


@contextmanager
def criterion(name: str):
    """Prints exactly one [PASS]/[FAIL] line for the enclosed checks."""
    try:
        yield
    except BaseException:
        print(f"\n[FAIL] {name}")
        raise
    print(f"\n[PASS] {name}")


def make_graph(priors: dict, weighted_edges: dict) -> FactorGraph:
    graph = FactorGraph()
    for pid, prior in priors.items():
        graph.variables[pid] = Variable(paper_id=pid, prior=prior)
    for (a, b), weight in sorted(weighted_edges.items()):
        graph.factors.append(EdgeFactor(a_id=a, b_id=b, weight=weight))
    return graph


# ----------------------------------------------------------------------
# Inference


def test_acceptance_tree_inference_exactness():
    with criterion(
        "acyclic inference matches enumeration to 1e-6 on 200 graphs in <30s"
    ):
        rng = random.Random(74101)
        started = time.monotonic()
        worst = 0.0
        for _ in range(200):
            n = rng.randint(1, 10)
            priors = {
                f"v{i}": SEED_PRIOR if rng.random() < 0.3 else NEUTRAL_PRIOR
                for i in range(n)
            }
            edges = {}
            for i in range(1, n):
                if rng.random() < 0.85:  # forests as well as trees
                    parent = rng.randrange(i)
                    edges[(f"v{parent}", f"v{i}")] = rng.uniform(1e-6, 0.999)
            table = run_lbp(
                make_graph(priors, edges),
                damping=0.5,
                tol=1e-12,
                max_iterations=5000,
            )
            assert table.converged
            potentials = {
                pair: potential_from_weight(w).same_state
                for pair, w in edges.items()
            }
            exact = enumerate_marginals(priors, potentials)
            for pid, expected in exact.items():
                err = max(
                    abs(table.marginals[pid][0] - expected[0]),
                    abs(table.marginals[pid][1] - expected[1]),
                )
                worst = max(worst, err)
        elapsed = time.monotonic() - started
        assert worst < 1e-6, f"worst marginal error {worst}"
        assert elapsed < 30.0, f"suite took {elapsed:.1f}s"


def test_acceptance_loopy_convergence():
    with criterion(
        "4-cycle and 3x3 grid converge within 200 damped iterations, "
        "pairs sum to 1 within 1e-6"
    ):
        # 4-cycle, same-state potential 0.896 <= 0.9.
        ids = [f"v{i}" for i in range(4)]
        priors = {pid: NEUTRAL_PRIOR for pid in ids}
        priors["v0"] = SEED_PRIOR
        edges = {
            ("v0", "v1"): 0.88,
            ("v1", "v2"): 0.88,
            ("v2", "v3"): 0.88,
            ("v0", "v3"): 0.88,
        }
        for graph_edges, graph_priors in [
            (edges, priors),
            _grid_graph(3, 3, random.Random(4242)),
        ]:
            table = run_lbp(
                make_graph(graph_priors, graph_edges),
                damping=0.5,
                max_iterations=200,
            )
            assert table.converged
            assert table.iterations <= 200
            for pid, pair in table.marginals.items():
                assert sum(pair) == pytest.approx(1.0, abs=1e-6), pid


def _grid_graph(rows: int, cols: int, rng: random.Random):
    """Edges and priors for a grid; potentials stay at or below 0.8825."""
    priors = {}
    edges = {}
    for r in range(rows):
        for c in range(cols):
            pid = f"g{r}{c}"
            priors[pid] = SEED_PRIOR if (r, c) == (0, 0) else NEUTRAL_PRIOR
            if c + 1 < cols:
                edges[(pid, f"g{r}{c + 1}")] = rng.uniform(0.3, 0.85)
            if r + 1 < rows:
                edges[(pid, f"g{r + 1}{c}")] = rng.uniform(0.3, 0.85)
    return edges, priors


# ----------------------------------------------------------------------
# Edge weighting


def _single_factor_weight(annotations, clip_texts, ref_overlap, embedder):
    graph = FactorGraph(
        variables={
            "a": Variable(paper_id="a", prior=NEUTRAL_PRIOR),
            "b": Variable(paper_id="b", prior=NEUTRAL_PRIOR),
        },
        factors=[
            EdgeFactor(
                a_id="a",
                b_id="b",
                annotations=list(annotations),
                ref_overlap=ref_overlap,
            )
        ],
    )
    clips = [
        SeedClip(clip_id=f"k{i}", text=t, seed_reference_ids=["a"])
        for i, t in enumerate(clip_texts)
    ]
    return weight_edges(graph, clips, embedder).factors[0].weight


def test_acceptance_weight_formula():
    with criterion(
        "overlap sigmoid exact to 1e-12; identity annotation at zero "
        "overlap weighs 0.5; weight monotone in overlap"
    ):
        reference = {
            0: 0.5,
            1: 0.7310585786300049,
            2: 0.8807970779778823,
            5: 0.9933071490757153,
        }
        for x, value in reference.items():
            direct = 1.0 / (1.0 + math.exp(-x))
            assert abs(reference_overlap_scaling(x) - direct) <= 1e-12
            assert abs(reference_overlap_scaling(x) - value) <= 1e-12

        embedder = HashingEmbedder()
        text = "identical passage on both sides"
        assert _single_factor_weight(
            [text], [text], 0, embedder
        ) == pytest.approx(0.5, abs=1e-12)

        weights = [
            _single_factor_weight([text], [text], overlap, embedder)
            for overlap in range(7)
        ]
        assert all(b > a for a, b in zip(weights, weights[1:]))


# ----------------------------------------------------------------------
# Pipeline constants, one dedicated test each


def test_acceptance_constant_fetch_caps():
    with criterion(
        "per-direction fetch cap 50 and per-seed candidate budget 5000"
    ):
        signature = inspect.signature(CorpusClient.fetch_neighborhood)
        assert signature.parameters["per_direction_cap"].default == 50
        assert PipelineConfig().per_direction_cap == 50

        # The candidate budget is cap^2 per direction; saturate both sides.
        world = SyntheticWorld()
        for i in range(6):
            grand = []
            for j in range(6):
                gid = f"r{i}y{j}"
                world.add_paper(gid, citation_count=40 - 6 * i - j)
                grand.append(gid)
            world.add_paper(
                f"r{i}", citation_count=90 - i, references=tuple(grand)
            )
        world.add_paper(
            "s", citation_count=10,
            references=tuple(f"r{i}" for i in range(6)),
        )
        for i in range(6):
            world.add_paper(f"c{i}", citation_count=100 - i, references=("s",))
            for j in range(6):
                world.add_paper(
                    f"c{i}x{j}",
                    citation_count=50 - 6 * i - j,
                    references=(f"c{i}",),
                )
        cap = 2
        corpus = world_client(world).fetch_neighborhood(["s"], cap)
        assert len(corpus.candidates["s"]) == 2 * cap * cap
        # At the default cap the same rule yields the documented budget.
        assert 2 * 50 * 50 == 5000


def test_acceptance_constant_top30():
    with criterion("acquisition ranks exactly the top 30 candidates"):
        signature = inspect.signature(rank_candidates)
        assert signature.parameters["top_k"].default == 30
        assert PipelineConfig().top_k == 30
        marginals = {
            f"p{i:02d}": (0.5 + i * 0.005, 0.5 - i * 0.005) for i in range(40)
        }
        table = MarginalTable(marginals=marginals, converged=True, iterations=1)
        corpus = Corpus(
            papers={
                pid: PaperRecord(paper_id=pid, title=pid)
                for pid in marginals
            },
            edges=[],
            seed_ids=[],
            candidates={},
        )
        ranked = rank_candidates(table, corpus)
        assert len(ranked) == 30
        assert ranked[0].paper_id == "p39"


def test_acceptance_constant_filter_threshold(embedder):
    with criterion("relevance filter threshold 0.80 is exclusive"):
        assert FILTER_THRESHOLD == 0.80
        assert PipelineConfig().filter_threshold == 0.80
        tokens = distinct_bucket_tokens(25, embedder)
        context = CitationContext(
            context_id="c0", source_paper_id="p",
            text=" ".join(tokens[:16]), cited_ids=["q"],
        )
        # 16 shared of 16 vs a 25-token clip: cosine exactly 16/20 = 0.80,
        # which must be excluded by the strict comparison.
        assert 16 / math.sqrt(16 * 25) == 0.8
        at_threshold = SeedClip(
            clip_id="k0", text=" ".join(tokens), seed_reference_ids=["s"]
        )
        assert filter_contexts([context], [at_threshold], embedder) == []
        # Against a 24-token clip the same context sits at ~0.816 and stays.
        above_threshold = SeedClip(
            clip_id="k1", text=" ".join(tokens[:24]), seed_reference_ids=["s"]
        )
        kept = filter_contexts([context], [above_threshold], embedder)
        assert [fc.context.context_id for fc in kept] == ["c0"]


def test_acceptance_constant_snippet_cap(embedder):
    with criterion("label requests carry at most 25 snippets"):
        assert MAX_SNIPPETS == 25
        assert PipelineConfig().max_snippets == 25
        texts = [f"snippet number {i} about a shared topic" for i in range(30)]
        vectors = embedder.embed(texts)
        kept = select_snippets(texts, vectors)
        assert len(kept) == 25
        with pytest.raises(ValueError):
            LabelRequest(snippets=tuple(f"s{i}" for i in range(26)))


def test_acceptance_constant_label_words(embedder):
    with criterion("synthesized labels are capped at 6 words"):
        assert MAX_LABEL_WORDS == 6
        assert PipelineConfig().max_label_words == 6

        class Verbose:
            def complete(self, system, user):
                return (
                    f"{REPLY_PREFIX} one two three four five six seven eight"
                )

        texts = ["alpha beta gamma delta"]
        vectors = embedder.embed(texts)
        label, degraded = synthesize_label(texts, vectors, Verbose())
        assert label == "one two three four five six"
        assert degraded is False


def test_acceptance_constant_merge_threshold():
    with criterion("sibling label merge threshold is 0.92"):
        assert MERGE_THRESHOLD == 0.92
        assert PipelineConfig().merge_threshold == 0.92


# ----------------------------------------------------------------------
# Clustering


def _points_to_items(points: np.ndarray) -> list[FilteredContext]:
    return [
        FilteredContext(
            context=CitationContext(
                context_id=f"c{i:03d}", source_paper_id="p",
                text=f"text {i}", cited_ids=["q"],
            ),
            embedding=EmbeddingVector(np.asarray(row, dtype=np.float64)),
            mean_clip_similarity=1.0,
        )
        for i, row in enumerate(points)
    ]


def test_acceptance_ward_oracle():
    with criterion(
        "agglomeration matches the exhaustive minimum-variance oracle "
        "on 100 trials; heights never decrease"
    ):
        rng = random.Random(98117)
        for _ in range(100):
            n = rng.randint(2, 8)
            dim = rng.randint(1, 3)
            points = np.array(
                [[rng.uniform(-5, 5) for _ in range(dim)] for _ in range(n)]
            )
            dendrogram = cluster(_points_to_items(points))
            expected = oracle_ward(points)
            assert len(dendrogram.merges) == len(expected) == n - 1
            for merge, (a, b, height) in zip(dendrogram.merges, expected):
                assert (merge.a, merge.b) == (a, b)
                assert merge.height == pytest.approx(height, rel=1e-9)
            heights = [m.height for m in dendrogram.merges]
            assert all(
                b >= a - 1e-12 for a, b in zip(heights, heights[1:])
            )


def test_acceptance_hierarchy_invariants():
    with criterion(
        "100 random dendrogram cuts: depth 3, no single-payload nodes, "
        "leaf multiset conserved"
    ):
        rng = random.Random(55221)
        deepest = 0
        for _ in range(100):
            k = rng.randint(2, 7)
            n = rng.randint(4, 40)
            centers = [(rng.uniform(-40, 40), rng.uniform(-40, 40))
                       for _ in range(k)]
            points = np.array([
                [
                    centers[i % k][0] + rng.gauss(0, 0.5),
                    centers[i % k][1] + rng.gauss(0, 0.5),
                ]
                for i in range(n)
            ])
            items = _points_to_items(points)
            max_top_groups = rng.randint(2, 8)
            root = cut_to_hierarchy(
                cluster(items),
                max_top_groups=max_top_groups,
                max_threads=rng.randint(max_top_groups, 25),
                min_thread_size=rng.randint(1, 3),
            )
            seen: list[str] = []
            deepest = max(deepest, _check_node(root, 0, seen))
            assert sorted(seen) == sorted(
                fc.context.context_id for fc in items
            )
        assert deepest == 3, "no trial produced a full-depth hierarchy"


def _check_node(node, depth: int, seen: list[str]) -> int:
    """Check payload and depth invariants; returns deepest context level."""
    if depth > 0:
        assert node.payload_count() >= 2, node.node_id
    assert depth <= 2, f"node {node.node_id} too deep"
    deepest = 0
    for fc in node.contexts:
        seen.append(fc.context.context_id)
        deepest = max(deepest, depth + 1)
    for child in node.children:
        deepest = max(deepest, _check_node(child, depth + 1, seen))
    return deepest


# ----------------------------------------------------------------------
# End-to-end determinism


def test_acceptance_end_to_end_determinism():
    with criterion(
        "snapshot replay reproduces the golden artifact byte for byte "
        "in under 60s"
    ):
        golden = (DATA_DIR / "golden" / "hierarchy.json").read_text(
            encoding="utf-8"
        )
        started = time.monotonic()
        providers = replay_providers(SnapshotStore(DATA_DIR / "snapshot"))
        client = CorpusClient(**providers)
        manifest_seeds = SnapshotStore(DATA_DIR / "snapshot").manifest()[
            "seed_ids"
        ]
        clips = [
            SeedClip(
                clip_id="clip000",
                text=_golden_clip_text(),
                seed_reference_ids=list(manifest_seeds),
            )
        ]
        result = run_synthesis(
            clips,
            client,
            HashingEmbedder(),
            KeywordLabelGenerator(),
            config=PipelineConfig(),
        )
        elapsed = time.monotonic() - started
        assert dumps_canonical(result) == golden
        assert elapsed < 60.0, f"pipeline took {elapsed:.1f}s"


def _golden_clip_text() -> str:
    """The clip the golden artifact was generated from (fixture contract)."""
    return (
        "anchor corpus baseline evidence measure method passage query "
        "relevance retrieval shared signal study survey tokens benchmark "
        "dataset protocol metric sampling replication artifact notation "
        "appendix citation footnote paragraph section table figure abstract "
        "introduction discussion conclusion review procedure material "
        "analysis experiment observation"
    )


# ----------------------------------------------------------------------
# Outline algebra


def _context_dict(cid: str, cited) -> dict:
    return {
        "context_id": cid,
        "source_paper_id": "src",
        "text": f"passage {cid}",
        "cited_ids": list(cited),
        "section_header": None,
        "page_number": None,
    }


def _wire(outline: Outline, op: str, target: str, **payload) -> dict:
    return {
        "op": op, "target": target,
        "payload": payload, "revision": outline.revision,
    }


def _assert_rooted_tree(outline: Outline) -> None:
    reachable = set()
    stack = [outline._nodes[ROOT_ID]]
    child_links = 0
    while stack:
        node = stack.pop()
        assert node.node_id not in reachable, "node reachable twice"
        reachable.add(node.node_id)
        child_links += len(node.children)
        stack.extend(node.children)
    assert reachable == set(outline._nodes)
    assert child_links == len(outline._nodes) - 1


def test_acceptance_outline_algebra():
    with criterion(
        "1000 random edit sequences keep a rooted tree with an exact "
        "incremental panel; root removal and cycle moves change nothing"
    ):
        rng = random.Random(660101)
        for sequence in range(1000):
            outline = Outline()
            counter = 0
            for step in range(rng.randint(3, 10)):
                nodes = list(outline._nodes)
                op = rng.choice(
                    ["insert", "import", "remove", "promote", "move", "edit"]
                )
                try:
                    target = rng.choice(nodes)
                    if op == "insert":
                        outline.apply(_wire(
                            outline, "insert_child", target,
                            label=f"T{sequence}.{step}",
                        ))
                    elif op == "import":
                        counter += 1
                        cited = rng.sample(
                            ["pa", "pb", "pc", "pd"], rng.randint(0, 2)
                        )
                        outline.apply(_wire(
                            outline, "import", target,
                            subtree=_context_dict(f"c{counter:04d}", cited),
                        ))
                    elif op == "remove":
                        outline.apply(_wire(
                            outline, "remove_subtree", target,
                        ))
                    elif op == "promote":
                        outline.apply(_wire(
                            outline, "remove_and_promote", target,
                        ))
                    elif op == "move":
                        outline.apply(_wire(
                            outline, "move", target,
                            new_parent_id=rng.choice(nodes),
                            position=rng.randint(0, 3),
                        ))
                    else:
                        outline.apply(_wire(
                            outline, "edit_label", target,
                            label=f"L{step}",
                        ))
                except InvalidEditError:
                    pass
                _assert_rooted_tree(outline)
                assert outline.panel_from_index() == outline.reference_panel()

            # Root removal and a guaranteed into-own-subtree move must be
            # rejected without touching state.
            snapshot = outline.to_dict()
            for op in ("remove_subtree", "remove_and_promote"):
                with pytest.raises(InvalidEditError):
                    outline.apply(_wire(outline, op, ROOT_ID))
                assert outline.to_dict() == snapshot
            parent = next(
                (
                    node for node in outline._nodes.values()
                    if node.children and node.node_id != ROOT_ID
                ),
                None,
            )
            if parent is not None:
                with pytest.raises(InvalidEditError):
                    outline.apply(_wire(
                        outline, "move", parent.node_id,
                        new_parent_id=parent.children[0].node_id,
                        position=0,
                    ))
                assert outline.to_dict() == snapshot


# ----------------------------------------------------------------------
# Service durability


def test_acceptance_service_durability(tmp_path, embedder, generator):
    with criterion(
        "restart after acknowledged writes loses nothing; stale revision "
        "gets 409 and changes nothing"
    ):
        world, seeds, clip_text = build_two_topic_world(3, 2)

        def fresh_client():
            deps = ServiceDeps(
                client=world_client(world),
                embedder=embedder,
                generator=generator,
                synchronous_jobs=True,
            )
            return TestClient(create_app(str(tmp_path), deps))

        with fresh_client() as client:
            workspace_id = client.post("/workspaces").json()["workspace_id"]
            clip_id = client.post(
                f"/workspaces/{workspace_id}/clips",
                json={"text": clip_text, "seed_reference_ids": seeds},
            ).json()["clip_id"]
            job_id = client.post(
                f"/workspaces/{workspace_id}/syntheses",
                json={"clip_ids": [clip_id]},
            ).json()["job_id"]
            hierarchy = client.get(
                f"/workspaces/{workspace_id}/hierarchies/{job_id}"
            ).json()
            assert hierarchy["empty"] is False
            response = client.put(
                f"/workspaces/{workspace_id}/outline",
                json={
                    "op": "insert_child", "target": ROOT_ID,
                    "payload": {"label": "Acknowledged"}, "revision": 0,
                },
            )
            assert response.status_code == 200
            outline_after_edit = client.get(
                f"/workspaces/{workspace_id}/outline"
            ).json()

        with fresh_client() as reborn:
            clips = reborn.get(
                f"/workspaces/{workspace_id}/clips"
            ).json()["clips"]
            assert [c["clip_id"] for c in clips] == [clip_id]
            job = reborn.get(
                f"/workspaces/{workspace_id}/syntheses/{job_id}"
            ).json()
            assert job["state"] == "done"
            assert reborn.get(
                f"/workspaces/{workspace_id}/hierarchies/{job_id}"
            ).json() == hierarchy
            assert reborn.get(
                f"/workspaces/{workspace_id}/outline"
            ).json() == outline_after_edit

            stale = reborn.put(
                f"/workspaces/{workspace_id}/outline",
                json={
                    "op": "insert_child", "target": ROOT_ID,
                    "payload": {"label": "Too late"}, "revision": 0,
                },
            )
            assert stale.status_code == 409
            assert stale.json()["revision"] == 1
            assert reborn.get(
                f"/workspaces/{workspace_id}/outline"
            ).json() == outline_after_edit
