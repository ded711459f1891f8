"""Pairwise factor graph construction over a citation corpus.

Variables are papers with a binary relevance state. Factors sit on
undirected citation pairs and carry the citing passages (annotations) plus
the reference overlap of the two papers. `weight_edges` turns those into a
compatibility weight in [0, 1): the mean clamped cosine between every
annotation and every seed clip, scaled by a logistic function of the
reference overlap so shared references raise compatibility with
diminishing returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus.models import Corpus
from .embedding import EmbeddingProvider, cosine, embed_each

SEED_PRIOR = (0.99, 0.01)
NEUTRAL_PRIOR = (0.5, 0.5)


@dataclass
class SeedClip:
    """A user-clipped passage anchoring the query, with its seed papers."""

    clip_id: str
    text: str
    seed_reference_ids: list[str]

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"clip {self.clip_id} has empty text")
        if not self.seed_reference_ids:
            raise ValueError(f"clip {self.clip_id} has no seed references")

    def to_dict(self) -> dict:
        return {
            "clip_id": self.clip_id,
            "text": self.text,
            "seed_reference_ids": list(self.seed_reference_ids),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SeedClip":
        return cls(
            clip_id=data["clip_id"],
            text=data["text"],
            seed_reference_ids=list(data["seed_reference_ids"]),
        )


@dataclass
class Variable:
    """One paper node with its prior over (relevant, not relevant)."""

    paper_id: str
    prior: tuple[float, float]
    is_seed: bool = False

    def __post_init__(self):
        a, b = self.prior
        if a <= 0 or b <= 0 or abs(a + b - 1.0) > 1e-9:
            raise ValueError(
                f"prior for {self.paper_id} must be positive and sum to 1"
            )


@dataclass
class EdgeFactor:
    """One undirected citation pair with its annotations and weight.

    Endpoints are stored sorted so each unordered pair appears once.
    `weight` stays None until weight_edges runs.
    """

    a_id: str
    b_id: str
    annotations: list[str] = field(default_factory=list)
    ref_overlap: int = 0
    weight: float | None = None

    def __post_init__(self):
        if self.a_id == self.b_id:
            raise ValueError(f"self-edge on {self.a_id}")
        if self.a_id > self.b_id:
            raise ValueError("edge endpoints must be sorted (a_id < b_id)")


@dataclass
class FactorGraph:
    variables: dict[str, Variable] = field(default_factory=dict)
    factors: list[EdgeFactor] = field(default_factory=list)

    def seed_ids(self) -> list[str]:
        return sorted(v.paper_id for v in self.variables.values() if v.is_seed)

    def to_dict(self) -> dict:
        return {
            "variables": [
                {
                    "paper_id": v.paper_id,
                    "prior": list(v.prior),
                    "is_seed": v.is_seed,
                }
                for _, v in sorted(self.variables.items())
            ],
            "factors": [
                {
                    "a_id": f.a_id,
                    "b_id": f.b_id,
                    "annotations": list(f.annotations),
                    "ref_overlap": f.ref_overlap,
                    "weight": f.weight,
                }
                for f in sorted(self.factors, key=lambda f: (f.a_id, f.b_id))
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FactorGraph":
        graph = cls()
        for row in data["variables"]:
            graph.variables[row["paper_id"]] = Variable(
                paper_id=row["paper_id"],
                prior=(row["prior"][0], row["prior"][1]),
                is_seed=bool(row.get("is_seed", False)),
            )
        for row in data["factors"]:
            graph.factors.append(
                EdgeFactor(
                    a_id=row["a_id"],
                    b_id=row["b_id"],
                    annotations=list(row.get("annotations", [])),
                    ref_overlap=int(row.get("ref_overlap", 0)),
                    weight=row.get("weight"),
                )
            )
        return graph


def reference_overlap_scaling(overlap: int | float) -> float:
    """Logistic scaling of reference overlap: 1 / (1 + e^-overlap).

    0 shared references scale compatibility by 0.5; each additional shared
    reference raises the scale with diminishing returns toward 1.
    """
    return 1.0 / (1.0 + math.exp(-float(overlap)))


def build_graph(corpus: Corpus, clips: list[SeedClip]) -> FactorGraph:
    """Assemble the unweighted factor graph for a corpus and its seed clips.

    One variable per corpus paper; seed papers get the (0.99, 0.01) prior.
    One factor per unordered citation pair, annotations merged across both
    directions in (citing_id, cited_id) order. A pair with no citing
    passage at all falls back to the cited paper's title so every factor
    carries at least one annotation.

    Raises:
        ValueError: if a clip's seed is not present in the corpus.
    """
    if not clips:
        raise ValueError("at least one seed clip is required")
    seed_ids = set()
    for clip in clips:
        seed_ids.update(clip.seed_reference_ids)
    missing = sorted(seed_ids - set(corpus.papers))
    if missing:
        raise ValueError(f"seed papers missing from corpus: {missing}")

    graph = FactorGraph()
    for paper_id in corpus.papers:
        is_seed = paper_id in seed_ids
        graph.variables[paper_id] = Variable(
            paper_id=paper_id,
            prior=SEED_PRIOR if is_seed else NEUTRAL_PRIOR,
            is_seed=is_seed,
        )

    refs = {
        pid: set(record.reference_ids) for pid, record in corpus.papers.items()
    }
    by_pair: dict[tuple[str, str], EdgeFactor] = {}
    fallback_titles: dict[tuple[str, str], str] = {}
    for edge in sorted(corpus.edges, key=lambda e: (e.citing_id, e.cited_id)):
        if edge.citing_id not in corpus.papers or edge.cited_id not in corpus.papers:
            continue
        pair = tuple(sorted((edge.citing_id, edge.cited_id)))
        factor = by_pair.get(pair)
        if factor is None:
            factor = EdgeFactor(
                a_id=pair[0],
                b_id=pair[1],
                ref_overlap=len(refs[pair[0]] & refs[pair[1]]),
            )
            by_pair[pair] = factor
            # The first direction in sort order decides whose title backs
            # an annotation-less pair.
            fallback_titles[pair] = corpus.papers[edge.cited_id].title
        for text in edge.contexts:
            if text not in factor.annotations:
                factor.annotations.append(text)
    for pair, factor in by_pair.items():
        if not factor.annotations:
            factor.annotations = [fallback_titles[pair]]
    graph.factors = [by_pair[pair] for pair in sorted(by_pair)]
    return graph


def weight_edges(
    graph: FactorGraph, clips: list[SeedClip], embedder: EmbeddingProvider
) -> FactorGraph:
    """Set every factor's weight from annotation/clip similarity.

    weight = mean over all (annotation, clip) pairs of max(0, cosine)
             * reference_overlap_scaling(ref_overlap)

    Negative cosines are clamped to zero. An annotation that fails to embed
    contributes zero-similarity pairs; the denominator stays |annotations|
    * |clips|. Weights land in [0, 1).
    """
    if not clips:
        raise ValueError("at least one seed clip is required")
    clip_vectors = embedder.embed([clip.text for clip in clips])

    unique_texts: list[str] = []
    seen: set[str] = set()
    for factor in graph.factors:
        for text in factor.annotations:
            if text not in seen:
                seen.add(text)
                unique_texts.append(text)
    vectors = dict(zip(unique_texts, embed_each(embedder, unique_texts)))

    for factor in graph.factors:
        if not factor.annotations:
            factor.weight = 0.0
            continue
        total = 0.0
        for text in factor.annotations:
            vector = vectors.get(text)
            if vector is None:
                continue
            for clip_vector in clip_vectors:
                total += max(0.0, cosine(vector, clip_vector))
        pair_count = len(factor.annotations) * len(clip_vectors)
        factor.weight = (total / pair_count) * reference_overlap_scaling(
            factor.ref_overlap
        )
    return graph
