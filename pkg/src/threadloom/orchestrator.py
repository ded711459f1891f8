"""Pipeline orchestration: seed clips in, labeled hierarchy out.

Stages run in a fixed order: fetch the two-hop citation neighborhood,
infer per-paper relevance with belief propagation, acquire full text for
the seeds and top-ranked candidates, filter and cluster the citation
contexts, then label and color the resulting hierarchy.

Job state, timings, and errors live only in the job record. The synthesis
result carries no job ids or timestamps, so identical inputs yield
byte-identical serialized artifacts.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import IO, Callable

from .corpus.client import CorpusClient
from .corpus.models import Corpus
from .graph import SeedClip, build_graph, weight_edges
from .jsonio import read_json_or_none, write_json_atomic
from .labeling import (
    MAX_LABEL_WORDS,
    MAX_SNIPPETS,
    MERGE_THRESHOLD,
    assign_colors,
    count_degraded,
    label_hierarchy,
    merge_similar_threads,
)
from .lbp import rank_candidates, run_lbp
from .structure import (
    FILTER_THRESHOLD,
    MAX_THREADS,
    MAX_TOP_GROUPS,
    MIN_THREAD_SIZE,
    cluster,
    cut_to_hierarchy,
    filter_contexts,
)

JOB_STATES = (
    "queued",
    "fetching",
    "inferring",
    "acquiring",
    "structuring",
    "labeling",
    "done",
    "failed",
)


@dataclass
class PipelineConfig:
    """Tunable knobs for one synthesis run; defaults match the pipeline."""

    per_direction_cap: int = 50
    top_k: int = 30
    filter_threshold: float = FILTER_THRESHOLD
    merge_threshold: float = MERGE_THRESHOLD
    max_top_groups: int = MAX_TOP_GROUPS
    max_threads: int = MAX_THREADS
    min_thread_size: int = MIN_THREAD_SIZE
    damping: float = 0.5
    tol: float = 1e-5
    max_iterations: int = 200
    baseline_compat: bool = False
    max_snippets: int = MAX_SNIPPETS
    max_label_words: int = MAX_LABEL_WORDS

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


class SynthesisError(Exception):
    """A pipeline stage failed; carries the stage name for the job record."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class SynthesisJob:
    """Mutable job record tracked by the store; never part of the result."""

    job_id: str
    clip_ids: list[str] = field(default_factory=list)
    state: str = "queued"
    error: str | None = None
    empty: bool | None = None
    degradation: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    created_at: float = 0.0

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "clip_ids": list(self.clip_ids),
            "state": self.state,
            "error": self.error,
            "empty": self.empty,
            "degradation": dict(self.degradation),
            "timings": dict(self.timings),
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SynthesisJob":
        return cls(
            job_id=data["job_id"],
            clip_ids=list(data.get("clip_ids", [])),
            state=data.get("state", "queued"),
            error=data.get("error"),
            empty=data.get("empty"),
            degradation=dict(data.get("degradation", {})),
            timings=dict(data.get("timings", {})),
            created_at=float(data.get("created_at", 0.0)),
        )


class JobStore:
    """Durable job records and synthesis results under one directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.jobs_dir = self.root / "jobs"
        self.results_dir = self.root / "hierarchies"
        self.jobs_dir.mkdir(parents=True, exist_ok=True)
        self.results_dir.mkdir(parents=True, exist_ok=True)

    def save_job(self, job: SynthesisJob) -> None:
        write_json_atomic(self.jobs_dir / f"{job.job_id}.json", job.to_dict())

    def load_job(self, job_id: str) -> SynthesisJob | None:
        data = read_json_or_none(self.jobs_dir / f"{job_id}.json")
        return SynthesisJob.from_dict(data) if data is not None else None

    def save_result(self, job_id: str, result: dict) -> None:
        write_json_atomic(self.results_dir / f"{job_id}.json", result)

    def load_result(self, job_id: str) -> dict | None:
        return read_json_or_none(self.results_dir / f"{job_id}.json")

    def job_ids(self) -> list[str]:
        return sorted(p.stem for p in self.jobs_dir.glob("*.json"))


def seed_union(clips: list[SeedClip]) -> list[str]:
    """Sorted union of the papers referenced by the clips."""
    seeds: set[str] = set()
    for clip in clips:
        seeds.update(clip.seed_reference_ids)
    return sorted(seeds)


def run_synthesis(
    clips: list[SeedClip],
    client: CorpusClient,
    embedder,
    generator,
    config: PipelineConfig | None = None,
    observer: Callable[[str], None] | None = None,
    lbp_debug: IO[str] | None = None,
) -> dict:
    """Run the full pipeline and return the serializable result dict.

    `observer` is called with each stage name as the stage begins. Any
    stage failure raises SynthesisError naming the stage.
    """
    if not clips:
        raise ValueError("at least one seed clip is required")
    config = config or PipelineConfig()

    def notify(stage: str) -> None:
        if observer is not None:
            observer(stage)

    notify("fetching")
    try:
        corpus = client.fetch_neighborhood(
            seed_union(clips), per_direction_cap=config.per_direction_cap
        )
    except Exception as exc:
        raise SynthesisError("fetching", exc) from exc

    # Unresolvable seeds were skipped during the fetch; prune them from the
    # clips so graph construction sees only corpus papers. A clip with no
    # resolved seed left is dropped entirely.
    usable: list[SeedClip] = []
    for clip in clips:
        kept = [s for s in clip.seed_reference_ids if s in corpus.papers]
        if not kept:
            continue
        if len(kept) == len(clip.seed_reference_ids):
            usable.append(clip)
        else:
            usable.append(
                SeedClip(
                    clip_id=clip.clip_id,
                    text=clip.text,
                    seed_reference_ids=kept,
                )
            )
    clips = usable

    notify("inferring")
    try:
        graph = build_graph(corpus, clips)
        weight_edges(graph, clips, embedder)
        table = run_lbp(
            graph,
            damping=config.damping,
            tol=config.tol,
            max_iterations=config.max_iterations,
            baseline_compat=config.baseline_compat,
            debug_log=lbp_debug,
        )
        ranked = rank_candidates(table, corpus, top_k=config.top_k)
    except Exception as exc:
        raise SynthesisError("inferring", exc) from exc

    notify("acquiring")
    try:
        acquire_ids = list(corpus.seed_ids)
        for entry in ranked:
            if entry.paper_id not in corpus.seed_ids:
                acquire_ids.append(entry.paper_id)
        acquisitions = client.acquire_fulltext(acquire_ids)
    except Exception as exc:
        raise SynthesisError("acquiring", exc) from exc
    contexts = [c for result in acquisitions for c in result.contexts]
    fallback_acquisitions = sum(1 for result in acquisitions if result.degraded)

    notify("structuring")
    try:
        filtered = filter_contexts(
            contexts, clips, embedder, threshold=config.filter_threshold
        )
    except Exception as exc:
        raise SynthesisError("structuring", exc) from exc

    if not filtered:
        return _result(
            corpus,
            ranked,
            hierarchy=None,
            kept_contexts=[],
            degradation={
                "fallback_acquisitions": fallback_acquisitions,
                "fallback_labels": 0,
                "lbp_converged": table.converged,
                "empty_result": True,
            },
        )

    try:
        dendrogram = cluster(filtered)
        skeleton = cut_to_hierarchy(
            dendrogram,
            max_top_groups=config.max_top_groups,
            max_threads=config.max_threads,
            min_thread_size=config.min_thread_size,
        )
    except Exception as exc:
        raise SynthesisError("structuring", exc) from exc

    notify("labeling")
    try:
        root = label_hierarchy(
            skeleton,
            generator,
            embedder,
            max_snippets=config.max_snippets,
            max_words=config.max_label_words,
        )
        merge_similar_threads(
            root,
            generator,
            embedder,
            threshold=config.merge_threshold,
            max_snippets=config.max_snippets,
            max_words=config.max_label_words,
        )
        assign_colors(root)
    except Exception as exc:
        raise SynthesisError("labeling", exc) from exc

    return _result(
        corpus,
        ranked,
        hierarchy=root.to_dict(),
        kept_contexts=filtered,
        degradation={
            "fallback_acquisitions": fallback_acquisitions,
            "fallback_labels": count_degraded(root),
            "lbp_converged": table.converged,
            "empty_result": False,
        },
    )


def _result(
    corpus: Corpus,
    ranked,
    hierarchy: dict | None,
    kept_contexts,
    degradation: dict,
) -> dict:
    wanted = set(corpus.seed_ids)
    for entry in ranked:
        wanted.add(entry.paper_id)
    for fc in kept_contexts:
        wanted.add(fc.context.source_paper_id)
        wanted.update(fc.context.cited_ids)
    papers = {
        pid: corpus.papers[pid].to_dict()
        for pid in sorted(wanted)
        if pid in corpus.papers
    }
    return {
        "empty": hierarchy is None,
        "seed_ids": list(corpus.seed_ids),
        "ranked_papers": [
            {
                "paper_id": entry.paper_id,
                "relevance": entry.relevance,
                "citation_count": entry.citation_count,
            }
            for entry in ranked
        ],
        "papers": papers,
        "hierarchy": hierarchy,
        "degradation": degradation,
    }


def execute_job(
    job: SynthesisJob,
    store: JobStore,
    clips: list[SeedClip],
    client: CorpusClient,
    embedder,
    generator,
    config: PipelineConfig | None = None,
) -> dict | None:
    """Run a synthesis under a job record, persisting every transition.

    Returns the result dict, or None when the run failed (the failure is
    recorded on the job, never raised).
    """
    prev_stage: str | None = None
    prev_time = time.monotonic()

    def observer(stage: str) -> None:
        nonlocal prev_stage, prev_time
        now = time.monotonic()
        if prev_stage is not None:
            job.timings[prev_stage] = round(now - prev_time, 6)
        prev_stage, prev_time = stage, now
        job.state = stage
        store.save_job(job)

    try:
        result = run_synthesis(
            clips, client, embedder, generator, config=config, observer=observer
        )
    except SynthesisError as exc:
        job.state = "failed"
        job.error = str(exc)
        store.save_job(job)
        return None
    except Exception as exc:  # defensive: record, never crash a worker
        job.state = "failed"
        job.error = f"internal: {exc}"
        store.save_job(job)
        return None
    now = time.monotonic()
    if prev_stage is not None:
        job.timings[prev_stage] = round(now - prev_time, 6)
    store.save_result(job.job_id, result)
    job.state = "done"
    job.empty = bool(result["empty"])
    job.degradation = dict(result["degradation"])
    store.save_job(job)
    return result


def render_markdown(result: dict) -> str:
    """Human-readable Markdown view of a synthesis result."""
    lines: list[str] = ["# Synthesis result", ""]
    if result.get("empty"):
        lines.append("No citation contexts passed the relevance filter.")
        lines.append("")
    else:
        hierarchy = result["hierarchy"]
        for group in hierarchy.get("children", []):
            _render_node(group, lines, depth=2)
        for context in hierarchy.get("contexts", []):
            _render_context(context, lines)
    ranked = result.get("ranked_papers", [])
    if ranked:
        lines.append("## Ranked papers")
        lines.append("")
        papers = result.get("papers", {})
        for rank, entry in enumerate(ranked, start=1):
            record = papers.get(entry["paper_id"], {})
            title = record.get("title") or entry["paper_id"]
            lines.append(
                f"{rank}. {title} ({entry['paper_id']}) "
                f"relevance={entry['relevance']:.4f}"
            )
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def _render_node(node: dict, lines: list[str], depth: int) -> None:
    label = node.get("label") or node.get("node_id", "")
    lines.append(f"{'#' * min(depth, 6)} {label}")
    lines.append("")
    for child in node.get("children", []):
        _render_node(child, lines, depth + 1)
    for context in node.get("contexts", []):
        _render_context(context, lines)


def _render_context(context_entry: dict, lines: list[str]) -> None:
    context = context_entry.get("context", context_entry)
    cited = ", ".join(context.get("cited_ids", [])) or context.get(
        "source_paper_id", ""
    )
    lines.append(f"- {context.get('text', '')} [{cited}]")
    lines.append("")
