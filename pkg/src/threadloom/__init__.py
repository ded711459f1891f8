"""Citation-network synthesis: from clipped passages to an editable outline.

The pipeline turns a handful of user-clipped passages (each anchored to
the papers it cites) into a labeled three-level hierarchy of citation
contexts drawn from a two-hop citation neighborhood, ranked by belief
propagation over the citation graph. An editable outline with a live
reference panel sits on top, exposed through an HTTP service and a CLI.
"""

from .corpus import (
    AcquisitionResult,
    CitationContext,
    Corpus,
    CorpusClient,
    CorpusEdge,
    PaperRecord,
    ParsedDocument,
    SnapshotStore,
    extract_contexts,
    replay_providers,
)
from .embedding import (
    EmbeddingVector,
    EmptyTextError,
    HashingEmbedder,
    RemoteEmbedder,
    cosine,
)
from .errors import ProviderUnreachableError, SnapshotMissError
from .graph import (
    FactorGraph,
    SeedClip,
    build_graph,
    reference_overlap_scaling,
    weight_edges,
)
from .labeling import (
    KeywordLabelGenerator,
    RemoteChatGenerator,
    ThreadNode,
    assign_colors,
    label_hierarchy,
    merge_similar_threads,
    synthesize_label,
)
from .lbp import (
    MarginalTable,
    Potential,
    RankedPaper,
    baseline_potential,
    potential_from_weight,
    rank_candidates,
    run_lbp,
)
from .orchestrator import (
    JobStore,
    PipelineConfig,
    SynthesisError,
    SynthesisJob,
    execute_job,
    render_markdown,
    run_synthesis,
)
from .outline import (
    InvalidEditError,
    Outline,
    OutlineNode,
    StaleRevisionError,
    export_markdown,
)
from .service import ServiceDeps, create_app
from .storage import WorkspaceStore
from .structure import (
    Dendrogram,
    FilteredContext,
    SkeletonNode,
    cluster,
    cut_to_hierarchy,
    filter_contexts,
    ward_merge_cost,
)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionResult",
    "CitationContext",
    "Corpus",
    "CorpusClient",
    "CorpusEdge",
    "Dendrogram",
    "EmbeddingVector",
    "EmptyTextError",
    "FactorGraph",
    "FilteredContext",
    "HashingEmbedder",
    "InvalidEditError",
    "JobStore",
    "KeywordLabelGenerator",
    "MarginalTable",
    "Outline",
    "OutlineNode",
    "PaperRecord",
    "ParsedDocument",
    "PipelineConfig",
    "Potential",
    "ProviderUnreachableError",
    "RankedPaper",
    "RemoteChatGenerator",
    "RemoteEmbedder",
    "SeedClip",
    "ServiceDeps",
    "SkeletonNode",
    "SnapshotMissError",
    "SnapshotStore",
    "StaleRevisionError",
    "SynthesisError",
    "SynthesisJob",
    "ThreadNode",
    "WorkspaceStore",
    "assign_colors",
    "baseline_potential",
    "build_graph",
    "cluster",
    "cosine",
    "create_app",
    "cut_to_hierarchy",
    "execute_job",
    "export_markdown",
    "extract_contexts",
    "filter_contexts",
    "label_hierarchy",
    "merge_similar_threads",
    "potential_from_weight",
    "rank_candidates",
    "reference_overlap_scaling",
    "render_markdown",
    "replay_providers",
    "run_lbp",
    "run_synthesis",
    "synthesize_label",
    "ward_merge_cost",
    "weight_edges",
]
