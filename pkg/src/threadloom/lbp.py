"""Loopy belief propagation over binary pairwise factor graphs.

Synchronous flooding schedule: every directed message updates from the
previous iteration's messages, then damping mixes the update with the old
message. Message products run in log space so high-degree nodes cannot
underflow. On acyclic graphs the fixed point reproduces exact marginals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .corpus.models import Corpus
from .graph import FactorGraph

BASELINE_SAME_STATE = 0.58
POTENTIAL_CAP = 0.95
POTENTIAL_FLOOR = 0.5 + 1e-6
WEIGHT_SLOPE = 0.45

# Messages are normalized, so a floor just above smallest-double keeps
# log() finite without visibly perturbing beliefs.
_MESSAGE_FLOOR = 1e-300


@dataclass(frozen=True)
class Potential:
    """Symmetric pairwise potential: same-state agreement vs disagreement."""

    same_state: float
    diff_state: float

    def __post_init__(self):
        if not (0.5 < self.same_state < 1.0):
            raise ValueError(f"same_state {self.same_state} outside (0.5, 1)")
        if abs(self.same_state + self.diff_state - 1.0) > 1e-9:
            raise ValueError("potential states must sum to 1")


def potential_from_weight(weight: float) -> Potential:
    """Map an edge weight in [0, 1] to an attractive pairwise potential.

    same_state = 0.5 + 0.45 * weight, clamped into (0.5, 0.95]. Zero weight
    still lands just above 0.5 so every edge stays weakly attractive.
    """
    same = 0.5 + WEIGHT_SLOPE * weight
    same = min(POTENTIAL_CAP, max(POTENTIAL_FLOOR, same))
    return Potential(same_state=same, diff_state=1.0 - same)


def baseline_potential() -> Potential:
    """Constant potential reproducing the prior-work weighting scheme."""
    return Potential(
        same_state=BASELINE_SAME_STATE, diff_state=1.0 - BASELINE_SAME_STATE
    )


@dataclass
class MarginalTable:
    """Per-paper belief (relevant, not relevant) plus run diagnostics."""

    marginals: dict[str, tuple[float, float]]
    converged: bool
    iterations: int

    def relevance(self, paper_id: str) -> float:
        return self.marginals[paper_id][0]


def run_lbp(
    graph: FactorGraph,
    damping: float = 0.5,
    tol: float = 1e-5,
    max_iterations: int = 200,
    baseline_compat: bool = False,
    debug_log: IO[str] | None = None,
) -> MarginalTable:
    """Run damped synchronous LBP to convergence or the iteration cap.

    Args:
        graph: factor graph; every factor needs a weight unless
            baseline_compat is set.
        damping: in [0, 1); fraction of the previous message retained.
        tol: max absolute message change that counts as converged.
        max_iterations: hard cap on sweeps.
        baseline_compat: use the constant 0.58 same-state potential on all
            edges, ignoring weights.
        debug_log: when set, one JSON line per iteration with the max
            message delta.

    Returns:
        MarginalTable with normalized per-paper beliefs.
    """
    if not (0.0 <= damping < 1.0):
        raise ValueError("damping must be in [0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")

    ids = sorted(graph.variables)
    index = {pid: i for i, pid in enumerate(ids)}
    n = len(ids)
    log_prior = np.zeros((n, 2), dtype=np.float64)
    for pid, i in index.items():
        log_prior[i] = np.log(graph.variables[pid].prior)

    # Two directed messages per factor; rev maps each to its reverse.
    src, dst, log_same, log_diff = [], [], [], []
    for factor in graph.factors:
        if factor.a_id not in index or factor.b_id not in index:
            raise ValueError(
                f"factor ({factor.a_id}, {factor.b_id}) has a dangling endpoint"
            )
        if baseline_compat:
            potential = baseline_potential()
        else:
            if factor.weight is None:
                raise ValueError(
                    f"factor ({factor.a_id}, {factor.b_id}) has no weight; "
                    "run weight_edges first"
                )
            potential = potential_from_weight(factor.weight)
        a, b = index[factor.a_id], index[factor.b_id]
        for s, d in ((a, b), (b, a)):
            src.append(s)
            dst.append(d)
            log_same.append(np.log(potential.same_state))
            log_diff.append(np.log(potential.diff_state))

    edge_count = len(src)
    if edge_count == 0:
        marginals = {pid: _normalized(graph.variables[pid].prior) for pid in ids}
        return MarginalTable(marginals=marginals, converged=True, iterations=0)

    src_a = np.array(src)
    dst_a = np.array(dst)
    rev = np.arange(edge_count) ^ 1  # directed pairs are adjacent
    ls = np.array(log_same)
    ld = np.array(log_diff)

    messages = np.full((edge_count, 2), 0.5, dtype=np.float64)
    converged = False
    iterations = 0
    for iteration in range(1, max_iterations + 1):
        iterations = iteration
        log_m = np.log(messages)
        incoming = np.zeros((n, 2), dtype=np.float64)
        np.add.at(incoming, dst_a, log_m)
        # Exclude the reverse message when sending back along an edge.
        pre = log_prior[src_a] + incoming[src_a] - log_m[rev]
        update = np.empty_like(messages)
        update[:, 0] = np.logaddexp(pre[:, 0] + ls, pre[:, 1] + ld)
        update[:, 1] = np.logaddexp(pre[:, 0] + ld, pre[:, 1] + ls)
        update -= np.logaddexp(update[:, 0], update[:, 1])[:, None]
        update = np.exp(update)
        new_messages = (1.0 - damping) * update + damping * messages
        np.clip(new_messages, _MESSAGE_FLOOR, 1.0, out=new_messages)
        delta = float(np.max(np.abs(new_messages - messages)))
        messages = new_messages
        if debug_log is not None:
            debug_log.write(
                json.dumps({"iteration": iteration, "max_delta": delta}) + "\n"
            )
        if delta < tol:
            converged = True
            break

    log_m = np.log(messages)
    incoming = np.zeros((n, 2), dtype=np.float64)
    np.add.at(incoming, dst_a, log_m)
    belief = log_prior + incoming
    belief -= np.logaddexp(belief[:, 0], belief[:, 1])[:, None]
    belief = np.exp(belief)
    marginals = {
        pid: (float(belief[i, 0]), float(belief[i, 1])) for pid, i in index.items()
    }
    return MarginalTable(marginals=marginals, converged=converged, iterations=iterations)


def _normalized(prior: tuple[float, float]) -> tuple[float, float]:
    total = prior[0] + prior[1]
    return (prior[0] / total, prior[1] / total)


@dataclass
class RankedPaper:
    paper_id: str
    relevance: float
    citation_count: int = 0


def rank_candidates(
    table: MarginalTable, corpus: Corpus, top_k: int = 30
) -> list[RankedPaper]:
    """Top candidate papers by relevance marginal, seeds excluded.

    Ties break by citation count (desc) then paper_id (asc).
    """
    if top_k < 1:
        raise ValueError("top_k must be at least 1")
    seeds = set(corpus.seed_ids)
    ranked = []
    for paper_id, (relevant, _) in table.marginals.items():
        if paper_id in seeds:
            continue
        record = corpus.papers.get(paper_id)
        ranked.append(
            RankedPaper(
                paper_id=paper_id,
                relevance=relevant,
                citation_count=record.citation_count if record else 0,
            )
        )
    ranked.sort(key=lambda r: (-r.relevance, -r.citation_count, r.paper_id))
    return ranked[:top_k]
