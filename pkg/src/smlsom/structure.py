"""Map-structure updates: KL-based link cutting, the classification MDL
score, and the node-deletion procedure with clique edge restoration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Assignment, Dataset, MapGraph

_H_FLOOR = 1e-12


@dataclass(frozen=True)
class MdlScore:
    """Classification MDL split into its three code-length components."""

    neg_loglik: float
    complexity: float
    indexing: float

    @property
    def total(self) -> float:
        return self.neg_loglik + self.complexity + self.indexing


def kl_estimate(members: np.ndarray, theta_m, theta_l, family) -> float:
    """Sample-average log-likelihood ratio of theta_m vs theta_l over the
    members of one node (a plug-in KL divergence estimate)."""
    X = np.atleast_2d(members)
    if X.shape[0] < 1:
        raise ValueError("need at least one member sample")
    return float(np.mean(family.loglik_rows(X, theta_m) - family.loglik_rows(X, theta_l)))


def link_weakness(data: Dataset, assignment: Assignment, params: dict, m: int, l: int, family) -> float:
    """Symmetrized two-sided KL estimate between adjacent nodes."""
    Xm = data.values[assignment.members(m)]
    Xl = data.values[assignment.members(l)]
    return 0.5 * kl_estimate(Xm, params[m], params[l], family) + 0.5 * kl_estimate(
        Xl, params[l], params[m], family
    )


def cut_weak_links(
    graph: MapGraph,
    data: Dataset,
    assignment: Assignment,
    params: dict,
    beta: float,
    family,
) -> set[tuple[int, int]]:
    """Remove every edge whose weakness exceeds beta times the worst per-node
    average log-likelihood; returns the removed edges.

    beta = inf is a never-cut sentinel. Edges incident to an empty node are
    always cut: an unsupported node carries no neighborhood evidence.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")

    ids = sorted(params)
    members = {m: assignment.members(m) for m in ids}

    removed = set()
    for m, l in sorted(graph.edges):
        if members[m].size == 0 or members[l].size == 0:
            removed.add((m, l))
    if math.isinf(beta):
        for m, l in removed:
            graph.remove_edge(m, l)
        return removed

    ll = {m: family.loglik_rows(data.values, params[m]) for m in ids}
    avg_ll = {m: float(ll[m][members[m]].mean()) for m in ids if members[m].size > 0}
    if avg_ll:
        h = max(max(-v for v in avg_ll.values()), _H_FLOOR)
        for m, l in sorted(graph.edges):
            if (m, l) in removed:
                continue
            d_ml = float(np.mean(ll[m][members[m]] - ll[l][members[m]]))
            d_lm = float(np.mean(ll[l][members[l]] - ll[m][members[l]]))
            if 0.5 * d_ml + 0.5 * d_lm > beta * h:
                removed.add((m, l))
    for m, l in removed:
        graph.remove_edge(m, l)
    return removed


def mdl_score(data: Dataset, assignment: Assignment, params: dict, family) -> MdlScore:
    """Classification MDL: data code length + parameter code length +
    assignment index code length, natural log throughout."""
    ids = sorted(params)
    M = len(ids)
    n = data.n
    neg = 0.0
    for m in ids:
        idx = assignment.members(m)
        if idx.size:
            neg -= float(family.loglik_rows(data.values[idx], params[m]).sum())
    complexity = 0.5 * M * family.df(data.p) * math.log(n)
    indexing = n * math.log(M)
    return MdlScore(neg, complexity, indexing)


@dataclass
class DeletionResult:
    graph: MapGraph
    params: dict
    assignment: Assignment
    score: MdlScore  # MDL of the adopted map
    previous: MdlScore  # MDL of the map before the deletion attempt
    deleted: int | None


def try_delete_node(
    data: Dataset,
    graph: MapGraph,
    assignment: Assignment,
    params: dict,
    family,
) -> DeletionResult:
    """Evaluate removing each node in turn and adopt the best candidate iff it
    strictly improves the MDL total.

    For a candidate deletion, the deleted node's samples are reclassified by
    maximum likelihood among the survivors, every survivor is re-estimated by
    the batch method-of-moments fit on its updated sample set (a survivor
    left with no samples keeps its previous parameters), and the resulting
    map is scored. On adoption the deleted node's former neighbors are wired
    into a clique so no node is left isolated.
    """
    current = mdl_score(data, assignment, params, family)
    ids = sorted(params)
    if len(ids) < 2:
        return DeletionResult(graph, params, assignment, current, current, None)

    X = data.values
    ll = np.stack([family.loglik_rows(X, params[m]) for m in ids])

    best = None  # (total, candidate id, params, assignment, score)
    for pos, m in enumerate(ids):
        moved = assignment.members(m)
        new_m = assignment.m.copy()
        if moved.size:
            sub = np.delete(ll[:, moved], pos, axis=0)
            survivors = np.delete(np.asarray(ids), pos)
            new_m[moved] = survivors[np.argmax(sub, axis=0)]
        cand_assign = Assignment(new_m)
        cand_params = {}
        for l in ids:
            if l == m:
                continue
            idx = cand_assign.members(l)
            cand_params[l] = family.batch(X[idx]) if idx.size else params[l]
        score = mdl_score(data, cand_assign, cand_params, family)
        if best is None or score.total < best[0]:
            best = (score.total, m, cand_params, cand_assign, score)

    if best[0] >= current.total:
        return DeletionResult(graph, params, assignment, current, current, None)

    _, m, cand_params, cand_assign, score = best
    new_graph = graph.copy()
    former = new_graph.remove_node(m)
    for i, a in enumerate(former):
        for b in former[i + 1 :]:
            if not new_graph.has_edge(a, b):
                new_graph.add_edge(a, b)
    return DeletionResult(new_graph, cand_params, cand_assign, score, current, m)
