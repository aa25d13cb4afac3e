"""External clustering-evaluation indices: adjusted Rand index and
normalized mutual information, both computed from the contingency table."""

from __future__ import annotations

import numpy as np


def _contingency(u, v) -> np.ndarray:
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("partitions must be equal-length 1-d sequences")
    _, ui = np.unique(u, return_inverse=True)
    _, vi = np.unique(v, return_inverse=True)
    table = np.zeros((ui.max() + 1, vi.max() + 1), dtype=np.int64)
    np.add.at(table, (ui, vi), 1)
    return table


def _comb2(a: np.ndarray) -> np.ndarray:
    return a * (a - 1) / 2.0


def ari(u, v) -> float:
    """Adjusted Rand index; 1 iff the partitions agree up to relabeling,
    0 in expectation for independent partitions."""
    table = _contingency(u, v)
    n = int(table.sum())
    if n < 2:
        raise ValueError("need at least 2 samples")
    sum_cells = _comb2(table).sum()
    a = _comb2(table.sum(axis=1)).sum()
    b = _comb2(table.sum(axis=0)).sum()
    pairs = _comb2(np.array(n)).item()
    expected = a * b / pairs
    max_index = 0.5 * (a + b)
    if max_index == expected:
        # both partitions degenerate (e.g. all singletons / single group)
        return 1.0 if sum_cells == a == b else 0.0
    return float((sum_cells - expected) / (max_index - expected))


def nmi(u, v) -> float:
    """Mutual information normalized by the larger entropy (natural log).

    Two single-group partitions agree perfectly and score 1; a single-group
    partition against a split one carries no information and scores 0.
    """
    table = _contingency(u, v)
    n = table.sum()
    pu = table.sum(axis=1) / n
    pv = table.sum(axis=0) / n
    hu = -np.sum(pu * np.log(pu, where=pu > 0, out=np.zeros_like(pu)))
    hv = -np.sum(pv * np.log(pv, where=pv > 0, out=np.zeros_like(pv)))
    if hu == 0.0 and hv == 0.0:
        return 1.0
    pj = table / n
    outer = np.outer(pu, pv)
    mask = pj > 0
    info = np.sum(pj[mask] * np.log(pj[mask] / outer[mask]))
    return float(max(info, 0.0) / max(hu, hv))
