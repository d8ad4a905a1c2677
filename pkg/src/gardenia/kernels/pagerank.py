"""Pull-style PageRank with uniform redistribution of dangling mass."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .. import parallel
from ..errors import ParameterError

DEFAULT_DAMPING = 0.85
DEFAULT_TOLERANCE = 1e-4
DEFAULT_MAX_ITERS = 100


@dataclass
class PageRankResult:
    scores: np.ndarray
    iterations: int
    converged: bool
    l1_change: float


@njit(nogil=True, cache=True)
def _pull_scores(in_offsets, in_cols, contrib, base, damping, old, new, lo, hi):
    change = 0.0
    for v in range(lo, hi):
        s = 0.0
        for k in range(in_offsets[v], in_offsets[v + 1]):
            s += contrib[in_cols[k]]
        value = base + damping * s
        change += abs(value - old[v])
        new[v] = value
    return change


def pagerank(g, damping: float = DEFAULT_DAMPING, tolerance: float = DEFAULT_TOLERANCE,
             max_iters: int = DEFAULT_MAX_ITERS, workers: int | None = None) -> PageRankResult:
    """Iterate until the L1 change between sweeps is at most ``tolerance``.

    Hitting ``max_iters`` first is not an error; the result is flagged
    ``converged=False``.
    """
    if g.n < 1:
        raise ParameterError("PageRank needs at least one vertex")
    if not 0 <= damping < 1:
        raise ParameterError("damping must lie in [0, 1)")
    workers = parallel.resolve_workers(workers)
    incoming = g.incoming()
    n = g.n
    out_deg = g.out_degrees().astype(np.float64)
    dangling = out_deg == 0
    inv_deg = np.zeros(n)
    np.divide(1.0, out_deg, out=inv_deg, where=~dangling)
    bounds = parallel.row_bounds_by_work(incoming.row_offsets, workers)
    scores = np.full(n, 1.0 / n)
    new = np.empty(n)
    change = np.inf
    iters = 0
    while iters < max_iters:
        contrib = scores * inv_deg
        base = (1.0 - damping) / n + damping * scores[dangling].sum() / n
        parts = parallel.run_chunks(_pull_scores, bounds,
                                    (incoming.row_offsets, incoming.col_indices, contrib,
                                     base, damping, scores, new), workers)
        change = float(sum(parts))
        scores, new = new, scores
        iters += 1
        if change <= tolerance:
            break
    return PageRankResult(scores, iters, change <= tolerance, change)
