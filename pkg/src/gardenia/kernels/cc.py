"""Connected components by min-label propagation."""

from __future__ import annotations

import numpy as np
from numba import njit

from .. import parallel
from .._atomics import atomic_add, atomic_min, test_and_set
from ..errors import PreconditionError
from ..frontier import bitmap_words


@njit(nogil=True, cache=True)
def _propagate(offsets, cols, frontier, prefix, labels, queued, next_q, tail, elo, ehi):
    i = np.searchsorted(prefix, elo, side="right") - 1
    e = elo
    while e < ehi:
        u = frontier[i]
        lu = labels[u]
        stop = min(prefix[i + 1], ehi)
        start = offsets[u] + (e - prefix[i])
        for k in range(start, start + (stop - e)):
            v = cols[k]
            if lu < labels[v]:
                old = atomic_min(labels, v, lu)
                if lu < old and not test_and_set(queued, v):
                    next_q[atomic_add(tail, 0, 1)] = v
        e = stop
        i += 1
    return ehi - elo


def cc_label_propagation(g, workers: int | None = None, labels=None, trace=None) -> np.ndarray:
    """Component labels; ``labels[v]`` is the smallest vertex id in v's component.

    Every vertex starts active with its own id (or the supplied ``labels``).
    An active vertex pushes its label to neighbors holding a larger one, and
    the vertices that changed form the next active set.
    """
    if g.directed:
        raise PreconditionError("connected components need an undirected graph")
    workers = parallel.resolve_workers(workers)
    n = g.n
    labels = (np.arange(n, dtype=np.int32) if labels is None
              else np.array(labels, dtype=np.int32, copy=True))
    queued = np.zeros(bitmap_words(n), dtype=np.uint64)
    next_q = np.empty(max(n, 1), dtype=np.int32)
    tail = np.zeros(1, dtype=np.int64)
    frontier = np.arange(n, dtype=np.int32)
    while frontier.size:
        prefix = parallel.edge_prefix(g.row_offsets, frontier)
        total = int(prefix[-1])
        tail[0] = 0
        if total:
            parallel.run_chunks(_propagate, parallel.edge_bounds(total, workers),
                                (g.row_offsets, g.col_indices, frontier, prefix, labels,
                                 queued, next_q, tail), workers)
        if trace is not None:
            trace.record(frontier.size, total)
        frontier = next_q[:tail[0]].copy()
        queued[frontier >> 6] = 0
    return labels
