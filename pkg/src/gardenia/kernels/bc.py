"""Betweenness centrality (Brandes, unweighted), parallel within each BFS level.

The forward pass discovers levels with push steps; shortest-path counts of a
new level are then gathered from parents one level up. The backward pass
walks the levels in reverse, each vertex pulling dependencies from its
children. No floating-point value is ever written by two workers.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .. import parallel
from ..errors import ParameterError
from ._common import HOP_INF
from .bfs import _State, push_step


@njit(nogil=True, cache=True)
def _gather_sigma(in_offsets, in_cols, level_vertices, hops, sigma, depth, lo, hi):
    for t in range(lo, hi):
        w = level_vertices[t]
        s = 0.0
        for k in range(in_offsets[w], in_offsets[w + 1]):
            v = in_cols[k]
            if hops[v] == depth:
                s += sigma[v]
        sigma[w] = s
    return 0


@njit(nogil=True, cache=True)
def _accumulate(offsets, cols, level_vertices, hops, sigma, delta, scores, source, depth, lo, hi):
    for t in range(lo, hi):
        v = level_vertices[t]
        acc = 0.0
        for k in range(offsets[v], offsets[v + 1]):
            w = cols[k]
            if hops[w] == depth + 1:
                acc += sigma[v] / sigma[w] * (1.0 + delta[w])
        delta[v] = acc
        if v != source:
            scores[v] += acc
    return 0


def _split(count: int, workers: int) -> np.ndarray:
    return parallel.equal_bounds(count, parallel.split_count(count, workers))


def select_sources(n: int, num_sources: int | None, seed: int = 0) -> np.ndarray:
    """All vertices, or a seeded sample of ``num_sources`` distinct ones (ascending)."""
    if num_sources is None or num_sources >= n:
        return np.arange(n, dtype=np.int64)
    if num_sources < 1:
        raise ParameterError("num_sources must be >= 1")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=num_sources, replace=False)).astype(np.int64)


def bc(g, num_sources: int | None = None, seed: int = 0, sources=None,
       workers: int | None = None, trace=None) -> np.ndarray:
    """Betweenness scores accumulated over the chosen sources.

    On undirected graphs the sum is halved so that every unordered pair of
    endpoints contributes once. Directed graphs count ordered pairs along
    directed paths and need an inverse for the path-count gather.
    """
    workers = parallel.resolve_workers(workers)
    incoming = g.incoming()
    if sources is None:
        sources = select_sources(g.n, num_sources, seed)
    sources = np.asarray(sources, dtype=np.int64)
    if sources.size and (sources.min() < 0 or sources.max() >= g.n):
        raise ParameterError("BC source out of range")
    scores = np.zeros(g.n)
    sigma = np.zeros(g.n)
    delta = np.zeros(g.n)
    for s in sources.tolist():
        state = _State(g.n, s)
        sigma[:] = 0.0
        sigma[s] = 1.0
        levels = [np.array([s], dtype=np.int32)]
        depth = 0
        while True:
            nxt, scanned = push_step(g, levels[-1], state, depth, workers)
            if trace is not None:
                trace.record(levels[-1].size, scanned)
            if not nxt.size:
                break
            parallel.run_chunks(_gather_sigma, _split(nxt.size, workers),
                                (incoming.row_offsets, incoming.col_indices, nxt, state.hops,
                                 sigma, depth), workers)
            levels.append(nxt)
            depth += 1
        for depth in range(len(levels) - 1, -1, -1):
            verts = levels[depth]
            parallel.run_chunks(_accumulate, _split(verts.size, workers),
                                (g.row_offsets, g.col_indices, verts, state.hops, sigma, delta,
                                 scores, s, depth), workers)
        reached = state.hops != HOP_INF
        delta[reached] = 0.0
    if not g.directed:
        scores /= 2.0
    return scores
