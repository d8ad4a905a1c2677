"""Greedy vertex coloring and the color-parallel symmetric Gauss-Seidel smoother."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .. import parallel
from ..errors import ParameterError, PreconditionError, SingularMatrixError
from .spmv import matrix_values


@dataclass
class Coloring:
    color: np.ndarray
    num_colors: int

    def classes(self) -> list[np.ndarray]:
        """Vertex ids of each color, ascending within a class."""
        order = np.argsort(self.color, kind="stable")
        cuts = np.searchsorted(self.color[order], np.arange(1, self.num_colors))
        return np.split(order.astype(np.int32), cuts)


@njit(cache=True)
def _first_fit(offsets, cols, n):
    color = np.full(n, -1, dtype=np.int32)
    max_deg = 0
    for v in range(n):
        max_deg = max(max_deg, offsets[v + 1] - offsets[v])
    seen = np.full(max_deg + 2, -1, dtype=np.int64)
    for v in range(n):
        for k in range(offsets[v], offsets[v + 1]):
            u = cols[k]
            if u != v and color[u] >= 0:
                seen[color[u]] = v
        c = 0
        while seen[c] == v:
            c += 1
        color[v] = c
    return color


def greedy_coloring(g) -> Coloring:
    """First-fit coloring in ascending vertex order.

    The result is inherently sequential and deterministic; it is a setup step
    for :func:`symgs`, which is where the parallelism lives.
    """
    if g.directed:
        raise PreconditionError("coloring needs an undirected (symmetric-pattern) graph")
    color = _first_fit(g.row_offsets, g.col_indices, g.n)
    return Coloring(color, int(color.max()) + 1 if g.n else 0)


def check_coloring(g, coloring: Coloring) -> bool:
    """True if no off-diagonal nonzero joins two vertices of one color."""
    src = g.edge_sources()
    off = src != g.col_indices
    return not np.any(coloring.color[src[off]] == coloring.color[g.col_indices[off]])


def diagonal(g) -> np.ndarray:
    src = g.edge_sources()
    on_diag = src == g.col_indices
    diag = np.zeros(g.n)
    diag[src[on_diag]] = matrix_values(g)[on_diag]
    if np.any(diag == 0):
        raise SingularMatrixError(f"zero diagonal entry at row {int(np.flatnonzero(diag == 0)[0])}")
    return diag


@njit(nogil=True, cache=True)
def _relax_rows(offsets, cols, vals, diag, b, x, rows, lo, hi):
    for t in range(lo, hi):
        i = rows[t]
        s = b[i]
        for k in range(offsets[i], offsets[i + 1]):
            j = cols[k]
            if j != i:
                s -= vals[k] * x[j]
        x[i] = s / diag[i]
    return 0


def symgs(g, x, b, coloring: Coloring | None = None, sweeps: int = 1,
          workers: int | None = None) -> np.ndarray:
    """Symmetric Gauss-Seidel sweeps on ``A x = b``; returns the updated ``x``.

    A sweep visits color classes in ascending order, then descending. Rows of
    one class share no off-diagonal entries, so they update in parallel.
    """
    n = g.n
    x = np.array(x, dtype=np.float64, copy=True)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if x.shape != (n,) or b.shape != (n,):
        raise ParameterError(f"x and b must have length {n}")
    if sweeps < 0:
        raise ParameterError("sweeps must be >= 0")
    if coloring is None:
        coloring = greedy_coloring(g)
    elif not check_coloring(g, coloring):
        raise PreconditionError("coloring is not proper for the matrix's off-diagonal pattern")
    workers = parallel.resolve_workers(workers)
    diag = diagonal(g)
    vals = matrix_values(g)
    classes = coloring.classes()
    order = classes + classes[::-1]
    for _ in range(sweeps):
        for rows in order:
            bounds = parallel.equal_bounds(rows.size, parallel.split_count(rows.size, workers))
            parallel.run_chunks(_relax_rows, bounds,
                                (g.row_offsets, g.col_indices, vals, diag, b, x, rows), workers)
    return x


def residual_norm(g, x, b) -> float:
    from .spmv import spmv
    return float(np.linalg.norm(np.asarray(b, dtype=np.float64) - spmv(g, x, workers=1)))


def diagonally_dominant_system(g):
    """SPD matrix ``diag(|W| 1 + 1) - W`` on the pattern of undirected ``g``.

    ``W`` holds the edge weights (ones if unweighted) with self-loops
    dropped. Returns ``(A, b)`` with ``b = A 1``, so the exact solution is
    the all-ones vector.
    """
    from scipy.sparse import diags

    from ..graph import Graph

    if g.directed:
        raise PreconditionError("the smoother needs a symmetric (undirected) pattern")
    W = g.to_scipy().astype(np.float64)
    W.setdiag(0)
    W.eliminate_zeros()
    W = abs(W)
    A = diags(np.asarray(W.sum(axis=1)).ravel() + 1.0) - W
    A = Graph.from_scipy(A, directed=False)
    return A, spmv_ones(A)


def spmv_ones(A) -> np.ndarray:
    from .spmv import spmv
    return spmv(A, np.ones(A.n), workers=1)
