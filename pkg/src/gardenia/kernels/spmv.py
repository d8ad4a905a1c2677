"""Row-parallel sparse matrix-vector product over a CSR graph."""

import numpy as np
from numba import njit

from .. import parallel
from ..errors import ParameterError


@njit(nogil=True, cache=True)
def _rows(offsets, cols, vals, x, y, lo, hi):
    for i in range(lo, hi):
        s = 0.0
        for k in range(offsets[i], offsets[i + 1]):
            s += vals[k] * x[cols[k]]
        y[i] = s
    return 0


def matrix_values(g) -> np.ndarray:
    """Nonzero values of the adjacency viewed as a matrix (ones if unweighted)."""
    return g.weights if g.weights is not None else np.ones(g.m, dtype=np.float32)


def spmv(g, x, workers: int | None = None) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ParameterError(f"x has shape {x.shape}, matrix has {g.n} columns")
    workers = parallel.resolve_workers(workers)
    y = np.empty(g.n)
    parallel.run_chunks(_rows, parallel.row_bounds_by_work(g.row_offsets, workers),
                        (g.row_offsets, g.col_indices, matrix_values(g), x, y), workers)
    return y
