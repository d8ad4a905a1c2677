"""Serial reference oracles and result comparison.

The oracles are single-threaded textbook algorithms written independently of
the parallel kernels: queue BFS, binary-heap Dijkstra, Brandes with
predecessor accumulation, a dense PageRank linear solve, union-find, brute
force triangle enumeration, dense mat-vec and lexicographic Gauss-Seidel.
Cubic or dense oracles refuse inputs above a size guard.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import OracleSizeError, ParameterError, PreconditionError

BC_ALLPAIRS_LIMIT = 2000
TC_BRUTEFORCE_LIMIT = 500
DENSE_LIMIT = 5000


def _guard(name: str, n: int, limit: int):
    if n > limit:
        raise OracleSizeError(f"{name} oracle is limited to {limit} vertices, got {n}")


# --- traversal ------------------------------------------------------------

@njit(cache=True)
def _bfs(offsets, cols, n, source):
    dist = np.full(n, np.inf)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0.0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(offsets[u], offsets[u + 1]):
            v = cols[k]
            if dist[v] == np.inf:
                dist[v] = dist[u] + 1.0
                queue[tail] = v
                tail += 1
    return dist


def _check_source(g, source: int) -> int:
    if not 0 <= source < g.n:
        raise ParameterError(f"source {source} outside [0, {g.n})")
    return int(source)


def oracle_bfs(g, source: int) -> np.ndarray:
    """Hop distances from a FIFO queue BFS (``inf`` when unreached)."""
    return _bfs(g.row_offsets, g.col_indices, g.n, _check_source(g, source))


@njit(cache=True)
def _dijkstra(offsets, cols, weights, n, source):
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=np.bool_)
    dist[source] = 0.0
    heap = [(0.0, np.int64(source))]
    while len(heap):
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(offsets[u], offsets[u + 1]):
            v = np.int64(cols[k])
            nd = d + np.float64(weights[k])
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def oracle_dijkstra(g, source: int) -> np.ndarray:
    if g.weights is None:
        raise PreconditionError("Dijkstra needs a weighted graph")
    return _dijkstra(g.row_offsets, g.col_indices, g.weights, g.n, _check_source(g, source))


@njit(cache=True)
def _brandes(offsets, cols, in_offsets, in_cols, n, sources):
    scores = np.zeros(n)
    dist = np.empty(n, dtype=np.int64)
    sigma = np.empty(n)
    delta = np.empty(n)
    order = np.empty(n, dtype=np.int64)
    for s in sources:
        dist[:] = -1
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            u = order[head]
            head += 1
            for k in range(offsets[u], offsets[u + 1]):
                v = cols[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    order[tail] = v
                    tail += 1
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
        # pop in reverse BFS order, pushing dependency to predecessors
        for t in range(tail - 1, 0, -1):
            w = order[t]
            for k in range(in_offsets[w], in_offsets[w + 1]):
                v = in_cols[k]
                if dist[v] >= 0 and dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            scores[w] += delta[w]
    return scores


def oracle_bc_allpairs(g, sources=None) -> np.ndarray:
    """Brandes betweenness over ``sources`` (default: all vertices).

    Undirected scores are halved so each unordered endpoint pair counts once.
    """
    if sources is None:
        _guard("all-pairs BC", g.n, BC_ALLPAIRS_LIMIT)
        sources = np.arange(g.n, dtype=np.int64)
    sources = np.asarray(sources, dtype=np.int64)
    inc = g.incoming()
    scores = _brandes(g.row_offsets, g.col_indices, inc.row_offsets, inc.col_indices, g.n, sources)
    return scores / 2.0 if not g.directed else scores


# --- linear-algebra style -------------------------------------------------

def oracle_pagerank_dense(g, damping: float = 0.85) -> np.ndarray:
    """Stationary PageRank vector from a dense linear solve.

    Solves ``(I - d M) x = (1 - d)/n + d * (dangling . x)/n`` with the
    dangling term folded into the matrix, then normalizes to sum 1.
    """
    n = g.n
    _guard("dense PageRank", n, DENSE_LIMIT)
    out_deg = g.out_degrees().astype(np.float64)
    M = np.zeros((n, n))
    src = g.edge_sources()
    np.add.at(M, (g.col_indices, src), 1.0 / out_deg[src])
    M[:, out_deg == 0] = 1.0 / n
    x = np.linalg.solve(np.eye(n) - damping * M, np.full(n, (1.0 - damping) / n))
    return x / x.sum()


@njit(cache=True)
def _pagerank_power(offsets, cols, out_deg, n, damping, tol, max_iters):
    x = np.full(n, 1.0 / n)
    for _ in range(max_iters):
        y = np.zeros(n)
        dangling = 0.0
        for u in range(n):
            if out_deg[u] == 0:
                dangling += x[u]
            else:
                share = x[u] / out_deg[u]
                for k in range(offsets[u], offsets[u + 1]):
                    y[cols[k]] += share
        change = 0.0
        for v in range(n):
            y[v] = (1.0 - damping) / n + damping * (y[v] + dangling / n)
            change += abs(y[v] - x[v])
        x = y
        if change <= tol:
            break
    return x


def oracle_pagerank_power(g, damping: float = 0.85, tol: float = 1e-13,
                          max_iters: int = 10000) -> np.ndarray:
    """Serial push-style power iteration run to ``tol``, for graphs past the dense limit."""
    return _pagerank_power(g.row_offsets, g.col_indices, g.out_degrees(), g.n,
                           float(damping), float(tol), int(max_iters))


def oracle_pagerank(g, damping: float = 0.85) -> np.ndarray:
    if g.n <= DENSE_LIMIT:
        return oracle_pagerank_dense(g, damping)
    return oracle_pagerank_power(g, damping)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # the smaller id becomes the root, so roots are component minima
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def oracle_cc_unionfind(g) -> np.ndarray:
    """Label of each vertex = smallest id in its (weakly) connected component."""
    uf = _UnionFind(g.n)
    for u, v in zip(g.edge_sources().tolist(), g.col_indices.tolist()):
        uf.union(u, v)
    return np.array([uf.find(v) for v in range(g.n)], dtype=np.int64)


@njit(cache=True)
def _tc_brute(adj, n):
    total = 0
    for u in range(n):
        for v in range(u + 1, n):
            if adj[u, v]:
                for w in range(v + 1, n):
                    if adj[u, w] and adj[v, w]:
                        total += 1
    return total


def _adjacency(g) -> np.ndarray:
    adj = np.zeros((g.n, g.n), dtype=np.bool_)
    src = g.edge_sources()
    off = src != g.col_indices
    adj[src[off], g.col_indices[off]] = True
    return adj | adj.T


def oracle_tc_bruteforce(g) -> int:
    """Count triples u < v < w that are pairwise adjacent (ignores direction and loops)."""
    _guard("brute-force triangle", g.n, TC_BRUTEFORCE_LIMIT)
    return int(_tc_brute(_adjacency(g), g.n))


def oracle_tc_sparse(g) -> int:
    """``trace(A^3) / 6`` via sparse products, for graphs too large for brute force."""
    A = g.to_scipy()
    A = A.astype(bool).astype(np.int64)
    A.setdiag(0)
    A.eliminate_zeros()
    A = ((A + A.T) > 0).astype(np.int64)
    return int((A @ A).multiply(A).sum() // 6)


def oracle_tc(g) -> int:
    return oracle_tc_bruteforce(g) if g.n <= TC_BRUTEFORCE_LIMIT else oracle_tc_sparse(g)


@njit(cache=True)
def _dense_matvec(M, x):
    n, c = M.shape
    y = np.zeros(n)
    for i in range(n):
        s = 0.0
        for j in range(c):
            s += M[i, j] * x[j]
        y[i] = s
    return y


def _dense_matrix(g) -> np.ndarray:
    M = np.zeros((g.n, g.n))
    vals = np.ones(g.m) if g.weights is None else g.weights.astype(np.float64)
    np.add.at(M, (g.edge_sources(), g.col_indices), vals)
    return M


def oracle_spmv_dense(g, x) -> np.ndarray:
    _guard("dense SpMV", g.n, DENSE_LIMIT)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ParameterError(f"x has shape {x.shape}, matrix has {g.n} columns")
    return _dense_matvec(_dense_matrix(g), x)


def oracle_spmv(g, x) -> np.ndarray:
    """Dense mat-vec when small enough, otherwise scipy's serial CSR product."""
    if g.n <= DENSE_LIMIT:
        return oracle_spmv_dense(g, x)
    A = g.to_scipy().astype(np.float64)
    return A @ np.asarray(x, dtype=np.float64)


def oracle_coloring_firstfit(g) -> np.ndarray:
    """First-fit colors in ascending vertex order, in plain Python."""
    color = [-1] * g.n
    offsets, cols = g.row_offsets.tolist(), g.col_indices.tolist()
    for v in range(g.n):
        taken = {color[u] for u in cols[offsets[v]:offsets[v + 1]] if u != v}
        c = 0
        while c in taken:
            c += 1
        color[v] = c
    return np.array(color, dtype=np.int32)


@njit(cache=True)
def _gs_pass(offsets, cols, vals, b, x, rows):
    for i in rows:
        diag = 0.0
        s = b[i]
        for k in range(offsets[i], offsets[i + 1]):
            j = cols[k]
            if j == i:
                diag += vals[k]
            else:
                s -= vals[k] * x[j]
        x[i] = s / diag


def oracle_gs_serial(g, x, b, sweeps: int = 1, order=None) -> np.ndarray:
    """Symmetric Gauss-Seidel: rows in ``order`` (default ascending), then reversed."""
    x = np.array(x, dtype=np.float64, copy=True)
    b = np.asarray(b, dtype=np.float64)
    order = np.arange(g.n, dtype=np.int64) if order is None else np.asarray(order, dtype=np.int64)
    vals = np.ones(g.m) if g.weights is None else g.weights.astype(np.float64)
    backward = order[::-1].copy()
    for _ in range(sweeps):
        _gs_pass(g.row_offsets, g.col_indices, vals, b, x, order)
        _gs_pass(g.row_offsets, g.col_indices, vals, b, x, backward)
    return x


@njit(cache=True)
def _sgd_serial(users, items, ratings, orders, P, Q, lr, lam):
    k = P.shape[1]
    for epoch in range(orders.shape[0]):
        for t in range(orders.shape[1]):
            r = orders[epoch, t]
            u = users[r]
            i = items[r]
            e = ratings[r]
            for f in range(k):
                e -= P[u, f] * Q[i, f]
            for f in range(k):
                pu = P[u, f]
                P[u, f] = pu + lr * (e * Q[i, f] - lam * pu)
                Q[i, f] = Q[i, f] + lr * (e * pu - lam * Q[i, f])


def oracle_sgd_serial(ratings, k: int, learning_rate: float, regularization: float,
                      epochs: int, seed: int = 0, num_users=None, num_items=None):
    """Serial reference updater with the same initialization and visiting order
    as the kernel; returns ``(user_factors, item_factors, final_rmse)``."""
    from .kernels.sgd import init_factors

    num_users = int(ratings.src.max()) + 1 if num_users is None else num_users
    num_items = int(ratings.dst.max()) + 1 if num_items is None else num_items
    P, Q = init_factors(num_users, num_items, k, seed)
    rng = np.random.default_rng([seed, 1])
    orders = np.array([rng.permutation(len(ratings)) for _ in range(epochs)],
                      dtype=np.int64).reshape(epochs, len(ratings))
    _sgd_serial(ratings.src, ratings.dst, ratings.weights, orders, P, Q,
                float(learning_rate), float(regularization))
    pred = np.einsum("rk,rk->r", P[ratings.src], Q[ratings.dst])
    return P, Q, float(np.sqrt(np.mean((ratings.weights - pred) ** 2)))


# --- comparison -----------------------------------------------------------

@dataclass
class VerifyReport:
    kernel: str
    passed: bool
    max_abs_err: float | None = None
    first_mismatch: int | None = None
    details: str = ""

    def __post_init__(self):
        if self.passed and self.first_mismatch is not None:
            raise ValueError("a passing report cannot record a mismatch")

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = [f"verify {self.kernel or 'result'}: {status}"]
        if self.max_abs_err is not None:
            parts.append(f"max_abs_err={self.max_abs_err:.3g}")
        if self.first_mismatch is not None:
            parts.append(f"first_mismatch={self.first_mismatch}")
        if self.details:
            parts.append(self.details)
        return " ".join(parts)


TOLERANCE_MODES = ("exact", "relative", "partition", "l1")


def compare(result, reference, tolerance: str = "exact", rtol: float = 1e-6,
            kernel: str = "", atol: float = 0.0) -> VerifyReport:
    """Compare a kernel output with an oracle output.

    ``exact`` needs identical values (``inf`` matches ``inf``). ``relative``
    accepts ``|a - b| <= rtol * max(|a|, |b|, floor)`` where the floor is
    ``1e-9 * max|reference|``, so entries that should be zero tolerate
    reassociation noise. ``partition`` accepts any relabeling that induces
    the same grouping. ``l1`` accepts ``sum |a - b| <= atol``, the natural
    bound for an iterate of a contraction stopped at a known step size.
    """
    if tolerance not in TOLERANCE_MODES:
        raise ParameterError(f"tolerance must be one of {TOLERANCE_MODES}")
    a = np.asarray(result)
    b = np.asarray(reference)
    if a.shape != b.shape:
        raise ParameterError(f"shape mismatch: result {a.shape} vs reference {b.shape}")
    if tolerance == "partition":
        return _compare_partition(a.ravel(), b.ravel(), kernel)
    floating = np.issubdtype(a.dtype, np.floating) or np.issubdtype(b.dtype, np.floating)
    af = a.astype(np.float64).ravel()
    bf = b.astype(np.float64).ravel()
    finite = np.isfinite(af) & np.isfinite(bf)
    err = np.abs(af[finite] - bf[finite])
    max_err = float(err.max()) if floating and err.size else (0.0 if floating else None)
    if tolerance == "l1":
        dist = float(np.abs(af - bf).sum())
        if dist <= atol:
            return VerifyReport(kernel, True, max_err, None, f"l1={dist:.3g} <= {atol:.3g}")
        i = int(np.argmax(np.abs(af - bf)))
        return VerifyReport(kernel, False, max_err, i, f"l1={dist:.3g} > {atol:.3g}")
    if tolerance == "exact":
        bad = ~((af == bf) | (np.isnan(af) & np.isnan(bf)))
        note = "exact"
    else:
        bad = ~finite & ~(af == bf)
        scale = float(np.abs(bf[np.isfinite(bf)]).max()) if np.isfinite(bf).any() else 0.0
        bound = rtol * np.maximum(np.maximum(np.abs(af), np.abs(bf)), 1e-9 * scale)
        bad[finite] = np.abs(af[finite] - bf[finite]) > bound[finite]
        note = f"rtol={rtol:g}"
    idx = np.flatnonzero(bad)
    if idx.size:
        i = int(idx[0])
        return VerifyReport(kernel, False, max_err, i,
                            f"{idx.size} mismatches ({note}); at {i}: got {af[i]!r}, want {bf[i]!r}")
    return VerifyReport(kernel, True, max_err, None, note)


def _compare_partition(a: np.ndarray, b: np.ndarray, kernel: str) -> VerifyReport:
    # first index whose label disagrees with the label pairing seen at its group's first member
    _, first_a, inv_a = np.unique(a, return_index=True, return_inverse=True)
    _, first_b, inv_b = np.unique(b, return_index=True, return_inverse=True)
    bad = (b[first_a[inv_a]] != b) | (a[first_b[inv_b]] != a)
    idx = np.flatnonzero(bad)
    if idx.size:
        i = int(idx[0])
        return VerifyReport(kernel, False, None, i,
                            f"partition differs ({idx.size} vertices misgrouped)")
    return VerifyReport(kernel, True, None, None, f"partition ({first_a.size} groups)")


_warm = False


def warm_up() -> None:
    """Compile (or load from cache) every jitted oracle on a tiny input, so
    that timing an oracle measures the algorithm rather than the compiler."""
    global _warm
    if _warm:
        return
    from .graph import EdgeList, build_graph

    g = build_graph(EdgeList.from_pairs([(0, 1, 1.0), (1, 2, 2.0), (0, 2, 4.0)]))
    oracle_bfs(g, 0)
    oracle_dijkstra(g, 0)
    oracle_bc_allpairs(g)
    oracle_pagerank_power(g)
    oracle_tc_bruteforce(g)
    oracle_spmv_dense(g, np.ones(3))
    A = build_graph(EdgeList.from_pairs([(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]), dedup=False)
    oracle_gs_serial(A, np.zeros(2), np.ones(2))
    ratings = EdgeList.from_pairs([(0, 0, 1.0), (1, 1, 2.0)])
    oracle_sgd_serial(ratings, 2, 0.05, 0.01, 1)
    _warm = True
