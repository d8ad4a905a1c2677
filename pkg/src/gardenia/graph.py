"""Immutable CSR graphs, edge lists, and degree statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedInputError, UndefinedStatsError

OFFSET_DTYPE = np.int64
INDEX_DTYPE = np.int32
WEIGHT_DTYPE = np.float32


@dataclass
class EdgeList:
    """Raw edges prior to CSR construction.

    ``src``/``dst`` are parallel integer arrays; ``weights`` is an optional
    parallel array of non-negative reals. ``symmetric`` is set by loaders whose
    format declares the edge set symmetric (MatrixMarket ``symmetric``), so the
    caller knows to build with ``symmetrize=True``. ``id_map`` records the
    original id of every dense id when a loader had to remap.
    """

    src: np.ndarray
    dst: np.ndarray
    weights: np.ndarray | None = None
    num_vertices: int | None = None
    symmetric: bool = False
    id_map: np.ndarray | None = None

    def __post_init__(self):
        self.src = np.asarray(self.src, dtype=np.int64).reshape(-1)
        self.dst = np.asarray(self.dst, dtype=np.int64).reshape(-1)
        if self.src.shape != self.dst.shape:
            raise MalformedInputError("src and dst must have equal length")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
            if self.weights.shape != self.src.shape:
                raise MalformedInputError("weights must parallel src/dst")

    @classmethod
    def from_pairs(cls, pairs, num_vertices=None, weighted=None) -> EdgeList:
        """Build from an iterable of ``(u, v)`` or ``(u, v, w)`` tuples."""
        pairs = list(pairs)
        if not pairs:
            return cls(np.empty(0, np.int64), np.empty(0, np.int64),
                       np.empty(0) if weighted else None, num_vertices)
        width = len(pairs[0])
        arr = np.asarray(pairs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != width:
            raise MalformedInputError("ragged edge tuples")
        if width == 3 and weighted is not False:
            return cls(arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64),
                       arr[:, 2], num_vertices)
        return cls(arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64),
                   None, num_vertices)

    def __len__(self) -> int:
        return int(self.src.size)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    @property
    def n(self) -> int:
        """Declared vertex count, or one past the largest id."""
        if self.num_vertices is not None:
            return int(self.num_vertices)
        if self.src.size == 0:
            return 0
        return int(max(self.src.max(), self.dst.max())) + 1

    def validate(self) -> None:
        n = self.n
        if self.src.size:
            lo = min(self.src.min(), self.dst.min())
            hi = max(self.src.max(), self.dst.max())
            if lo < 0 or hi >= n:
                raise MalformedInputError(
                    f"vertex id out of range [0, {n}): found {lo if lo < 0 else hi}")
        if n > np.iinfo(INDEX_DTYPE).max:
            raise MalformedInputError(f"{n} vertices exceed the 32-bit index limit")
        if self.weights is not None and self.weights.size:
            if not np.all(np.isfinite(self.weights)):
                raise MalformedInputError("edge weights must be finite")
            if self.weights.min() < 0:
                raise MalformedInputError("edge weights must be non-negative")

    def as_set(self) -> set:
        """Edge multiset as a set of tuples; handy in tests."""
        if self.weights is None:
            return set(zip(self.src.tolist(), self.dst.tolist()))
        return set(zip(self.src.tolist(), self.dst.tolist(), self.weights.tolist()))


@dataclass(frozen=True, eq=False)
class Graph:
    """Compressed-sparse-row adjacency.

    Neighbor slices are sorted ascending. For undirected graphs both
    directions of every edge are stored, so ``m`` is the directed count and
    ``m_undirected`` is ``m // 2``. Directed graphs may carry ``inverse``,
    the CSR of incoming edges, which pull-style kernels read.
    """

    row_offsets: np.ndarray
    col_indices: np.ndarray
    weights: np.ndarray | None = None
    directed: bool = False
    inverse: Graph | None = field(default=None, repr=False)

    def __post_init__(self):
        for arr in (self.row_offsets, self.col_indices, self.weights):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.row_offsets.size - 1)

    @property
    def m(self) -> int:
        return int(self.col_indices.size)

    @property
    def m_undirected(self) -> int:
        return self.m if self.directed else self.m // 2

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def in_degrees(self) -> np.ndarray:
        if not self.directed:
            return self.out_degrees()
        return np.bincount(self.col_indices, minlength=self.n).astype(OFFSET_DTYPE)

    def neighbors(self, v: int) -> np.ndarray:
        return self.col_indices[self.row_offsets[v]:self.row_offsets[v + 1]]

    def incoming(self) -> Graph:
        """CSR of incoming edges: the graph itself when undirected."""
        if not self.directed:
            return self
        if self.inverse is None:
            from .errors import PreconditionError
            raise PreconditionError("directed graph has no inverse; build it with with_inverse()")
        return self.inverse

    def with_inverse(self) -> Graph:
        if not self.directed or self.inverse is not None:
            return self
        return Graph(self.row_offsets, self.col_indices, self.weights, True, transpose(self))

    def edge_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n, dtype=np.int64), self.out_degrees())

    def edges(self) -> EdgeList:
        """Expand back to an edge list (both directions for undirected graphs)."""
        w = None if self.weights is None else self.weights.astype(np.float64)
        return EdgeList(self.edge_sources(), self.col_indices.astype(np.int64), w, self.n)

    def structurally_equal(self, other: Graph) -> bool:
        if self.n != other.n or self.m != other.m or self.directed != other.directed:
            return False
        if not (np.array_equal(self.row_offsets, other.row_offsets)
                and np.array_equal(self.col_indices, other.col_indices)):
            return False
        if (self.weights is None) != (other.weights is None):
            return False
        return self.weights is None or np.array_equal(self.weights, other.weights)

    def to_scipy(self):
        """The adjacency as a ``scipy.sparse.csr_matrix`` (unit values if unweighted)."""
        from scipy.sparse import csr_matrix
        data = self.weights if self.weights is not None else np.ones(self.m, WEIGHT_DTYPE)
        return csr_matrix((data, self.col_indices, self.row_offsets), shape=(self.n, self.n))

    @classmethod
    def from_scipy(cls, mat, directed: bool | None = None) -> Graph:
        """Wrap a square sparse matrix, keeping explicit entries (diagonal included)."""
        csr = mat.tocsr()
        csr.sort_indices()
        if csr.shape[0] != csr.shape[1]:
            raise MalformedInputError(f"matrix must be square, got {csr.shape}")
        if directed is None:
            directed = (abs(csr - csr.T) > 0).nnz != 0
        return cls(csr.indptr.astype(OFFSET_DTYPE), csr.indices.astype(INDEX_DTYPE),
                   csr.data.astype(WEIGHT_DTYPE), bool(directed))


def build_graph(edges: EdgeList, directed: bool = False, symmetrize: bool | None = None,
                dedup: bool = True) -> Graph:
    """Construct a CSR graph from an edge list.

    Undirected graphs are symmetrized unless ``symmetrize=False`` is passed,
    in which case the input must already hold both directions. With ``dedup``
    self-loops are dropped and parallel edges collapse to the lightest one.
    """
    edges.validate()
    n = edges.n
    if symmetrize is None:
        symmetrize = not directed
    src, dst, w = edges.src, edges.dst, edges.weights
    if symmetrize:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        if w is not None:
            w = np.concatenate([w, w])
        directed = False

    if dedup:
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if w is not None:
            w = w[keep]
            order = np.lexsort((w, dst, src))
        else:
            order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if w is not None:
            w = w[order]
        if src.size:
            first = np.ones(src.size, dtype=bool)
            first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
            src, dst = src[first], dst[first]
            if w is not None:
                w = w[first]
    else:
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if w is not None:
            w = w[order]

    offsets = np.zeros(n + 1, dtype=OFFSET_DTYPE)
    if n:
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    g = Graph(offsets, dst.astype(INDEX_DTYPE),
              None if w is None else w.astype(WEIGHT_DTYPE), bool(directed))
    if not directed and not symmetrize and not _is_symmetric(g):
        raise MalformedInputError("undirected build without symmetrize needs a symmetric edge set")
    return g


def _is_symmetric(g: Graph) -> bool:
    t = transpose(g)
    return np.array_equal(t.row_offsets, g.row_offsets) and np.array_equal(t.col_indices, g.col_indices)


def transpose(g: Graph) -> Graph:
    """Reverse every edge, carrying weights along."""
    src = g.edge_sources()
    # src is already ascending, so a stable sort by destination keeps each new row sorted
    order = np.argsort(g.col_indices, kind="stable")
    offsets = np.zeros(g.n + 1, dtype=OFFSET_DTYPE)
    if g.n:
        np.cumsum(np.bincount(g.col_indices, minlength=g.n), out=offsets[1:])
    w = None if g.weights is None else g.weights[order].copy()
    return Graph(offsets, src[order].astype(INDEX_DTYPE), w, g.directed)


@dataclass(frozen=True)
class DegreeStats:
    min_deg: int
    max_deg: int
    avg_deg: float
    degree_cv: float
    histogram: dict[int, int]

    def summary(self) -> str:
        return (f"deg min={self.min_deg} max={self.max_deg} "
                f"avg={self.avg_deg:.2f} cv={self.degree_cv:.3f}")


def degree_stats(g: Graph) -> DegreeStats:
    """Out-degree statistics; the histogram is keyed by ``floor(log2(deg))``,
    with zero-degree vertices under key ``-1``."""
    if g.n == 0:
        raise UndefinedStatsError("degree statistics are undefined for an empty graph")
    deg = g.out_degrees().astype(np.float64)
    mean = g.m / g.n
    cv = float(deg.std() / mean) if mean > 0 else 0.0
    buckets = np.full(deg.size, -1, dtype=np.int64)
    pos = deg > 0
    buckets[pos] = np.floor(np.log2(deg[pos])).astype(np.int64)
    keys, counts = np.unique(buckets, return_counts=True)
    return DegreeStats(int(deg.min()), int(deg.max()), mean, cv,
                       {int(k): int(c) for k, c in zip(keys, counts)})
