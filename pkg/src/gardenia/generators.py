"""Synthetic inputs: scale-free R-MAT graphs, 2-D meshes, uniform random
graphs, and bipartite rating sets.

Every generator draws from numpy's PCG64 bit generator seeded through
``SeedSequence``, so output is a pure function of the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graph import WEIGHT_DTYPE, EdgeList

# sample without replacement directly below this population size
_CHOICE_LIMIT = 1 << 24


@dataclass(frozen=True)
class RmatParams:
    scale: int
    edge_factor: int = 16
    a: float = 0.57
    b: float = 0.19
    c: float = 0.19
    d: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.scale < 1:
            raise ParameterError("R-MAT scale must be >= 1")
        if self.edge_factor < 1:
            raise ParameterError("R-MAT edge_factor must be >= 1")
        probs = (self.a, self.b, self.c, self.d)
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-9:
            raise ParameterError(f"quadrant probabilities must be >= 0 and sum to 1, got {probs}")


def gen_rmat(p: RmatParams) -> EdgeList:
    """``edge_factor * 2**scale`` directed edges over ``2**scale`` vertices.

    Each edge descends ``scale`` levels of the adjacency matrix, picking a
    quadrant with probabilities (a, b, c, d) at every level. Duplicates and
    self-loops are kept; ``build_graph`` removes them.
    """
    n = 1 << p.scale
    num_edges = p.edge_factor * n
    rng = np.random.default_rng(p.seed)
    src = np.zeros(num_edges, dtype=np.int64)
    dst = np.zeros(num_edges, dtype=np.int64)
    ab = p.a + p.b
    abc = ab + p.c
    for level in range(p.scale):
        r = rng.random(num_edges)
        bit = np.int64(1) << (p.scale - 1 - level)
        src |= np.where(r >= ab, bit, 0)
        dst |= np.where(((r >= p.a) & (r < ab)) | (r >= abc), bit, 0)
    return EdgeList(src, dst, None, n)


def gen_grid2d(rows: int, cols: int) -> EdgeList:
    """4-neighborhood mesh; each undirected edge is listed once."""
    if rows < 1 or cols < 1:
        raise ParameterError("grid dimensions must be >= 1")
    ids = np.arange(rows * cols, dtype=np.int64).reshape(rows, cols)
    src = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel()])
    dst = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel()])
    return EdgeList(src, dst, None, rows * cols, symmetric=True)


def _distinct_indices(rng, population: int, count: int) -> np.ndarray:
    if population <= _CHOICE_LIMIT:
        return rng.choice(population, size=count, replace=False)
    picked = np.empty(0, dtype=np.int64)
    while picked.size < count:
        extra = rng.integers(0, population, size=int((count - picked.size) * 1.1) + 16)
        merged = np.concatenate([picked, extra])
        _, first = np.unique(merged, return_index=True)
        picked = merged[np.sort(first)]
    return picked[:count]


def gen_uniform(n: int, m: int, seed: int = 0) -> EdgeList:
    """``m`` distinct directed non-loop edges chosen uniformly at random."""
    if n < 1 or m < 0:
        raise ParameterError("need n >= 1 and m >= 0")
    if m > n * (n - 1):
        raise ParameterError(f"m={m} exceeds the {n * (n - 1)} possible directed edges")
    rng = np.random.default_rng(seed)
    k = _distinct_indices(rng, n * (n - 1), m).astype(np.int64)
    src = k // max(n - 1, 1)
    rest = k % max(n - 1, 1)
    dst = np.where(rest < src, rest, rest + 1)
    return EdgeList(src, dst, None, n)


def gen_ratings(num_users: int, num_items: int, num_ratings: int,
                rating_range=(1, 5), seed: int = 0) -> EdgeList:
    """Distinct (user, item) pairs with uniform ratings.

    Integer bounds give integer ratings drawn from the inclusive range; float
    bounds give continuous ratings.
    """
    if num_users < 1 or num_items < 1:
        raise ParameterError("need at least one user and one item")
    if not 0 < num_ratings <= num_users * num_items:
        raise ParameterError(f"num_ratings must lie in [1, {num_users * num_items}]")
    lo, hi = rating_range
    if hi < lo:
        raise ParameterError("rating_range must be (low, high) with low <= high")
    rng = np.random.default_rng(seed)
    k = _distinct_indices(rng, num_users * num_items, num_ratings).astype(np.int64)
    if isinstance(lo, (int, np.integer)) and isinstance(hi, (int, np.integer)):
        values = rng.integers(lo, hi + 1, size=num_ratings).astype(np.float64)
    else:
        values = rng.uniform(lo, hi, size=num_ratings)
    return EdgeList(k // num_items, k % num_items, values, max(num_users, num_items))


def with_random_weights(edges: EdgeList, seed: int = 0, low: float = 1.0,
                        high: float = 64.0) -> EdgeList:
    """Copy of ``edges`` with uniform weights in ``[low, high)``, rounded to float32."""
    rng = np.random.default_rng([seed, 0x5EED])
    w = rng.uniform(low, high, size=len(edges)).astype(WEIGHT_DTYPE).astype(np.float64)
    return EdgeList(edges.src.copy(), edges.dst.copy(), w, edges.num_vertices,
                    edges.symmetric, edges.id_map)


_RECIPE_KEYS = {
    "rmat": {"scale", "edge_factor", "ef", "a", "b", "c", "d", "seed", "weighted"},
    "grid": {"rows", "cols", "weighted", "seed"},
    "uniform": {"n", "m", "seed", "weighted"},
    "ratings": {"users", "items", "ratings", "low", "high", "seed"},
}


def parse_recipe(recipe: str) -> tuple[str, dict]:
    """Split ``gen:rmat:scale=10,ef=16`` (the ``gen:`` prefix is optional)."""
    body = recipe[4:] if recipe.startswith("gen:") else recipe
    kind, _, rest = body.partition(":")
    if kind not in _RECIPE_KEYS:
        raise ParameterError(f"unknown generator {kind!r}; choose from {sorted(_RECIPE_KEYS)}")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or key not in _RECIPE_KEYS[kind]:
            raise ParameterError(f"bad recipe parameter {item!r} for {kind}")
        params[key] = float(value) if any(ch in value for ch in ".eE") else int(value)
    return kind, params


def from_recipe(recipe: str) -> EdgeList:
    kind, p = parse_recipe(recipe)
    seed = int(p.get("seed", 0))
    if kind == "rmat":
        a, b, c = p.get("a", 0.57), p.get("b", 0.19), p.get("c", 0.19)
        edges = gen_rmat(RmatParams(int(p["scale"]), int(p.get("edge_factor", p.get("ef", 16))),
                                    a, b, c, p.get("d", 1.0 - a - b - c), seed))
    elif kind == "grid":
        edges = gen_grid2d(int(p["rows"]), int(p["cols"]))
    elif kind == "uniform":
        edges = gen_uniform(int(p["n"]), int(p["m"]), seed)
    else:
        return gen_ratings(int(p["users"]), int(p["items"]), int(p["ratings"]),
                           (p.get("low", 1), p.get("high", 5)), seed)
    if p.get("weighted"):
        edges = with_random_weights(edges, seed)
    return edges
