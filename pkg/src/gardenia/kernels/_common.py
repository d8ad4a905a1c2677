import numpy as np

from ..errors import ParameterError

HOP_INF = np.iinfo(np.int32).max


def check_source(g, source: int) -> int:
    if not 0 <= int(source) < g.n:
        raise ParameterError(f"source {source} out of range for {g.n} vertices")
    return int(source)


def hops_to_dist(hops: np.ndarray) -> np.ndarray:
    """int32 hop counts with a sentinel -> float64 with +inf for unreached."""
    out = hops.astype(np.float64)
    out[hops == HOP_INF] = np.inf
    return out
