"""Active-vertex sets with a sparse (id list) and a dense (bitmap) form."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

DEFAULT_DENSE_THRESHOLD = 0.05


def bitmap_words(n: int) -> int:
    return (n + 63) // 64


def ids_to_bitmap(ids: np.ndarray, n: int) -> np.ndarray:
    mask = np.zeros(bitmap_words(n) * 64, dtype=bool)
    mask[ids] = True
    return np.packbits(mask, bitorder="little").view("<u8").astype(np.uint64)


def bitmap_to_ids(words: np.ndarray, n: int) -> np.ndarray:
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")[:n]
    return np.flatnonzero(bits).astype(np.int32)


@dataclass(frozen=True, eq=False)
class Frontier:
    """Exactly one of ``ids`` (duplicate-free vertex ids) or ``bits``
    (uint64 words, bit ``v`` of word ``v // 64``) is set."""

    n: int
    ids: np.ndarray | None = None
    bits: np.ndarray | None = None

    @property
    def is_dense(self) -> bool:
        return self.bits is not None

    @property
    def size(self) -> int:
        if self.bits is not None:
            return int(np.bitwise_count(self.bits).sum())
        return int(self.ids.size)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, v: int) -> bool:
        if not 0 <= v < self.n:
            return False
        if self.bits is not None:
            return bool((int(self.bits[v >> 6]) >> (v & 63)) & 1)
        return bool(np.any(self.ids == v))

    def to_dense(self) -> Frontier:
        if self.bits is not None:
            return self
        return Frontier(self.n, bits=ids_to_bitmap(self.ids, self.n))

    def to_sparse(self) -> Frontier:
        """Sparse form with ids in ascending order."""
        if self.bits is not None:
            return Frontier(self.n, ids=bitmap_to_ids(self.bits, self.n))
        return Frontier(self.n, ids=np.sort(self.ids))

    def vertex_ids(self) -> np.ndarray:
        return self.to_sparse().ids


def frontier_from_list(ids, n: int) -> Frontier:
    arr = np.asarray(ids, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ParameterError(f"frontier ids must lie in [0, {n})")
    if np.unique(arr).size != arr.size:
        raise ParameterError("frontier ids must be duplicate-free")
    return Frontier(n, ids=arr.astype(np.int32))


def to_dense(f: Frontier) -> Frontier:
    return f.to_dense()


def to_sparse(f: Frontier) -> Frontier:
    return f.to_sparse()


def should_use_dense(frontier_size: int, n: int,
                     threshold_fraction: float = DEFAULT_DENSE_THRESHOLD) -> bool:
    if not 0 < threshold_fraction < 1:
        raise ParameterError("threshold_fraction must lie strictly between 0 and 1")
    return frontier_size > threshold_fraction * n


def dense_switch_size(n: int, threshold_fraction: float = DEFAULT_DENSE_THRESHOLD) -> int:
    """Smallest frontier size for which :func:`should_use_dense` is true."""
    return math.floor(threshold_fraction * n) + 1
