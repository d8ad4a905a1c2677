"""Matrix factorization of a ratings matrix by stochastic gradient descent."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .. import parallel
from ..errors import ParameterError, TrainingDivergedError

DEFAULT_K = 20
DEFAULT_LR = 0.05
DEFAULT_LAMBDA = 0.01
DEFAULT_EPOCHS = 10


@dataclass
class FactorModel:
    user_factors: np.ndarray
    item_factors: np.ndarray
    rmse_trace: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return int(self.user_factors.shape[1])

    def predict(self, user: int, item: int) -> float:
        return float(self.user_factors[user] @ self.item_factors[item])


@njit(nogil=True, cache=True)
def _sgd_chunk(users, items, ratings, order, P, Q, lr, lam, lo, hi):
    k = P.shape[1]
    for t in range(lo, hi):
        r = order[t]
        u = users[r]
        i = items[r]
        pred = 0.0
        for f in range(k):
            pred += P[u, f] * Q[i, f]
        e = ratings[r] - pred
        for f in range(k):
            pu = P[u, f]
            qi = Q[i, f]
            P[u, f] = pu + lr * (e * qi - lam * pu)
            Q[i, f] = qi + lr * (e * pu - lam * qi)
    return 0


@njit(nogil=True, cache=True)
def _rmse(users, items, ratings, P, Q):
    k = P.shape[1]
    sq = 0.0
    for r in range(ratings.size):
        pred = 0.0
        for f in range(k):
            pred += P[users[r], f] * Q[items[r], f]
        d = ratings[r] - pred
        sq += d * d
    return np.sqrt(sq / ratings.size)


def rmse(model: FactorModel, ratings) -> float:
    return float(_rmse(ratings.src, ratings.dst, ratings.weights,
                       model.user_factors, model.item_factors))


def init_factors(num_users: int, num_items: int, k: int, seed: int):
    """Uniform in ``[0, 1/sqrt(k))`` from a seeded PCG64 stream."""
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(k)
    return rng.uniform(0.0, scale, (num_users, k)), rng.uniform(0.0, scale, (num_items, k))


def sgd_mf(ratings, k: int = DEFAULT_K, learning_rate: float = DEFAULT_LR,
           regularization: float = DEFAULT_LAMBDA, epochs: int = DEFAULT_EPOCHS,
           seed: int = 0, workers: int | None = None,
           num_users: int | None = None, num_items: int | None = None) -> FactorModel:
    """Factor ``ratings`` (src = user, dst = item, weight = rating).

    Each epoch visits the ratings in a fresh seeded permutation. With several
    workers the permutation is cut into contiguous slices updated concurrently
    without locks, so only single-worker runs are bit-reproducible.
    """
    if len(ratings) == 0 or ratings.weights is None:
        raise ParameterError("SGD needs a non-empty weighted ratings list")
    if k < 1:
        raise ParameterError("latent dimension k must be >= 1")
    if epochs < 0:
        raise ParameterError("epochs must be >= 0")
    workers = parallel.resolve_workers(workers)
    num_users = int(ratings.src.max()) + 1 if num_users is None else num_users
    num_items = int(ratings.dst.max()) + 1 if num_items is None else num_items
    P, Q = init_factors(num_users, num_items, k, seed)
    model = FactorModel(P, Q)
    users, items, values = ratings.src, ratings.dst, ratings.weights
    rng = np.random.default_rng([seed, 1])
    bounds = parallel.equal_bounds(values.size, parallel.split_count(values.size, workers))
    for _ in range(epochs):
        order = rng.permutation(values.size)
        parallel.run_chunks(_sgd_chunk, bounds,
                            (users, items, values, order, P, Q,
                             float(learning_rate), float(regularization)), workers)
        err = float(_rmse(users, items, values, P, Q))
        if not np.isfinite(err):
            raise TrainingDivergedError(f"RMSE became {err} after {len(model.rmse_trace) + 1} epochs")
        model.rmse_trace.append(err)
    return model
