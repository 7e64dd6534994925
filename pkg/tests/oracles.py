"""Independent brute-force oracles and random channel generators for tests.

These deliberately avoid the sorted/prefix-sum shortcuts of the package code.
"""

from math import isqrt

import numpy as np


def h_oracle(views, u):
    """Check every k in 0..N: at least k videos with >= k*u views."""
    best = 0
    for k in range(len(views) + 1):
        if sum(1 for v in views if v >= k * u) >= k:
            best = k
    return best


def g_oracle(views, u, cap=True):
    """Check every k: the k largest views (zeros past N) sum to >= k^2 * u."""
    ordered = sorted(views, reverse=True)
    n = len(ordered)
    limit = n if cap else max(n, isqrt(sum(ordered) // u) + 1)
    best = 0
    for k in range(limit + 1):
        if sum(ordered[:k]) >= k * k * u:
            best = k
    return best


def heavy_tailed_views(rng: np.random.Generator, n: int):
    """Pareto-tailed view counts spanning roughly 10^1 .. 10^10."""
    scale = 10 ** rng.uniform(1, 5)
    alpha = rng.uniform(0.6, 2.0)
    raw = scale * (1 + rng.pareto(alpha, size=n))
    return [int(min(v, 10**10)) for v in raw]


def random_channel_views(seed: int):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, 601))
    return heavy_tailed_views(rng, n)


def h_oracle_np(views, u):
    """Vectorized form of :func:`h_oracle`: count videos >= k*u for every k."""
    v = np.asarray(views, dtype=np.int64)
    ks = np.arange(len(v) + 1, dtype=np.int64)
    counts = (v[None, :] >= ks[:, None] * u).sum(axis=1)
    return int(ks[counts >= ks].max())


def g_oracle_np(views, u, cap=True):
    """Vectorized form of :func:`g_oracle`: test every k against the top-k sum."""
    v = np.sort(np.asarray(views, dtype=np.int64))[::-1]
    total = int(v.sum())
    limit = len(v) if cap else max(len(v), isqrt(total // u) + 1)
    top = np.zeros(limit + 1, dtype=np.int64)
    top[1:len(v) + 1] = np.cumsum(v)
    top[len(v) + 1:] = total
    ks = np.arange(limit + 1, dtype=np.int64)
    return int(ks[top >= ks * ks * u].max())
