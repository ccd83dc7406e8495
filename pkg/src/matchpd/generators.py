"""Seeded test-instance families."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .graph import BipartiteInstance
from .online import AdwordsInstance, OnlineInstance


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def random_bipartite(n_left: int, n_right: int, seed: int, *, density: float = 0.5,
                     low: int = 0, high: int = 10) -> BipartiteInstance:
    """Each pair is an edge with probability ``density``; integer weights in [low, high]."""
    rng = _rng(seed)
    mask = rng.random((n_left, n_right)) < density
    w = rng.integers(low, high + 1, size=(n_left, n_right))
    return BipartiteInstance.from_weighted_edges(
        n_left, n_right,
        [(l, r, int(w[l, r])) for l in range(n_left) for r in range(n_right) if mask[l, r]])


def complete(n: int, seed: int = 0, *, unit: bool = False, low: int = 0,
             high: int = 10) -> BipartiteInstance:
    if unit:
        return BipartiteInstance.complete([[1] * n for _ in range(n)])
    w = _rng(seed).integers(low, high + 1, size=(n, n))
    return BipartiteInstance.complete(w.tolist())


def upper_triangular(n: int) -> OnlineInstance:
    """Arrival j sees offline vertices 0 .. n-1-j.

    The first arrivals have the widest choice, so RANKING's early random
    picks block the later, narrower arrivals; the optimum matches arrival j
    to vertex n-1-j.
    """
    return OnlineInstance(n, tuple(tuple(range(n - j)) for j in range(n)))


def adwords_small_bids(bidders: int, seed: int, *, queries_per_bidder: int = 100,
                       bidders_per_query: int = 4) -> AdwordsInstance:
    """Budgets in [500, 1000]; each query draws a few bidders with bids up to budget/50."""
    rng = _rng(seed)
    budgets = rng.integers(500, 1001, size=bidders)
    k = min(bidders_per_query, bidders)
    queries = []
    for _ in range(queries_per_bidder * bidders):
        who = np.sort(rng.choice(bidders, size=k, replace=False))
        queries.append({int(i): Fraction(int(rng.integers(1, budgets[i] // 50 + 1)))
                        for i in who})
    return AdwordsInstance(tuple(Fraction(int(b)) for b in budgets), tuple(queries))
