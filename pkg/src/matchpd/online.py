"""Online bipartite matching: RANKING, vertex-weighted RANKING and Adwords.

Offline vertices are ``0 .. offline-1``; arrivals are listed in arrival order,
each with its offline neighbourhood.  RANKING draws a priority ``Y_v`` in
[0, 1] per offline vertex and matches each arrival to its free neighbour of
smallest priority.

Monte Carlo estimates are reproducible: trials are grouped into fixed-size
blocks and block ``k`` draws from the substream ``SeedSequence(seed,
spawn_key=(k,))``, so trial ``t`` always sees the same priorities no matter
how many threads run the blocks.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._backend import kernels
from .graph import BipartiteInstance, InstanceError, as_fraction, max_cardinality_matching

DEFAULT_F = 1 - 1 / math.e
BLOCK = 4096


def default_g(y):
    """exp(y - 1); works on scalars and arrays."""
    if isinstance(y, np.ndarray):
        return np.exp(y - 1.0)
    return math.exp(float(y) - 1.0)


@dataclass(frozen=True)
class OnlineInstance:
    offline: int
    arrivals: tuple[tuple[int, ...], ...]
    offline_weights: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        arrivals = tuple(tuple(sorted({int(v) for v in nb})) for nb in self.arrivals)
        for j, nb in enumerate(arrivals):
            for v in nb:
                if not 0 <= v < self.offline:
                    raise InstanceError(f"arrival {j} names offline vertex {v} out of range")
        object.__setattr__(self, "arrivals", arrivals)
        if self.offline_weights is not None:
            ws = tuple(as_fraction(w) for w in self.offline_weights)
            if len(ws) != self.offline or any(w <= 0 for w in ws):
                raise InstanceError("offline weights must be positive, one per offline vertex")
            object.__setattr__(self, "offline_weights", ws)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """``(offline, arrival)`` pairs in arrival order."""
        return [(v, j) for j, nb in enumerate(self.arrivals) for v in nb]

    def csr(self):
        indptr = np.zeros(len(self.arrivals) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(nb) for nb in self.arrivals])
        indices = np.fromiter(itertools.chain.from_iterable(self.arrivals), dtype=np.int64,
                              count=int(indptr[-1]))
        return indptr, indices

    def as_bipartite(self, weighted: bool = False) -> BipartiteInstance:
        ws = self.offline_weights if weighted else None
        return BipartiteInstance.from_weighted_edges(
            self.offline, len(self.arrivals),
            ((v, j, ws[v] if ws else 1) for v, j in self.edges))


@dataclass(frozen=True)
class OnlineRun:
    """One execution: ``mates[j]`` is the offline vertex given to arrival ``j``."""

    mates: tuple[int | None, ...]
    value: Fraction
    weights: tuple[Fraction, ...] | None = None

    @property
    def matched_edges(self) -> list[tuple[int, int]]:
        return [(v, j) for j, v in enumerate(self.mates) if v is not None]


def _greedy(inst, score):
    used = set()
    mates = []
    for nb in inst.arrivals:
        free = [v for v in nb if v not in used]
        if not free:
            mates.append(None)
            continue
        best = max(free, key=lambda v: (score(v), -v))
        used.add(best)
        mates.append(best)
    return mates


def ranking_run(inst: OnlineInstance, Y: Sequence) -> OnlineRun:
    """Each arrival takes its free neighbour of smallest priority (ties: lower index)."""
    if len(Y) != inst.offline:
        raise ValueError("one priority per offline vertex is required")
    mates = _greedy(inst, lambda v: -Y[v])
    return OnlineRun(tuple(mates), Fraction(sum(m is not None for m in mates)))


def ranking_run_permutation(inst: OnlineInstance, rank: Sequence[int]) -> OnlineRun:
    """RANKING driven by a permutation: ``rank[v]`` is v's position, lowest wins."""
    if sorted(rank) != list(range(inst.offline)):
        raise ValueError("rank must be a permutation of the offline vertices")
    used = set()
    mates = []
    for nb in inst.arrivals:
        free = [v for v in nb if v not in used]
        if free:
            v = min(free, key=lambda x: rank[x])
            used.add(v)
            mates.append(v)
        else:
            mates.append(None)
    return OnlineRun(tuple(mates), Fraction(sum(m is not None for m in mates)))


def vertex_weighted_run(inst: OnlineInstance, Y: Sequence,
                        g: Callable = default_g) -> OnlineRun:
    """Perturbed greedy: maximise ``w_v * (1 - g(Y_v))`` over free neighbours."""
    if inst.offline_weights is None:
        raise ValueError("vertex-weighted run needs offline weights")
    w = inst.offline_weights
    scores = [float(w[v]) * (1 - g(Y[v])) for v in range(inst.offline)]
    mates = _greedy(inst, lambda v: scores[v])
    value = sum((w[v] for v in mates if v is not None), Fraction(0))
    return OnlineRun(tuple(mates), value, w)


@dataclass(frozen=True)
class DualFit:
    F: object
    offline: tuple
    online: tuple

    @property
    def objective(self):
        vals = list(self.offline) + list(self.online)
        if all(isinstance(x, (int, Fraction)) for x in vals):
            return sum(vals, Fraction(0))
        return math.fsum(vals)


def dual_fit(run: OnlineRun, Y: Sequence, g: Callable = default_g, F=DEFAULT_F) -> DualFit:
    """Split each matched edge's value as ``g(Y_v)/F`` offline and ``(1-g(Y_v))/F`` online.

    The objective equals ``run.value / F``.  Passing rational ``Y``, ``g`` and
    ``F`` keeps every value exact.
    """
    if not 0 < F <= 1:
        raise ValueError("F must lie in (0, 1]")
    offline = [0] * len(Y)
    online = [0] * len(run.mates)
    for v, j in run.matched_edges:
        unit = run.weights[v] if run.weights is not None else 1
        if not isinstance(F, Fraction):
            unit = float(unit)
        gy = g(Y[v])
        offline[v] = unit * gy / F
        online[j] = unit * (1 - gy) / F
    return DualFit(F, tuple(offline), tuple(online))


# -- Monte Carlo ---------------------------------------------------------------

@dataclass(frozen=True)
class RatioEstimate:
    trials: int
    mean_value: float
    opt: Fraction
    mean_ratio: float
    std_error: float
    seed: int

    def to_json(self) -> dict:
        return {"trials": self.trials, "mean_value": self.mean_value,
                "opt": _frac_str(self.opt), "mean_ratio": self.mean_ratio,
                "std_error": self.std_error, "seed": self.seed}


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def thread_count() -> int:
    raw = os.environ.get("MATCHPD_THREADS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def block_priorities(seed: int, block: int, size: int, offline: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss)).random((size, offline))


def _blocks(trials):
    return [(k, min(BLOCK, trials - k * BLOCK)) for k in range(math.ceil(trials / BLOCK))]


def _run_blocks(fn, trials, threads):
    blocks = _blocks(trials)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(blocks) == 1:
        return [fn(k, size) for k, size in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: fn(*b), blocks))


def _simulate(inst, trials, seed, weighted, g, threads):
    """Per-trial online values, in trial order."""
    indptr, indices = inst.csr()
    w = np.array([float(x) for x in inst.offline_weights]) if weighted else None

    def block(k, size):
        Y = block_priorities(seed, k, size, inst.offline)
        keys = w * (1.0 - g(Y)) if weighted else -Y
        mates = kernels.greedy_batch(indptr, indices, keys)
        if not weighted:
            return (mates >= 0).sum(axis=1).astype(np.float64)
        picked = np.where(mates >= 0, w[np.maximum(mates, 0)] if inst.offline else 0.0, 0.0)
        return picked.sum(axis=1)

    return np.concatenate(_run_blocks(block, trials, threads)) if trials else np.zeros(0)


def offline_optimum(inst: OnlineInstance, weighted: bool = False) -> Fraction:
    """Value of the best offline matching (cardinality or offline-weight sum)."""
    if not weighted:
        return Fraction(len(max_cardinality_matching(
            inst.edges, inst.offline, len(inst.arrivals))))
    from .hungarian import Problem, solve
    bip = inst.as_bipartite(weighted=True)
    m, _, _ = solve(Problem.MAX_WEIGHT_MATCHING, bip)
    return bip.weight_of(m)


def _mean_and_se(values):
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def monte_carlo_ratio(inst: OnlineInstance, trials: int, seed: int, *,
                      weighted: bool = False, g: Callable = default_g,
                      threads: int | None = None) -> RatioEstimate:
    """Estimate E[value] / OPT for RANKING (or its vertex-weighted variant)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if weighted and inst.offline_weights is None:
        raise ValueError("weighted estimate needs offline weights")
    opt = offline_optimum(inst, weighted)
    if opt == 0:
        raise ZeroDivisionError("offline optimum is 0; the ratio is undefined")
    values = _simulate(inst, trials, seed, weighted, g, threads)
    mean, _ = _mean_and_se(values)
    ratio, se = _mean_and_se(values / float(opt))
    return RatioEstimate(trials, mean, opt, ratio, se, seed)


@dataclass(frozen=True)
class EdgeDualEstimate:
    offline: int
    arrival: int
    mean: float
    std_error: float
    flagged: bool


@dataclass(frozen=True)
class DualCheckReport:
    edges: tuple[EdgeDualEstimate, ...]
    trials: int
    seed: int
    F: float

    @property
    def flagged(self) -> list[EdgeDualEstimate]:
        return [e for e in self.edges if e.flagged]

    def to_json(self) -> dict:
        return {"trials": self.trials, "seed": self.seed, "F": self.F,
                "flagged_count": len(self.flagged),
                "edges": [{"offline": e.offline, "arrival": e.arrival, "mean": e.mean,
                           "std_error": e.std_error, "flagged": e.flagged}
                          for e in self.edges]}


def expected_dual_feasibility_check(inst: OnlineInstance, g: Callable = default_g,
                                    F: float = DEFAULT_F, trials: int = 100_000,
                                    seed: int = 0, threads: int | None = None) -> DualCheckReport:
    """Estimate E[pi(v) + pi(u)] for every edge of the fitted RANKING dual.

    An edge is flagged when its estimate is below ``1 - 3 * std_error``.
    """
    if not 0 < F <= 1:
        raise ValueError("F must lie in (0, 1]")
    indptr, indices = inst.csr()
    edges = inst.edges
    e_off = np.array([v for v, _ in edges], dtype=np.intp)
    e_on = np.array([j for _, j in edges], dtype=np.intp)

    def block(k, size):
        Y = block_priorities(seed, k, size, inst.offline)
        mates = kernels.greedy_batch(indptr, indices, -Y)
        gY = g(Y)
        rows = np.arange(size)[:, None]
        matched = mates >= 0
        safe = np.maximum(mates, 0)
        pi_on = np.where(matched, (1.0 - gY[rows, safe]) / F, 0.0)
        used = np.zeros((size, inst.offline), dtype=bool)
        r_idx, j_idx = np.nonzero(matched)
        used[r_idx, mates[r_idx, j_idx]] = True
        pi_off = np.where(used, gY / F, 0.0)
        x = pi_off[:, e_off] + pi_on[:, e_on]
        return x.sum(axis=0), (x * x).sum(axis=0)

    parts = _run_blocks(block, trials, threads) if edges else []
    out = []
    for idx, (v, j) in enumerate(edges):
        s1 = math.fsum(p[0][idx] for p in parts)
        s2 = math.fsum(p[1][idx] for p in parts)
        mean = s1 / trials
        var = max(s2 - trials * mean * mean, 0.0) / (trials - 1) if trials > 1 else 0.0
        se = math.sqrt(var / trials)
        out.append(EdgeDualEstimate(v, j, mean, se, mean < 1 - 3 * se))
    return DualCheckReport(tuple(out), trials, seed, float(F))


# -- exhaustive expectations ---------------------------------------------------

def permutation_expectation(inst: OnlineInstance) -> Fraction:
    """Average RANKING value over all permutations of the offline vertices."""
    total, count = Fraction(0), 0
    for perm in itertools.permutations(range(inst.offline)):
        rank = [0] * inst.offline
        for pos, v in enumerate(perm):
            rank[v] = pos
        total += ranking_run_permutation(inst, rank).value
        count += 1
    return total / count


def priority_expectation(inst: OnlineInstance) -> Fraction:
    """Average RANKING value over the orderings of continuous priorities.

    Almost surely the priorities are distinct and every relative order is
    equally likely; each order is realised by one representative draw.
    """
    n = inst.offline
    total, count = Fraction(0), 0
    for order in itertools.permutations(range(n)):
        Y = [0.0] * n
        for pos, v in enumerate(order):
            Y[v] = (pos + 0.5) / n
        total += ranking_run(inst, Y).value
        count += 1
    return total / count


# -- Adwords ------------------------------------------------------------------

@dataclass(frozen=True)
class AdwordsInstance:
    budgets: tuple[Fraction, ...]
    queries: tuple[dict, ...]
    bid_fraction_cap: Fraction = Fraction(1, 50)

    def __post_init__(self):
        budgets = tuple(as_fraction(b) for b in self.budgets)
        if any(b <= 0 for b in budgets):
            raise InstanceError("budgets must be positive")
        cap = as_fraction(self.bid_fraction_cap)
        queries = []
        for q, bids in enumerate(self.queries):
            clean = {}
            for i, b in bids.items():
                i, b = int(i), as_fraction(b)
                if not 0 <= i < len(budgets):
                    raise InstanceError(f"query {q} bids for unknown bidder {i}")
                if b < 0:
                    raise InstanceError(f"query {q} has a negative bid")
                if b > budgets[i] * cap:
                    raise InstanceError(f"query {q}: bid {b} exceeds {cap} of bidder {i}'s budget")
                clean[i] = b
            queries.append(dict(sorted(clean.items())))
        object.__setattr__(self, "budgets", budgets)
        object.__setattr__(self, "queries", tuple(queries))
        object.__setattr__(self, "bid_fraction_cap", cap)


def adwords_run(inst: AdwordsInstance) -> OnlineRun:
    """Assign each query to the bidder maximising ``bid * (1 - exp(spent_fraction - 1))``.

    Spend is capped at the remaining budget; the value is total spend.
    """
    spent = [Fraction(0)] * len(inst.budgets)
    mates = []
    for bids in inst.queries:
        best, best_score = None, 0.0
        for i, b in bids.items():
            if spent[i] >= inst.budgets[i] or b == 0:
                continue
            score = float(b) * (1.0 - math.exp(float(spent[i] / inst.budgets[i]) - 1.0))
            if score > best_score:
                best, best_score = i, score
        if best is not None:
            spent[best] += min(bids[best], inst.budgets[best] - spent[best])
        mates.append(best)
    return OnlineRun(tuple(mates), sum(spent, Fraction(0)))


def adwords_upper_bound(inst: AdwordsInstance) -> Fraction:
    """min(total budget, sum of each query's highest bid) bounds any allocation's revenue."""
    top = sum((max(b.values(), default=Fraction(0)) for b in inst.queries), Fraction(0))
    return min(sum(inst.budgets, Fraction(0)), top)
