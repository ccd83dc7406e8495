"""Hungarian Method for min-weight perfect bipartite matching.

The top loop repeatedly runs an alternating-forest path search that grows a
forest from every unmatched left vertex and interleaves dual adjustments with
forest growth.  The search itself runs in a backend kernel (compiled when
available) on integer data: rational weights and potentials are scaled by the
lcm of their denominators, so all arithmetic stays exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from . import _backend
from ._backend import DUAL_UNBOUNDED, L_MATCHED, NEXT_ITERATION
from .graph import (BipartiteInstance, ContractError, Edge, InstanceError, Potential,
                    augment, covered, is_matching, left)
from .slack_queue import EmptyQueue, SlackQueue

__all__ = [
    "SearchFlag", "PathSearchResult", "MinPerfectSolution", "InfeasibleError",
    "initial_mp_feasible", "is_mp_feasible", "path_search", "hungarian_solve",
    "search_contract_violations", "Problem", "Reduction", "reduce_to_min_perfect",
    "solve", "SlackQueue", "EmptyQueue",
]

_INT64_SAFE = 2 ** 62


class SearchFlag(enum.Enum):
    DUAL_UNBOUNDED = "dual-unbounded"
    L_MATCHED = "L-matched"
    NEXT_ITERATION = "next-iteration"


_FLAGS = {DUAL_UNBOUNDED: SearchFlag.DUAL_UNBOUNDED, L_MATCHED: SearchFlag.L_MATCHED,
          NEXT_ITERATION: SearchFlag.NEXT_ITERATION}


@dataclass(frozen=True)
class PathSearchResult:
    """Outcome of one path search.

    ``potential`` is the adjusted potential (the input one for L-matched).
    ``path`` is the augmenting edge path, root first (next-iteration only).
    ``ray`` is an unbounded dual direction (dual-unbounded only).
    """

    flag: SearchFlag
    potential: Potential
    path: tuple[Edge, ...] | None = None
    ray: Potential | None = None


@dataclass(frozen=True)
class MinPerfectSolution:
    matching: frozenset
    potential: Potential
    augmentations: int
    weight: Fraction


class InfeasibleError(Exception):
    """No perfect matching exists.

    ``ray`` and ``potential`` are set when the dual was found unbounded: the
    potential plus any nonnegative multiple of the ray stays mp-feasible.
    """

    def __init__(self, reason: str, ray: Potential | None = None,
                 potential: Potential | None = None):
        super().__init__(reason)
        self.reason = reason
        self.ray = ray
        self.potential = potential


def initial_mp_feasible(inst: BipartiteInstance) -> Potential:
    """Left vertices get their cheapest incident weight, right vertices 0."""
    lo = [None] * inst.n_left
    for (l, _), w in zip(inst.edges, inst.weights):
        if lo[l] is None or w < lo[l]:
            lo[l] = w
    return Potential(tuple(x if x is not None else 0 for x in lo), (0,) * inst.n_right)


def is_mp_feasible(inst: BipartiteInstance, pi: Potential) -> bool:
    return all(pi.left[l] + pi.right[r] <= w for (l, r), w in zip(inst.edges, inst.weights))


class _Scaled:
    """Integer image of (instance, matching, potential) fed to the kernels."""

    def __init__(self, inst: BipartiteInstance, matching, pi: Potential):
        self.inst = inst
        nums = list(inst.weights) + list(pi.left) + list(pi.right)
        self.scale = math.lcm(*(x.denominator for x in nums)) if nums else 1
        s = self.scale
        order = sorted(range(len(inst.edges)), key=lambda k: inst.edges[k])
        cost = [int(inst.weights[k] * s) for k in order]
        pi_l = [int(x * s) for x in pi.left]
        pi_r = [int(x * s) for x in pi.right]
        counts = np.bincount([inst.edges[k][0] for k in order], minlength=inst.n_left)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        indices = np.fromiter((inst.edges[k][1] for k in order), dtype=np.int64,
                              count=len(order))
        mate_l = np.full(inst.n_left, -1, dtype=np.int64)
        mate_r = np.full(inst.n_right, -1, dtype=np.int64)
        for l, r in matching:
            mate_l[l], mate_r[r] = r, l

        magnitude = max((abs(x) for x in cost + pi_l + pi_r), default=0)
        n = inst.n_left + inst.n_right
        if (2 * n + 4) * (magnitude + 1) < _INT64_SAFE and _backend.BACKEND == "compiled":
            self.kernels = _backend.kernels
            self.cost = np.array(cost, dtype=np.int64)
            self.pi_l = np.array(pi_l, dtype=np.int64)
            self.pi_r = np.array(pi_r, dtype=np.int64)
        else:
            from . import _pykernels
            self.kernels = _pykernels
            self.cost, self.pi_l, self.pi_r = cost, pi_l, pi_r
        self.indptr, self.indices = indptr, indices
        self.mate_l, self.mate_r = mate_l, mate_r

    def search(self):
        return self.kernels.path_search(
            self.inst.n_left, self.inst.n_right, self.indptr, self.indices, self.cost,
            self.mate_l, self.mate_r, self.pi_l, self.pi_r)

    def potential(self) -> Potential:
        s = self.scale
        return Potential(tuple(Fraction(int(x), s) for x in self.pi_l),
                         tuple(Fraction(int(x), s) for x in self.pi_r))

    def path(self, parent_r, end) -> tuple[Edge, ...]:
        edges = []
        v = end
        while True:
            u = int(parent_r[v])
            edges.append((u, v))
            nxt = int(self.mate_l[u])
            if nxt < 0:
                break
            edges.append((u, nxt))
            v = nxt
        return tuple(reversed(edges))

    def flip(self, parent_r, end) -> None:
        v = end
        while v >= 0:
            u = int(parent_r[v])
            nxt = int(self.mate_l[u])
            self.mate_l[u], self.mate_r[v] = v, u
            v = nxt

    def matching(self) -> frozenset:
        return frozenset((l, int(r)) for l, r in enumerate(self.mate_l) if r >= 0)


def _ray(inst, even_l, odd_r) -> Potential:
    return Potential(tuple(1 if even_l[u] else 0 for u in range(inst.n_left)),
                     tuple(-1 if odd_r[v] else 0 for v in range(inst.n_right)))


def _check_search_pre(inst, matching, pi):
    if not pi.matches(inst):
        raise InstanceError("potential does not match the instance")
    if not is_matching(inst, matching):
        raise ContractError("M is not a matching of the instance")
    if not is_mp_feasible(inst, pi):
        raise ContractError("potential is not mp-feasible")
    for e in matching:
        if pi.left[e[0]] + pi.right[e[1]] != inst.weight(e):
            raise ContractError(f"matched edge {e} is not tight")


def path_search(inst: BipartiteInstance, matching, pi: Potential) -> PathSearchResult:
    """Search for a tight augmenting path, adjusting ``pi`` as the forest grows."""
    matching = frozenset(tuple(e) for e in matching)
    _check_search_pre(inst, matching, pi)
    sc = _Scaled(inst, matching, pi)
    code, parent_r, even_l, odd_r, end = sc.search()
    flag = _FLAGS[code]
    if flag is SearchFlag.L_MATCHED:
        return PathSearchResult(flag, pi)
    if flag is SearchFlag.DUAL_UNBOUNDED:
        return PathSearchResult(flag, sc.potential(), ray=_ray(inst, even_l, odd_r))
    return PathSearchResult(flag, sc.potential(), path=sc.path(parent_r, end))


def search_contract_violations(inst: BipartiteInstance, matching, pi: Potential,
                               result: PathSearchResult) -> list[str]:
    """Literal check of the three search properties; empty list means all hold."""
    M = frozenset(tuple(e) for e in matching)
    out = []

    def mp_feasible(p):
        return all(p.left[l] + p.right[r] <= w for (l, r), w in zip(inst.edges, inst.weights))

    def tight(p, e):
        return p.left[e[0]] + p.right[e[1]] == inst.weight(e)

    if result.flag is SearchFlag.L_MATCHED:
        if any(left(u) not in covered(M) for u in range(inst.n_left)):
            out.append("L-matched but some left vertex is free")
    elif result.flag is SearchFlag.NEXT_ITERATION:
        p2 = result.potential
        if not mp_feasible(p2):
            out.append("new potential not mp-feasible")
        if not all(tight(p2, e) for e in M):
            out.append("matching not tight under new potential")
        path = result.path or ()
        if not all(inst.has_edge(e) and tight(p2, e) for e in path):
            out.append("path not inside the tight subgraph")
        try:
            augment(M, path)
        except ContractError as exc:
            out.append(f"path is not an augmenting path: {exc}")
    else:
        d, base = result.ray, result.potential
        if d is None or not mp_feasible(base):
            out.append("dual-unbounded without a feasible base potential and ray")
        else:
            if any(d.left[l] + d.right[r] > 0 for l, r in inst.edges):
                out.append("ray direction violates an edge constraint")
            if d.total() <= 0:
                out.append("ray does not increase the dual objective")
    return out


def hungarian_solve(inst: BipartiteInstance, pi0: Potential | None = None, *,
                    check: bool = False) -> MinPerfectSolution:
    """Min-weight perfect matching with an optimality certificate.

    Raises :class:`InfeasibleError` when no perfect matching exists.  With
    ``check=True`` every path search result and the loop invariants are
    verified literally (slow; for testing).
    """
    if inst.n_left != inst.n_right:
        raise InfeasibleError(f"sides differ: {inst.n_left} != {inst.n_right}")
    pi = initial_mp_feasible(inst) if pi0 is None else pi0
    _check_search_pre(inst, frozenset(), pi)

    sc = _Scaled(inst, frozenset(), pi)
    augmentations = 0
    while True:
        if check:
            before_M, before_pi = sc.matching(), sc.potential()
        code, parent_r, even_l, odd_r, end = sc.search()
        flag = _FLAGS[code]
        if check:
            if flag is SearchFlag.L_MATCHED:
                res = PathSearchResult(flag, before_pi)
            elif flag is SearchFlag.DUAL_UNBOUNDED:
                res = PathSearchResult(flag, sc.potential(), ray=_ray(inst, even_l, odd_r))
            else:
                res = PathSearchResult(flag, sc.potential(), path=sc.path(parent_r, end))
            bad = search_contract_violations(inst, before_M, before_pi, res)
            if bad:
                raise ContractError("; ".join(bad))
        if flag is SearchFlag.L_MATCHED:
            break
        if flag is SearchFlag.DUAL_UNBOUNDED:
            raise InfeasibleError("dual unbounded", ray=_ray(inst, even_l, odd_r),
                                  potential=sc.potential())
        sc.flip(parent_r, end)
        augmentations += 1
        if check:
            M, p = sc.matching(), sc.potential()
            if not (is_matching(inst, M) and is_mp_feasible(inst, p)
                    and all(p.left[l] + p.right[r] == inst.weight((l, r)) for l, r in M)):
                raise ContractError("loop invariant broken after augmentation")

    M = sc.matching()
    return MinPerfectSolution(M, sc.potential(), augmentations, inst.weight_of(M))


# -- reductions ------------------------------------------------------------------

class Problem(enum.Enum):
    MAX_WEIGHT_MATCHING = "maxw"
    MAX_WEIGHT_PERFECT = "maxwperfect"
    MIN_WEIGHT_PERFECT = "minperfect"
    MAX_CARDINALITY = "maxcard"
    MIN_WEIGHT_MAX_CARDINALITY = "minwmaxcard"


class Reduction(NamedTuple):
    instance: BipartiteInstance
    extract: Callable[[frozenset], frozenset]


def _is_complete_square(inst):
    return inst.n_left == inst.n_right and len(inst.edges) == inst.n_left * inst.n_right


def reduce_to_min_perfect(problem: Problem, inst: BipartiteInstance) -> Reduction:
    """Encode ``problem`` on ``inst`` as min-weight perfect matching on a
    complete bipartite graph with equal sides.

    Missing pairs and dummy vertices get filler edges.  ``extract`` maps a
    min-weight perfect matching of the encoded instance back to an optimal
    solution of the original problem; for the perfect-matching problems it
    raises :class:`InfeasibleError` if a filler edge had to be used.
    """
    problem = Problem(problem)
    if problem is Problem.MIN_WEIGHT_PERFECT and _is_complete_square(inst):
        return Reduction(inst, lambda m: frozenset(m))

    n = max(inst.n_left, inst.n_right)
    big = max((abs(w) for w in inst.weights), default=Fraction(0))
    penalty = 2 * n * (big + 1) + 1
    if problem is Problem.MAX_WEIGHT_MATCHING:
        if any(w < 0 for w in inst.weights):
            raise ContractError("max-weight matching requires nonnegative weights")
        top = max(inst.weights, default=Fraction(0))
        real, filler = (lambda w: top - w), top
    elif problem is Problem.MAX_WEIGHT_PERFECT:
        real, filler = (lambda w: -w), penalty
    elif problem is Problem.MIN_WEIGHT_PERFECT:
        real, filler = (lambda w: w), penalty
    elif problem is Problem.MAX_CARDINALITY:
        real, filler = (lambda w: Fraction(0)), Fraction(1)
    else:
        real, filler = (lambda w: w), penalty

    weighted = []
    for l in range(n):
        for r in range(n):
            if l < inst.n_left and r < inst.n_right and inst.has_edge((l, r)):
                weighted.append((l, r, real(inst.weight((l, r)))))
            else:
                weighted.append((l, r, filler))
    reduced = BipartiteInstance.from_weighted_edges(n, n, weighted)
    perfect = problem in (Problem.MAX_WEIGHT_PERFECT, Problem.MIN_WEIGHT_PERFECT)

    def extract(matching):
        kept = frozenset(e for e in matching if e[0] < inst.n_left and e[1] < inst.n_right
                         and inst.has_edge(e))
        if perfect and len(kept) != len(matching):
            raise InfeasibleError("no perfect matching: a filler edge was needed")
        return kept

    return Reduction(reduced, extract)


def solve(problem: Problem, inst: BipartiteInstance, *, check: bool = False):
    """Reduce, solve with the Hungarian Method, extract.

    Returns ``(matching, reduction, solution)``; ``solution`` refers to the
    reduced instance.
    """
    red = reduce_to_min_perfect(problem, inst)
    sol = hungarian_solve(red.instance, check=check)
    return red.extract(sol.matching), red, sol
