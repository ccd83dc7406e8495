"""Exhaustive reference solvers for small instances.

Slow on purpose and deliberately naive: these are the ground truth that the
solvers and certificate checkers are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .graph import BipartiteInstance
from .hungarian import InfeasibleError, Problem


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationBudget:
    max_vertices: int = 12
    max_edges: int = 24

    def check(self, inst: BipartiteInstance) -> None:
        n = inst.n_left + inst.n_right
        if n > self.max_vertices or len(inst.edges) > self.max_edges:
            raise BudgetExceeded(
                f"{n} vertices / {len(inst.edges)} edges exceed the enumeration budget "
                f"({self.max_vertices} / {self.max_edges})")


DEFAULT_BUDGET = EnumerationBudget()


def enumerate_matchings(inst: BipartiteInstance,
                        budget: EnumerationBudget = DEFAULT_BUDGET) -> Iterator[frozenset]:
    """Every matching exactly once, in a fixed order.

    Walks the edge list, deciding include/exclude per edge and pruning
    inclusions that would share an endpoint.
    """
    budget.check(inst)
    edges = inst.edges
    used_l, used_r, chosen = set(), set(), []

    def walk(k):
        if k == len(edges):
            yield frozenset(chosen)
            return
        yield from walk(k + 1)
        l, r = edges[k]
        if l not in used_l and r not in used_r:
            used_l.add(l)
            used_r.add(r)
            chosen.append(edges[k])
            yield from walk(k + 1)
            chosen.pop()
            used_l.discard(l)
            used_r.discard(r)

    yield from walk(0)


def count_matchings(edges) -> int:
    """Independent count: matchings containing the first edge plus those that don't."""
    edges = list(edges)
    if not edges:
        return 1
    (l, r), rest = edges[0], edges[1:]
    compatible = [e for e in rest if e[0] != l and e[1] != r]
    return count_matchings(rest) + count_matchings(compatible)


def _perfect_matchings(inst):
    n = inst.n_left
    if n != inst.n_right:
        return
    adj = inst.adj_left
    used = [False] * n
    chosen = []

    def walk(l):
        if l == n:
            yield frozenset(chosen)
            return
        for r in adj[l]:
            if not used[r]:
                used[r] = True
                chosen.append((l, r))
                yield from walk(l + 1)
                chosen.pop()
                used[r] = False

    yield from walk(0)


def brute_optimum(problem: Problem, inst: BipartiteInstance,
                  budget: EnumerationBudget = DEFAULT_BUDGET) -> tuple[Fraction, frozenset]:
    """Exact optimum ``(value, witness)`` by exhaustion.

    ``value`` is the weight of the witness, except for ``MAX_CARDINALITY``
    where it is the cardinality.  Raises :class:`InfeasibleError` for the
    perfect problems when no perfect matching exists.  Ties keep the first
    witness in enumeration order.
    """
    problem = Problem(problem)
    budget.check(inst)
    w = dict(zip(inst.edges, inst.weights))

    def weight(m):
        return sum((w[e] for e in m), Fraction(0))

    if problem in (Problem.MIN_WEIGHT_PERFECT, Problem.MAX_WEIGHT_PERFECT):
        sign = 1 if problem is Problem.MIN_WEIGHT_PERFECT else -1
        best = None
        for m in _perfect_matchings(inst):
            if best is None or sign * weight(m) < sign * weight(best):
                best = m
        if best is None:
            raise InfeasibleError("no perfect matching")
        return weight(best), best

    best, best_key = None, None
    for m in enumerate_matchings(inst, budget):
        if problem is Problem.MAX_WEIGHT_MATCHING:
            key = weight(m)
        elif problem is Problem.MAX_CARDINALITY:
            key = Fraction(len(m))
        else:
            key = (len(m), -weight(m))
        if best_key is None or key > best_key:
            best, best_key = m, key
    if problem is Problem.MAX_CARDINALITY:
        return Fraction(len(best)), best
    return weight(best), best
