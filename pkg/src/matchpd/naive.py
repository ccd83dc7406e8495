"""Naive primal-dual max-weight bipartite matching.

Start from a feasible potential, look for a tight matching covering every
vertex of positive potential, and otherwise lower the potential on a Hall
violator.  Exact rationals throughout; termination follows because every
adjustment lowers pi(V) by a positive multiple of the weights' common unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .graph import (BipartiteInstance, ContractError, Potential, Side,
                    covering_matching_or_violator, endpoints, gamma, slack)


@dataclass(frozen=True)
class NaiveResult:
    matching: frozenset
    final_potential: Potential
    iterations: int


class IterationLimitExceeded(RuntimeError):
    pass


def _require_nonnegative(inst):
    for e, w in zip(inst.edges, inst.weights):
        if w < 0:
            raise ContractError(f"negative weight {w} on edge {e}")


def init_potential(inst: BipartiteInstance) -> Potential:
    """Heaviest incident weight on the left, zero on the right."""
    _require_nonnegative(inst)
    top = [Fraction(0)] * inst.n_left
    for (l, _), w in zip(inst.edges, inst.weights):
        top[l] = max(top[l], w)
    return Potential(tuple(top), (0,) * inst.n_right)


def is_feasible(inst: BipartiteInstance, pi: Potential) -> bool:
    """Nonnegative and covering every edge weight."""
    return (all(x >= 0 for _, x in pi.items())
            and all(pi.left[l] + pi.right[r] >= w for (l, r), w in zip(inst.edges, inst.weights)))


def find_epsilon(inst: BipartiteInstance, pi: Potential, X) -> Fraction:
    """Largest step that keeps pi feasible when lowering X and raising its tight neighbourhood."""
    X = frozenset(X)
    if not X:
        raise ContractError("X must be nonempty")
    if len({v.side for v in X}) != 1:
        raise ContractError("X must be one-sided")
    nbrs = gamma(inst, pi, X)
    candidates = [pi[v] for v in X]
    for v in X:
        for e in inst.incident(v):
            other = endpoints(e)[1] if v.side is Side.LEFT else endpoints(e)[0]
            s = slack(inst, pi, e)
            if other not in nbrs and s > 0:
                candidates.append(s)
    return min(candidates)


def pd_adjust(inst: BipartiteInstance, pi: Potential, X, eps) -> Potential:
    """Lower pi by eps on X, raise it on the tight neighbourhood of X.

    The neighbourhood is taken from the potential before the update.  Every
    premise of the adjustment is checked and a violation raises
    :class:`ContractError` naming it.
    """
    X = frozenset(X)
    eps = Fraction(eps)
    for v in X:
        inst.check_vertex(v)
    nbrs = gamma(inst, pi, X)
    if eps < 0:
        raise ContractError("premise violated: eps >= 0")
    for e in inst.edges:
        a, b = endpoints(e)
        if a in X and b in X:
            raise ContractError(f"premise violated: edge {e} lies inside X")
        if (a in X) != (b in X):
            outside = b if a in X else a
            if outside not in nbrs and eps > slack(inst, pi, e):
                raise ContractError(f"premise violated: eps exceeds slack of edge {e}")
    for v in X:
        if eps > pi[v]:
            raise ContractError(f"premise violated: eps exceeds pi({v!r})")

    changes = {v: pi[v] - eps for v in X}
    changes.update({v: pi[v] + eps for v in nbrs})
    new = pi.updated(changes)
    assert new.total() == pi.total() + (len(nbrs) - len(X)) * eps
    return new


def _weight_unit(inst):
    """Common unit alpha: every weight is an integer multiple of it."""
    if not inst.weights:
        return Fraction(1)
    nums = [w.numerator for w in inst.weights]
    dens = [w.denominator for w in inst.weights]
    g = math.gcd(*nums) or 1
    return Fraction(g, math.lcm(*dens))


def default_iteration_cap(inst: BipartiteInstance) -> int:
    alpha = _weight_unit(inst)
    top = max(inst.weights, default=Fraction(0))
    n = inst.n_left + inst.n_right
    return max(10 * n * math.ceil(top / alpha), 10)


def naive_solve(inst: BipartiteInstance, *, max_iterations: int | None = None,
                debug: bool = False) -> NaiveResult:
    """Max-weight matching by naive primal-dual adjustments.

    ``debug`` asserts feasibility and strict descent of pi(V) after every
    adjustment.
    """
    _require_nonnegative(inst)
    cap = default_iteration_cap(inst) if max_iterations is None else max_iterations
    pi = init_potential(inst)
    iterations = 0
    while True:
        required = [v for v, x in pi.items() if x > 0]
        found = covering_matching_or_violator(inst, pi, required)
        if found.matching is not None:
            return NaiveResult(found.matching, pi, iterations)
        if iterations >= cap:
            raise IterationLimitExceeded(f"no optimum after {cap} adjustments")
        X = found.violator
        eps = find_epsilon(inst, pi, X)
        new = pd_adjust(inst, pi, X, eps)
        if debug:
            assert is_feasible(inst, new)
            assert new.total() < pi.total()
        pi = new
        iterations += 1

