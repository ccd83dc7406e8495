"""Bipartite graphs, matchings, potentials and the slack machinery.

Vertices are dense integers per side.  An edge is the pair ``(l, r)`` of a
left index and a right index, so bipartiteness is structural.  Weights and
potentials are :class:`fractions.Fraction` values throughout.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

Edge = tuple[int, int]
Matching = frozenset  # frozenset[Edge]


class InstanceError(ValueError):
    """Malformed instance, vertex id or edge reference."""


class ContractError(ValueError):
    """A precondition of an operation does not hold."""


class Side(enum.Enum):
    LEFT = "l"
    RIGHT = "r"


class Vertex(NamedTuple):
    side: Side
    index: int

    def __repr__(self) -> str:
        return f"{self.side.value}{self.index}"


def left(i: int) -> Vertex:
    return Vertex(Side.LEFT, i)


def right(i: int) -> Vertex:
    return Vertex(Side.RIGHT, i)


def as_fraction(x) -> Fraction:
    """Exact conversion; strings may be ``"num/den"`` or decimals."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are converted through their shortest repr, not their binary value
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class BipartiteInstance:
    """Edge-weighted bipartite graph over ``n_left`` + ``n_right`` vertices.

    ``edges`` keeps the caller's order (it fixes LP column order and output
    order); ``weights`` is aligned with it.
    """

    n_left: int
    n_right: int
    edges: tuple[Edge, ...]
    weights: tuple[Fraction, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_left < 0 or self.n_right < 0:
            raise InstanceError("party sizes must be nonnegative")
        edges = tuple((int(l), int(r)) for l, r in self.edges)
        weights = tuple(as_fraction(w) for w in self.weights)
        if len(edges) != len(weights):
            raise InstanceError(f"{len(edges)} edges but {len(weights)} weights")
        index = {}
        for k, (l, r) in enumerate(edges):
            if not (0 <= l < self.n_left and 0 <= r < self.n_right):
                raise InstanceError(f"edge ({l}, {r}) out of range")
            if (l, r) in index:
                raise InstanceError(f"duplicate edge ({l}, {r})")
            index[(l, r)] = k
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_weighted_edges(cls, n_left: int, n_right: int,
                            weighted: Iterable[tuple[int, int, object]]) -> BipartiteInstance:
        triples = list(weighted)
        return cls(n_left, n_right, tuple((l, r) for l, r, _ in triples),
                   tuple(w for _, _, w in triples))

    @classmethod
    def complete(cls, weight_matrix: Sequence[Sequence[object]]) -> BipartiteInstance:
        n_left = len(weight_matrix)
        n_right = len(weight_matrix[0]) if n_left else 0
        return cls.from_weighted_edges(
            n_left, n_right,
            ((l, r, weight_matrix[l][r]) for l in range(n_left) for r in range(n_right)))

    @property
    def vertices(self) -> list[Vertex]:
        return [left(i) for i in range(self.n_left)] + [right(j) for j in range(self.n_right)]

    def has_edge(self, e: Edge) -> bool:
        return tuple(e) in self._index

    def edge_index(self, e: Edge) -> int:
        try:
            return self._index[tuple(e)]
        except KeyError:
            raise InstanceError(f"edge {tuple(e)} not in instance") from None

    def weight(self, e: Edge) -> Fraction:
        return self.weights[self.edge_index(e)]

    def weight_of(self, edges: Iterable[Edge]) -> Fraction:
        return sum((self.weight(e) for e in edges), Fraction(0))

    @cached_property
    def adj_left(self) -> tuple[tuple[int, ...], ...]:
        """Right neighbours of every left vertex, ascending."""
        adj = [[] for _ in range(self.n_left)]
        for l, r in self.edges:
            adj[l].append(r)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def adj_right(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n_right)]
        for l, r in self.edges:
            adj[r].append(l)
        return tuple(tuple(sorted(a)) for a in adj)

    def incident(self, v: Vertex) -> list[Edge]:
        self.check_vertex(v)
        if v.side is Side.LEFT:
            return [(v.index, r) for r in self.adj_left[v.index]]
        return [(l, v.index) for l in self.adj_right[v.index]]

    def check_vertex(self, v: Vertex) -> None:
        size = self.n_left if v.side is Side.LEFT else self.n_right
        if not (isinstance(v, Vertex) and 0 <= v.index < size):
            raise InstanceError(f"vertex {v!r} out of range")


@dataclass(frozen=True)
class Potential:
    """Vertex potential stored densely as one tuple per side."""

    left: tuple[Fraction, ...]
    right: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(as_fraction(x) for x in self.left))
        object.__setattr__(self, "right", tuple(as_fraction(x) for x in self.right))

    @classmethod
    def zeros(cls, inst: BipartiteInstance) -> Potential:
        return cls((0,) * inst.n_left, (0,) * inst.n_right)

    def __getitem__(self, v: Vertex) -> Fraction:
        return self.left[v.index] if v.side is Side.LEFT else self.right[v.index]

    def total(self) -> Fraction:
        """pi(V), the dual objective."""
        return sum(self.left, Fraction(0)) + sum(self.right, Fraction(0))

    def items(self):
        for i, x in enumerate(self.left):
            yield left(i), x
        for j, x in enumerate(self.right):
            yield right(j), x

    def updated(self, changes: dict[Vertex, Fraction]) -> Potential:
        lv, rv = list(self.left), list(self.right)
        for v, x in changes.items():
            (lv if v.side is Side.LEFT else rv)[v.index] = as_fraction(x)
        return Potential(tuple(lv), tuple(rv))

    def matches(self, inst: BipartiteInstance) -> bool:
        return len(self.left) == inst.n_left and len(self.right) == inst.n_right


def _check_potential(inst: BipartiteInstance, pi: Potential) -> None:
    if not pi.matches(inst):
        raise InstanceError("potential is not defined on exactly the instance's vertices")


def endpoints(e: Edge) -> tuple[Vertex, Vertex]:
    return left(e[0]), right(e[1])


def covered(matching: Iterable[Edge]) -> set[Vertex]:
    return {v for e in matching for v in endpoints(e)}


def is_matching(inst: BipartiteInstance, matching: Iterable[Edge]) -> bool:
    seen_l, seen_r = set(), set()
    for l, r in matching:
        if not (0 <= l < inst.n_left and 0 <= r < inst.n_right):
            raise InstanceError(f"edge ({l}, {r}) out of range")
        if not inst.has_edge((l, r)) or l in seen_l or r in seen_r:
            return False
        seen_l.add(l)
        seen_r.add(r)
    return True


def slack(inst: BipartiteInstance, pi: Potential, e: Edge) -> Fraction:
    """pi(l) + pi(r) - w(e)."""
    w = inst.weight(e)
    return pi.left[e[0]] + pi.right[e[1]] - w


def tight_subgraph(inst: BipartiteInstance, pi: Potential) -> frozenset[Edge]:
    _check_potential(inst, pi)
    return frozenset(e for e, w in zip(inst.edges, inst.weights)
                     if pi.left[e[0]] + pi.right[e[1]] == w)


def _neighbour_edges(inst, pi, v):
    for e in inst.incident(v):
        if pi is None or slack(inst, pi, e) == 0:
            yield e


def gamma(inst: BipartiteInstance, pi: Potential | None, X: Iterable[Vertex]) -> frozenset[Vertex]:
    """Vertices outside X joined to X by a (tight, if ``pi`` is given) edge."""
    X = frozenset(X)
    if pi is not None:
        _check_potential(inst, pi)
    out = set()
    for v in X:
        for e in _neighbour_edges(inst, pi, v):
            for u in endpoints(e):
                if u != v and u not in X:
                    out.add(u)
    return frozenset(out)


def delta(inst: BipartiteInstance, pi: Potential | None, X: Iterable[Vertex]) -> frozenset[Edge]:
    """Edges realising :func:`gamma`: between X and its neighbourhood outside X."""
    X = frozenset(X)
    if pi is not None:
        _check_potential(inst, pi)
    out = set()
    for v in X:
        for e in _neighbour_edges(inst, pi, v):
            if any(u not in X for u in endpoints(e)):
                out.add(e)
    return frozenset(out)


def augment(matching: Iterable[Edge], path: Sequence[Edge]) -> frozenset[Edge]:
    """Return ``M xor p`` for an M-augmenting edge path ``p``.

    ``p`` is given in walk order; the orientation of each pair is always
    ``(left, right)``.
    """
    M = frozenset(tuple(e) for e in matching)
    p = [tuple(e) for e in path]
    if not p or len(p) % 2 == 0:
        raise ContractError("augmenting path must have an odd number of edges")
    if len(set(p)) != len(p):
        raise ContractError("path repeats an edge")
    for k, e in enumerate(p):
        if (e in M) != (k % 2 == 1):
            raise ContractError(f"path does not alternate at edge {k} {e}")
    for a, b in zip(p, p[1:]):
        if a[0] != b[0] and a[1] != b[1]:
            raise ContractError(f"edges {a} and {b} are not consecutive")
    # odd-length bipartite path: exactly one end is left, the other right
    first, last = p[0], p[-1]
    if len(p) == 1:
        ends = [left(first[0]), right(first[1])]
    else:
        ends = [_free_end(first, p[1]), _free_end(last, p[-2])]
    if len({v for v in ends}) != 2 or covered(M) & set(ends):
        raise ContractError(f"path endpoints {ends} are not both unmatched")
    visited = [v for e in p for v in endpoints(e)]
    if len(set(visited)) != len(p) + 1:
        raise ContractError("path is not simple")
    result = M.symmetric_difference(p)
    assert len(result) == len(M) + 1
    return frozenset(result)


def _free_end(end_edge: Edge, neighbour: Edge) -> Vertex:
    if end_edge[0] == neighbour[0]:
        return right(end_edge[1])
    return left(end_edge[0])


# -- unweighted matching search ---------------------------------------------

def _augment_from(root, adj, mate_a, mate_b, allowed_b=None):
    """BFS for an augmenting path from free ``root`` on side A.

    Returns ``(True, None)`` after augmenting, or ``(False, reached_a)`` with
    the A-side vertices reached by alternating paths.
    """
    parent_b = {}
    reached_a = [root]
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if b in parent_b or (allowed_b is not None and b not in allowed_b):
                continue
            parent_b[b] = a
            nxt = mate_b[b]
            if nxt is None:
                while b is not None:
                    a = parent_b[b]
                    prev = mate_a[a]
                    mate_a[a], mate_b[b] = b, a
                    b = prev
                return True, None
            reached_a.append(nxt)
            queue.append(nxt)
    return False, reached_a


def max_cardinality_matching(edges: Iterable[Edge], n_left: int, n_right: int) -> frozenset[Edge]:
    """Maximum-cardinality matching by repeated BFS augmentation."""
    adj = [[] for _ in range(n_left)]
    for l, r in sorted(set(tuple(e) for e in edges)):
        if not (0 <= l < n_left and 0 <= r < n_right):
            raise InstanceError(f"edge ({l}, {r}) out of range")
        adj[l].append(r)
    mate_l = [None] * n_left
    mate_r = [None] * n_right
    for l in range(n_left):
        if adj[l]:
            _augment_from(l, adj, mate_l, mate_r)
    return frozenset((l, r) for l, r in enumerate(mate_l) if r is not None)


class Cover(NamedTuple):
    """Outcome of :func:`covering_matching_or_violator`: exactly one field is set."""
    matching: frozenset | None
    violator: frozenset | None


def _one_sided_cover(required, adj):
    mate_a = {a: None for a in adj}
    mate_b = {}
    for nbrs in adj.values():
        for b in nbrs:
            mate_b[b] = None
    for a in required:
        ok, reached = _augment_from(a, adj, mate_a, mate_b)
        if not ok:
            return None, frozenset(reached)
    return {a: b for a, b in mate_a.items() if b is not None}, None


def covering_matching_or_violator(inst: BipartiteInstance, pi: Potential,
                                  required: Iterable[Vertex]) -> Cover:
    """Tight matching covering ``required``, or a one-sided Hall violator.

    Left-side requirements are tried first.  A violator consists of required
    vertices only and satisfies ``|X| == |gamma(inst, pi, X)| + 1``.
    """
    _check_potential(inst, pi)
    required = set(required)
    for v in required:
        inst.check_vertex(v)
    tight = tight_subgraph(inst, pi)
    req_l = sorted(v.index for v in required if v.side is Side.LEFT)
    req_r = sorted(v.index for v in required if v.side is Side.RIGHT)

    # only required vertices of the covering side take part, so every
    # matched vertex on that side (and hence every violator) is required
    adj_l = {l: [r for r in inst.adj_left[l] if (l, r) in tight] for l in req_l}
    m1, bad = _one_sided_cover(req_l, adj_l)
    if bad is not None:
        return Cover(None, frozenset(left(i) for i in bad))
    adj_r = {r: [l for l in inst.adj_right[r] if (l, r) in tight] for r in req_r}
    m2, bad = _one_sided_cover(req_r, adj_r)
    if bad is not None:
        return Cover(None, frozenset(right(j) for j in bad))

    M1 = {(l, r) for l, r in m1.items()}
    M2 = {(l, r) for r, l in m2.items()}
    return Cover(frozenset(_merge_covers(M1, M2, set(req_l), set(req_r))), None)


def _merge_covers(M1, M2, req_l, req_r):
    """Mendelsohn-Dulmage exchange: a matching inside M1 | M2 covering the
    left vertices M1 covers in ``req_l`` and the right ones M2 covers in ``req_r``."""
    nbrs: dict[Vertex, list[tuple[Vertex, Edge]]] = {}
    for e in M1 | M2:
        u, v = endpoints(e)
        nbrs.setdefault(u, []).append((v, e))
        nbrs.setdefault(v, []).append((u, e))
    result = set(M1 & M2)
    seen = set(covered(M1 & M2))
    for start in sorted(nbrs, key=lambda v: (v.side.value, v.index)):
        if start in seen:
            continue
        component, comp_edges, stack = [], set(), [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            component.append(v)
            for u, e in nbrs[v]:
                comp_edges.add(e)
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        in1 = comp_edges & M1
        in2 = comp_edges & M2
        use = in1
        for v in component:
            deg1 = sum(1 for _, e in nbrs[v] if e in M1)
            deg2 = sum(1 for _, e in nbrs[v] if e in M2)
            if v.side is Side.RIGHT and v.index in req_r and deg1 == 0:
                use = in2
            elif v.side is Side.LEFT and v.index in req_l and deg2 == 0:
                use = in1
                break
        result |= use
    return result
