"""Optimality certificate checkers.

These re-derive every condition from the raw edge weights and never call a
solver, so a passing report is evidence independent of the code that
produced the matching and the potential.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .graph import BipartiteInstance, Potential, left, right


class Failure(enum.Enum):
    NOT_MATCHING = "NotMatching"
    DUAL_INFEASIBLE = "DualInfeasible"
    UNTIGHT_MATCHED_EDGE = "UntightMatchedEdge"
    UNMATCHED_NONZERO_VERTEX = "UnmatchedNonzeroVertex"
    NOT_PERFECT = "NotPerfect"


@dataclass(frozen=True)
class CertificateReport:
    verdict: bool
    failed_condition: Failure | None = None
    witness: object = None

    def __bool__(self):
        return self.verdict

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if not self.verdict:
            out["failed_condition"] = self.failed_condition.value
            out["witness"] = _witness_json(self.witness)
        return out


def _witness_json(w):
    if isinstance(w, tuple) and len(w) == 2 and all(isinstance(x, int) for x in w):
        return {"edge": [w[0], w[1]]}
    return {"vertex": repr(w)}


_OK = CertificateReport(True)


def _weights(inst):
    return dict(zip(inst.edges, inst.weights))


def _matching_failure(inst, matching):
    """First offending edge or vertex of a non-matching, else None."""
    w = _weights(inst)
    seen = set()
    for e in sorted(tuple(e) for e in matching):
        if e not in w:
            return e
        for v in (left(e[0]), right(e[1])):
            if v in seen:
                return v
            seen.add(v)
    return None


def _potential_values(inst, pi):
    vals = {left(i): Fraction(x) for i, x in enumerate(pi.left)}
    vals.update({right(j): Fraction(x) for j, x in enumerate(pi.right)})
    if len(pi.left) != inst.n_left or len(pi.right) != inst.n_right:
        raise ValueError("potential is not defined on exactly the instance's vertices")
    return vals


def check_max_weight_certificate(inst: BipartiteInstance, matching,
                                 pi: Potential) -> CertificateReport:
    """Sufficient conditions for ``matching`` to have maximum weight.

    In order: matching, feasible potential (nonnegative, covers every edge),
    matched edges tight, every vertex of nonzero potential matched.
    """
    M = sorted(tuple(e) for e in matching)
    bad = _matching_failure(inst, M)
    if bad is not None:
        return CertificateReport(False, Failure.NOT_MATCHING, bad)
    p = _potential_values(inst, pi)
    w = _weights(inst)
    for v in sorted(p, key=lambda v: (v.side.value, v.index)):
        if p[v] < 0:
            return CertificateReport(False, Failure.DUAL_INFEASIBLE, v)
    for (l, r), we in zip(inst.edges, inst.weights):
        if p[left(l)] + p[right(r)] < we:
            return CertificateReport(False, Failure.DUAL_INFEASIBLE, (l, r))
    for l, r in M:
        if p[left(l)] + p[right(r)] != w[(l, r)]:
            return CertificateReport(False, Failure.UNTIGHT_MATCHED_EDGE, (l, r))
    matched = {left(l) for l, _ in M} | {right(r) for _, r in M}
    for v in sorted(p, key=lambda v: (v.side.value, v.index)):
        if p[v] != 0 and v not in matched:
            return CertificateReport(False, Failure.UNMATCHED_NONZERO_VERTEX, v)
    return _OK


def check_min_perfect_certificate(inst: BipartiteInstance, matching,
                                  pi: Potential) -> CertificateReport:
    """Sufficient conditions for a min-weight perfect matching.

    In order: matching, perfect, mp-feasible potential (pi(u) + pi(v) <= w on
    every edge, any sign), matched edges tight.
    """
    M = sorted(tuple(e) for e in matching)
    bad = _matching_failure(inst, M)
    if bad is not None:
        return CertificateReport(False, Failure.NOT_MATCHING, bad)
    matched = {left(l) for l, _ in M} | {right(r) for _, r in M}
    for v in [left(i) for i in range(inst.n_left)] + [right(j) for j in range(inst.n_right)]:
        if v not in matched:
            return CertificateReport(False, Failure.NOT_PERFECT, v)
    p = _potential_values(inst, pi)
    w = _weights(inst)
    for (l, r), we in zip(inst.edges, inst.weights):
        if p[left(l)] + p[right(r)] > we:
            return CertificateReport(False, Failure.DUAL_INFEASIBLE, (l, r))
    for l, r in M:
        if p[left(l)] + p[right(r)] != w[(l, r)]:
            return CertificateReport(False, Failure.UNTIGHT_MATCHED_EDGE, (l, r))
    assert sum((w[e] for e in M), Fraction(0)) == sum(p.values(), Fraction(0))
    return _OK


def check_unbounded_ray(inst: BipartiteInstance, pi: Potential, d: Potential) -> bool:
    """True iff pi + t*d is mp-feasible for all t >= 0 and 1.d > 0."""
    p = _potential_values(inst, pi)
    dv = _potential_values(inst, d)
    for (l, r), we in zip(inst.edges, inst.weights):
        if p[left(l)] + p[right(r)] > we:
            return False
        if dv[left(l)] + dv[right(r)] > 0:
            return False
    return sum(dv.values(), Fraction(0)) > 0
