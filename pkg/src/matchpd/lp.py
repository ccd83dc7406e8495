"""Dense matrix encodings of the matching LPs and duality checks.

This layer never looks at graphs beyond building the incidence matrix; it is
an independent check on solver output.  Two LP pairs are supported:

* ``MAX_PACKING``: max c.x s.t. Ax <= b, x >= 0; dual min b.y s.t. A^T y >= c, y >= 0.
* ``MIN_PERFECT``: min w.x s.t. Ax = 1, x >= 0; dual max 1.y s.t. A^T y <= w.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graph import BipartiteInstance, InstanceError, Potential, is_matching

Vector = tuple  # tuple[Fraction, ...]


class LpForm(enum.Enum):
    MAX_PACKING = "max-packing"
    MIN_PERFECT = "min-perfect"


class Which(enum.Enum):
    PRIMAL = "primal"
    DUAL = "dual"


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class DenseMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError("entries do not fill rows x cols")

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def matvec(self, x: Sequence) -> Vector:
        if len(x) != self.cols:
            raise DimensionError(f"vector of length {len(x)} for {self.cols} columns")
        return tuple(sum((a * b for a, b in zip(self.row(i), x)), Fraction(0))
                     for i in range(self.rows))

    def rmatvec(self, y: Sequence) -> Vector:
        """A^T y."""
        if len(y) != self.rows:
            raise DimensionError(f"vector of length {len(y)} for {self.rows} rows")
        out = [Fraction(0)] * self.cols
        for i, yi in enumerate(y):
            if yi:
                for j, a in enumerate(self.row(i)):
                    if a:
                        out[j] += a * yi
        return tuple(out)


@dataclass(frozen=True)
class LpPair:
    form: LpForm
    A: DenseMatrix
    objective: Vector
    rhs: Vector

    def __post_init__(self):
        if self.A.rows != len(self.rhs) or self.A.cols != len(self.objective):
            raise DimensionError("LP dimensions are incoherent")


def _dot(a, b):
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def incidence_matrix(inst: BipartiteInstance) -> DenseMatrix:
    """Vertex-by-edge 0/1 matrix; rows are left vertices then right vertices."""
    n = inst.n_left + inst.n_right
    m = len(inst.edges)
    entries = [0] * (n * m)
    for k, (l, r) in enumerate(inst.edges):
        entries[l * m + k] = 1
        entries[(inst.n_left + r) * m + k] = 1
    return DenseMatrix(n, m, tuple(entries))


def max_packing_lp(inst: BipartiteInstance, objective: Sequence | None = None) -> LpPair:
    """Matching LP with edge weights (or ``objective``) as costs and unit capacities."""
    A = incidence_matrix(inst)
    c = tuple(inst.weights) if objective is None else tuple(Fraction(x) for x in objective)
    return LpPair(LpForm.MAX_PACKING, A, c, (Fraction(1),) * A.rows)


def min_perfect_lp(inst: BipartiteInstance) -> LpPair:
    A = incidence_matrix(inst)
    return LpPair(LpForm.MIN_PERFECT, A, tuple(inst.weights), (Fraction(1),) * A.rows)


def matching_to_primal(inst: BipartiteInstance, matching) -> Vector:
    M = {tuple(e) for e in matching}
    if not is_matching(inst, M):
        raise InstanceError("not a matching of this instance")
    return tuple(Fraction(1 if e in M else 0) for e in inst.edges)


def potential_to_dual(inst: BipartiteInstance, pi: Potential) -> Vector:
    if not pi.matches(inst):
        raise InstanceError("potential does not match the instance")
    return tuple(pi.left) + tuple(pi.right)


def check_feasible(lp: LpPair, which: Which, v: Sequence) -> bool:
    v = tuple(Fraction(x) for x in v)
    if which is Which.PRIMAL:
        Ax = lp.A.matvec(v)
        if lp.form is LpForm.MAX_PACKING:
            return all(x >= 0 for x in v) and all(a <= b for a, b in zip(Ax, lp.rhs))
        return all(x >= 0 for x in v) and all(a == b for a, b in zip(Ax, lp.rhs))
    ATy = lp.A.rmatvec(v)
    if lp.form is LpForm.MAX_PACKING:
        return all(y >= 0 for y in v) and all(a >= c for a, c in zip(ATy, lp.objective))
    return all(a <= w for a, w in zip(ATy, lp.objective))


def duality_gap(lp: LpPair, x: Sequence, y: Sequence) -> Fraction:
    """Nonnegative distance between the dual and primal objectives."""
    if not check_feasible(lp, Which.PRIMAL, x):
        raise ValueError("primal vector is infeasible")
    if not check_feasible(lp, Which.DUAL, y):
        raise ValueError("dual vector is infeasible")
    if lp.form is LpForm.MAX_PACKING:
        gap = _dot(lp.rhs, y) - _dot(lp.objective, x)
    else:
        gap = _dot(lp.objective, x) - _dot(lp.rhs, y)
    assert gap >= 0, "weak duality violated"
    return gap


def cs_check(lp: LpPair, x: Sequence, y: Sequence, delta=0) -> bool:
    """Complementary slackness, scaled by (1 - delta) for the packing LP.

    ``delta`` other than 0 is only meaningful for ``MAX_PACKING``.
    """
    delta = Fraction(delta)
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    if lp.form is LpForm.MIN_PERFECT and delta != 0:
        raise ValueError("scaled complementary slackness is only defined for the packing LP")
    x = tuple(Fraction(v) for v in x)
    y = tuple(Fraction(v) for v in y)
    if not (check_feasible(lp, Which.PRIMAL, x) and check_feasible(lp, Which.DUAL, y)):
        raise ValueError("complementary slackness needs feasible vectors")
    ATy = lp.A.rmatvec(y)
    if lp.form is LpForm.MIN_PERFECT:
        ok = _dot((a - w for a, w in zip(ATy, lp.objective)), x) == 0
        if ok:
            assert _dot(lp.objective, x) == _dot(lp.rhs, y)
        return ok
    scale = 1 - delta
    Ax = lp.A.matvec(x)
    row_ok = _dot((scale * a - b for a, b in zip(Ax, lp.rhs)), y) == 0
    col_ok = scale * _dot((a - c for a, c in zip(ATy, lp.objective)), x) == 0
    ok = row_ok and col_ok
    if ok:
        assert scale * _dot(lp.objective, x) == _dot(lp.rhs, y)
    return ok
