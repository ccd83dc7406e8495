import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import instances
from matchpd.graph import BipartiteInstance, InstanceError, Potential
from matchpd.hungarian import is_mp_feasible
from matchpd.lp import (DenseMatrix, DimensionError, LpForm, Which, check_feasible, cs_check,
                        duality_gap, incidence_matrix, matching_to_primal, max_packing_lp,
                        min_perfect_lp, potential_to_dual)
from matchpd.naive import is_feasible


def test_incidence_matrix(g1):
    single = BipartiteInstance.from_weighted_edges(1, 1, [(0, 0, 1)])
    A = incidence_matrix(single)
    assert (A.rows, A.cols, A.entries) == (2, 1, (1, 1))
    A = incidence_matrix(g1)
    assert (A.rows, A.cols) == (4, 4)
    assert all(sum(A[i, j] for i in range(4)) == 2 for j in range(4))
    empty = BipartiteInstance.from_weighted_edges(2, 3, [])
    A = incidence_matrix(empty)
    assert (A.rows, A.cols) == (5, 0)


def test_dense_matrix_dimensions():
    with pytest.raises(DimensionError):
        DenseMatrix(2, 2, (1, 2, 3))
    with pytest.raises(DimensionError):
        DenseMatrix(1, 2, (1, 2)).matvec([1])


def test_matching_to_primal(g1):
    assert matching_to_primal(g1, []) == (0, 0, 0, 0)
    assert matching_to_primal(g1, [(0, 0), (1, 1)]) == (1, 0, 0, 1)
    assert matching_to_primal(g1, [(0, 1)]) == (0, 1, 0, 0)
    with pytest.raises(InstanceError):
        matching_to_primal(g1, [(0, 0), (0, 1)])


def test_potential_to_dual(g1):
    assert potential_to_dual(g1, Potential.zeros(g1)) == (0, 0, 0, 0)
    assert potential_to_dual(g1, Potential((2, 4), (0, 0))) == (2, 4, 0, 0)
    assert potential_to_dual(g1, Potential((1, 3), (0, 1))) == (1, 3, 0, 1)


def test_check_feasible_examples(g1):
    lp = max_packing_lp(g1)
    assert check_feasible(lp, Which.PRIMAL, [0] * 4)
    assert check_feasible(lp, Which.DUAL, [2, 4, 0, 0])
    assert check_feasible(min_perfect_lp(g1), Which.DUAL, [1, 2, 0, 0])
    with pytest.raises(DimensionError):
        check_feasible(lp, Which.DUAL, [1, 2])


def test_duality_gap_examples(g1):
    lp = max_packing_lp(g1)
    assert duality_gap(lp, [0] * 4, [2, 4, 0, 0]) == 6
    assert duality_gap(lp, matching_to_primal(g1, [(0, 0), (1, 1)]), [1, 3, 0, 1]) == 0
    mp = min_perfect_lp(g1)
    assert duality_gap(mp, matching_to_primal(g1, [(0, 1), (1, 0)]), [1, 2, 0, 0]) == 1
    with pytest.raises(ValueError):
        duality_gap(lp, [1, 1, 0, 0], [2, 4, 0, 0])


def test_cs_examples(g1):
    lp = max_packing_lp(g1)
    zero_lp = max_packing_lp(g1, objective=[0] * 4)
    assert cs_check(zero_lp, [0] * 4, [0] * 4, 0)
    assert cs_check(lp, matching_to_primal(g1, [(0, 0), (1, 1)]), [1, 3, 0, 1], 0)
    assert not cs_check(lp, matching_to_primal(g1, [(0, 1)]), [2, 4, 0, 0], 0)
    with pytest.raises(ValueError):
        cs_check(lp, [0] * 4, [2, 4, 0, 0], 1)
    with pytest.raises(ValueError):
        cs_check(min_perfect_lp(g1), matching_to_primal(g1, [(0, 1), (1, 0)]), [1, 2, 0, 0],
                 Fraction(1, 2))


def test_min_perfect_cs(g1):
    mp = min_perfect_lp(g1)
    x = matching_to_primal(g1, [(0, 1), (1, 0)])
    assert cs_check(mp, x, [1, 2, 0, 1])
    assert duality_gap(mp, x, [1, 2, 0, 1]) == 0


def test_delta_scaled_cs():
    # exact optimum pair on a unit edge satisfies plain CS but not the scaled rows
    inst = BipartiteInstance.from_weighted_edges(1, 1, [(0, 0, 1)])
    lp = max_packing_lp(inst)
    assert cs_check(lp, [1], [1, 0], 0)
    assert not cs_check(lp, [1], [1, 0], Fraction(1, 2))


@settings(max_examples=200, deadline=None)
@given(instances(max_side=4), st.randoms(use_true_random=False))
def test_primal_feasible_iff_matching(inst, rnd):
    from matchpd.graph import is_matching
    lp = max_packing_lp(inst)
    sub = [e for e in inst.edges if rnd.random() < 0.5]
    x = tuple(Fraction(1 if e in sub else 0) for e in inst.edges)
    assert check_feasible(lp, Which.PRIMAL, x) == is_matching(inst, sub)


@settings(max_examples=200, deadline=None)
@given(instances(max_side=4, low=-3, high=5), st.randoms(use_true_random=False))
def test_dual_feasible_iff_potential_feasible(inst, rnd):
    pi = Potential(tuple(rnd.randint(-2, 5) for _ in range(inst.n_left)),
                   tuple(rnd.randint(-2, 5) for _ in range(inst.n_right)))
    y = potential_to_dual(inst, pi)
    if all(w >= 0 for w in inst.weights):
        assert check_feasible(max_packing_lp(inst), Which.DUAL, y) == is_feasible(inst, pi)
    assert check_feasible(min_perfect_lp(inst), Which.DUAL, y) == is_mp_feasible(inst, pi)
