import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BIG, instances, random_complete
from matchpd import _backend
from matchpd.certificates import check_min_perfect_certificate, check_unbounded_ray
from matchpd.graph import BipartiteInstance, ContractError, Potential
from matchpd.hungarian import (InfeasibleError, Problem, SearchFlag, hungarian_solve,
                               initial_mp_feasible, is_mp_feasible, path_search,
                               reduce_to_min_perfect, search_contract_violations, solve)
from matchpd.oracle import brute_optimum
from matchpd.slack_queue import EmptyQueue, SlackQueue

TWO_BY_ONE = BipartiteInstance.from_weighted_edges(2, 1, [(0, 0, 0), (1, 0, 0)])
PATH = BipartiteInstance.from_weighted_edges(2, 2, [(0, 0, 1)])


def test_initial_mp_feasible(g1):
    assert initial_mp_feasible(g1) == Potential((1, 2), (0, 0))
    empty = BipartiteInstance.from_weighted_edges(2, 2, [])
    assert initial_mp_feasible(empty) == Potential.zeros(empty)
    neg = BipartiteInstance.from_weighted_edges(1, 1, [(0, 0, -3)])
    assert initial_mp_feasible(neg) == Potential((-3,), (0,))


def test_path_search_first_step(g1):
    pi = Potential((1, 2), (0, 0))
    res = path_search(g1, [], pi)
    assert res.flag is SearchFlag.NEXT_ITERATION
    assert res.potential == pi
    assert len(res.path) == 1 and res.path[0] in {(0, 0), (1, 0)}
    assert res.path == ((0, 0),)


def test_path_search_unbounded():
    pi = Potential((0, 0), (0,))
    res = path_search(TWO_BY_ONE, [(0, 0)], pi)
    assert res.flag is SearchFlag.DUAL_UNBOUNDED
    assert res.ray == Potential((1, 1), (-1,))
    assert check_unbounded_ray(TWO_BY_ONE, res.potential, res.ray)
    for t in (0, 1, 10, 1000):
        moved = Potential(tuple(a + t * d for a, d in zip(res.potential.left, res.ray.left)),
                          tuple(a + t * d for a, d in zip(res.potential.right, res.ray.right)))
        assert is_mp_feasible(TWO_BY_ONE, moved)
    assert res.ray.total() >= 1


def test_path_search_l_matched(g1):
    sol = hungarian_solve(g1)
    res = path_search(g1, sol.matching, sol.potential)
    assert res.flag is SearchFlag.L_MATCHED
    assert res.potential == sol.potential
    pi = Potential((1, 2), (0, 0))
    with pytest.raises(ContractError):
        path_search(g1, [(1, 1)], pi)  # (1, 1) not tight under pi
    with pytest.raises(ContractError):
        path_search(g1, [], Potential((5, 5), (0, 0)))


def test_hungarian_examples(g1):
    sol = hungarian_solve(g1)
    assert sol.matching == {(0, 1), (1, 0)} and sol.weight == 4
    assert sol.augmentations == 2
    assert check_min_perfect_certificate(g1, sol.matching, sol.potential)
    with pytest.raises(InfeasibleError) as exc:
        hungarian_solve(TWO_BY_ONE)
    assert exc.value.ray is None
    with pytest.raises(InfeasibleError) as exc:
        hungarian_solve(PATH)
    assert check_unbounded_ray(PATH, exc.value.potential, exc.value.ray)
    with pytest.raises(InfeasibleError):
        brute_optimum(Problem.MIN_WEIGHT_PERFECT, PATH)


def test_supplied_start_potential(g1):
    sol = hungarian_solve(g1, Potential((0, 0), (-5, 1)))
    assert sol.weight == 4
    with pytest.raises(ContractError):
        hungarian_solve(g1, Potential((9, 9), (0, 0)))


def test_rational_and_huge_weights():
    inst = BipartiteInstance.complete([["1/3", "-2/7"], ["5/11", "1/13"]])
    assert hungarian_solve(inst).weight == brute_optimum(Problem.MIN_WEIGHT_PERFECT, inst)[0]
    big = 10 ** 30
    inst = BipartiteInstance.complete([[big, 1], [3, big + 7]])
    assert hungarian_solve(inst, check=True).weight == 4


def test_reduction_examples(g1):
    red = reduce_to_min_perfect(Problem.MAX_WEIGHT_MATCHING, g1)
    assert red.instance.weights == (3, 2, 2, 0)
    w, _ = brute_optimum(Problem.MIN_WEIGHT_PERFECT, red.instance)
    m, _, _ = solve(Problem.MAX_WEIGHT_MATCHING, g1)
    assert g1.weight_of(m) == 5 and w == 8 - 5
    star = BipartiteInstance.from_weighted_edges(1, 3, [(0, 0, 1), (0, 1, 1), (0, 2, 1)])
    red = reduce_to_min_perfect(Problem.MAX_CARDINALITY, star)
    assert (red.instance.n_left, red.instance.n_right) == (3, 3)
    m, _, _ = solve(Problem.MAX_CARDINALITY, star)
    assert len(m) == 1
    sq = BipartiteInstance.complete([[1, 2], [3, 4]])
    red = reduce_to_min_perfect(Problem.MIN_WEIGHT_PERFECT, sq)
    assert red.instance is sq and red.extract(frozenset({(0, 0)})) == {(0, 0)}


def test_reduction_rejects_negative_maxw():
    inst = BipartiteInstance.from_weighted_edges(1, 1, [(0, 0, -1)])
    with pytest.raises(ContractError):
        reduce_to_min_perfect(Problem.MAX_WEIGHT_MATCHING, inst)


def test_penalty_large_enough():
    # the only perfect matching weighs -20; a penalty of n*(W+1)+1 = 23 would let
    # l0r1 (+10) plus the missing l1r0 look cheaper in the reduced instance
    inst = BipartiteInstance.from_weighted_edges(2, 2, [(0, 0, -10), (0, 1, 10), (1, 1, -10)])
    m, red, _ = solve(Problem.MAX_WEIGHT_PERFECT, inst)
    assert m == {(0, 0), (1, 1)} and inst.weight_of(m) == -20
    assert red.instance.weight((1, 0)) > 23


def test_slack_queue_examples():
    q = SlackQueue()
    with pytest.raises(EmptyQueue):
        q.extract_min()
    q.insert_even(0, [(0, 3), (1, 1)])
    assert (q.key_of(0), q.key_of(1)) == (3, 1)
    assert q.extract_min() == (1, 1)
    q.apply_uniform_shift(1)
    assert q.key_of(0) == 2
    q.insert_even(2, [(0, 2)])
    assert q.witness(0) == 0  # tie keeps the lower even vertex
    q.insert_even(1, [(0, 1)])
    assert q.witness(0) == 1 and q.key_of(0) == 1
    assert q.extract_min() == (0, 1)
    q.insert_even(3, [(0, 0), (1, 0)])  # settled vertices are ignored
    assert len(q) == 0


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_hungarian_matches_oracle(n, rnd):
    inst = random_complete(rnd, n)
    sol = hungarian_solve(inst, check=True)
    assert sol.augmentations == n
    assert check_min_perfect_certificate(inst, sol.matching, sol.potential)
    assert sol.weight == brute_optimum(Problem.MIN_WEIGHT_PERFECT, inst, BIG)[0]


@settings(max_examples=300, deadline=None)
@given(instances(max_side=6, low=-10, high=10, min_side=1))
def test_search_contract_and_infeasibility(inst):
    try:
        expected = brute_optimum(Problem.MIN_WEIGHT_PERFECT, inst, BIG)[0]
    except InfeasibleError:
        expected = None
    try:
        sol = hungarian_solve(inst, check=True)
    except InfeasibleError as exc:
        assert expected is None
        if exc.ray is not None:
            assert check_unbounded_ray(inst, exc.potential, exc.ray)
        return
    assert sol.weight == expected


def test_contract_checker_flags_bad_results(g1):
    from matchpd.hungarian import PathSearchResult
    pi = Potential((1, 2), (0, 0))
    bad = PathSearchResult(SearchFlag.NEXT_ITERATION, pi, path=((0, 1),))
    assert search_contract_violations(g1, [], pi, bad)
    bad = PathSearchResult(SearchFlag.L_MATCHED, pi)
    assert search_contract_violations(g1, [], pi, bad)
    bad = PathSearchResult(SearchFlag.DUAL_UNBOUNDED, pi, ray=Potential((1, 1), (0, 0)))
    assert search_contract_violations(g1, [], pi, bad)


@pytest.mark.skipif(_backend.BACKEND != "compiled", reason="compiled kernels not built")
@pytest.mark.parametrize("seed", range(40))
def test_kernel_parity(seed, monkeypatch):
    rng = random.Random(seed)
    n = rng.randint(1, 25)
    inst = BipartiteInstance.from_weighted_edges(
        n, n, [(l, r, Fraction(rng.randint(-50, 50), rng.choice([1, 2, 3])))
               for l in range(n) for r in range(n) if rng.random() < 0.6])
    outcomes = []
    for backend in ("compiled", "python"):
        monkeypatch.setattr(_backend, "BACKEND", backend)
        try:
            s = hungarian_solve(inst)
            outcomes.append((s.matching, s.potential, s.augmentations))
        except InfeasibleError as exc:
            outcomes.append((exc.ray, exc.potential))
    assert outcomes[0] == outcomes[1]
