"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""

import json
import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE, BIG, random_complete, random_instance
from matchpd import io
from matchpd.certificates import (check_max_weight_certificate, check_min_perfect_certificate,
                                  check_unbounded_ray)
from matchpd.generators import adwords_small_bids, random_bipartite, upper_triangular
from matchpd.graph import (BipartiteInstance, Potential, Side, augment, covered, gamma, left,
                           right, slack)
from matchpd.hungarian import (InfeasibleError, Problem, SearchFlag, hungarian_solve,
                               initial_mp_feasible, path_search, reduce_to_min_perfect,
                               search_contract_violations)
from matchpd.lp import (Which, check_feasible, cs_check, duality_gap, matching_to_primal,
                        max_packing_lp, min_perfect_lp, potential_to_dual)
from matchpd.naive import init_potential, is_feasible, naive_solve, pd_adjust
from matchpd.online import (DEFAULT_F, OnlineInstance, adwords_run, adwords_upper_bound,
                            dual_fit, expected_dual_feasibility_check, monte_carlo_ratio,
                            permutation_expectation, priority_expectation, ranking_run,
                            vertex_weighted_run)
from matchpd.oracle import brute_optimum

pytestmark = pytest.mark.acceptance


def record(n, ok, detail):
    ACCEPTANCE.append((n, bool(ok), detail))
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_oracle_equivalence():
    rng = random.Random(1)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(2000):
        inst = random_instance(rng, max_side=6)
        best = brute_optimum(Problem.MAX_WEIGHT_MATCHING, inst, BIG)[0]
        res = naive_solve(inst)
        mismatches += inst.weight_of(res.matching) != best
        red = reduce_to_min_perfect(Problem.MAX_WEIGHT_MATCHING, inst)
        m = red.extract(hungarian_solve(red.instance).matching)
        mismatches += inst.weight_of(m) != best
    for _ in range(2000):
        inst = random_complete(rng, rng.randint(1, 6))
        best = brute_optimum(Problem.MIN_WEIGHT_PERFECT, inst, BIG)[0]
        mismatches += hungarian_solve(inst).weight != best
    elapsed = time.perf_counter() - start
    record(1, mismatches == 0 and elapsed < 60,
           f"4000 instances, {mismatches} mismatches, {elapsed:.1f}s")


def _perturbations(pi):
    n = len(pi.left)
    vals = list(pi.left) + list(pi.right)
    for k in range(len(vals)):
        for d in (1, -1):
            moved = vals[:]
            moved[k] += d
            yield Potential(tuple(moved[:n]), tuple(moved[n:]))


def test_criterion_02_certificate_closure():
    rng = random.Random(2)
    start = time.perf_counter()
    failures, caught, total = 0, 0, 0
    for _ in range(500):
        inst = random_instance(rng, max_side=6)
        res = naive_solve(inst)
        failures += not check_max_weight_certificate(inst, res.matching, res.final_potential)
        for p in _perturbations(res.final_potential):
            total += 1
            caught += not check_max_weight_certificate(inst, res.matching, p)
        comp = random_complete(rng, rng.randint(1, 6))
        sol = hungarian_solve(comp)
        failures += not check_min_perfect_certificate(comp, sol.matching, sol.potential)
        for p in _perturbations(sol.potential):
            total += 1
            caught += not check_min_perfect_certificate(comp, sol.matching, p)
    rate = caught / total
    elapsed = time.perf_counter() - start
    record(2, failures == 0 and rate >= 0.99 and elapsed < 30,
           f"{failures} rejected outputs, perturbations caught {rate:.2%} of {total}, {elapsed:.1f}s")


def _feasible_potential(inst, rng):
    base = init_potential(inst)
    return Potential(tuple(x + rng.choice([0, 0, 1, 2]) for x in base.left),
                     tuple(x + rng.choice([0, 0, 0, 1]) for x in base.right))


def test_criterion_03_pda_lemma():
    rng = random.Random(3)
    start = time.perf_counter()
    bad, done, positive = 0, 0, 0
    while done < 10_000:
        inst = random_instance(rng, max_side=5, high=6)
        pi = _feasible_potential(inst, rng)
        side = rng.choice([Side.LEFT, Side.RIGHT])
        size = inst.n_left if side is Side.LEFT else inst.n_right
        if size == 0:
            continue
        X = {(left if side is Side.LEFT else right)(i) for i in range(size) if rng.random() < 0.5}
        if not X:
            continue
        nbrs = gamma(inst, pi, X)
        cap = [pi[v] for v in X]
        for v in X:
            for e in inst.incident(v):
                other = right(e[1]) if side is Side.LEFT else left(e[0])
                if other not in nbrs:
                    cap.append(slack(inst, pi, e))
        eps = min(cap) * Fraction(rng.randint(0, 4), 4)
        new = pd_adjust(inst, pi, X, eps)
        ok = is_feasible(inst, new) and new.total() == pi.total() + (len(nbrs) - len(X)) * eps
        bad += not ok
        positive += eps > 0
        done += 1
    elapsed = time.perf_counter() - start
    record(3, bad == 0 and elapsed < 30,
           f"{done} tuples ({positive} with eps > 0), {bad} violations, {elapsed:.1f}s")


def _random_packing_primal(inst, rng):
    x = [Fraction(rng.randint(0, 3)) for _ in inst.edges]
    load = {}
    for (l, r), v in zip(inst.edges, x):
        load[left(l)] = load.get(left(l), 0) + v
        load[right(r)] = load.get(right(r), 0) + v
    top = max(load.values(), default=0)
    return [v / top if top > 1 else v for v in x]


def test_criterion_04_weak_duality_and_cs():
    rng = random.Random(4)
    start = time.perf_counter()
    negative, cs_true, cs_gap_nonzero = 0, 0, 0
    for k in range(10_000):
        if k % 2 == 0:
            inst = random_instance(rng, max_side=4, high=8)
            lp = max_packing_lp(inst)
            if k % 4 == 0:
                res = naive_solve(inst)
                x = matching_to_primal(inst, res.matching)
                y = list(potential_to_dual(inst, res.final_potential))
                if rng.random() < 0.5 and y:
                    y[rng.randrange(len(y))] += 1
            else:
                x = _random_packing_primal(inst, rng)
                y = potential_to_dual(inst, _feasible_potential(inst, rng))
        else:
            n = rng.randint(1, 4)
            inst = random_complete(rng, n, -8, 8)
            lp = min_perfect_lp(inst)
            sol = hungarian_solve(inst)
            perm = list(range(n))
            if k % 3:
                rng.shuffle(perm)
            x = matching_to_primal(inst, {(l, perm[l]) for l in range(n)})
            y = [v - rng.choice([0, 0, 1]) for v in potential_to_dual(inst, sol.potential)]
        assert check_feasible(lp, Which.PRIMAL, x) and check_feasible(lp, Which.DUAL, y)
        gap = duality_gap(lp, x, y)
        negative += gap < 0
        if cs_check(lp, x, y, 0):
            cs_true += 1
            cs_gap_nonzero += gap != 0
    elapsed = time.perf_counter() - start
    record(4, negative == 0 and cs_gap_nonzero == 0 and cs_true > 0 and elapsed < 30,
           f"10000 pairs, {negative} negative gaps, {cs_true} CS-true with "
           f"{cs_gap_nonzero} nonzero gaps, {elapsed:.1f}s")


def test_criterion_05_path_search_contract():
    rng = random.Random(5)
    start = time.perf_counter()
    violations = 0
    flags = {f: 0 for f in SearchFlag}
    for _ in range(500):
        n = rng.randint(1, 8)
        inst = BipartiteInstance.from_weighted_edges(
            n, n, [(l, r, rng.randint(-10, 10)) for l in range(n) for r in range(n)
                   if rng.random() < rng.choice([0.3, 0.6, 1.0])])
        M, pi = frozenset(), initial_mp_feasible(inst)
        while True:
            res = path_search(inst, M, pi)
            flags[res.flag] += 1
            violations += len(search_contract_violations(inst, M, pi, res))
            if res.flag is SearchFlag.L_MATCHED:
                violations += any(left(u) not in covered(M) for u in range(n))
                break
            if res.flag is SearchFlag.DUAL_UNBOUNDED:
                violations += not check_unbounded_ray(inst, res.potential, res.ray)
                break
            M, pi = augment(M, res.path), res.potential
        try:
            hungarian_solve(inst, check=True)
        except InfeasibleError:
            pass
    elapsed = time.perf_counter() - start
    counts = ", ".join(f"{f.value}={c}" for f, c in flags.items())
    record(5, violations == 0 and elapsed < 60,
           f"500 runs ({counts}), {violations} violations, {elapsed:.1f}s")


def test_criterion_06_hungarian_scaling():
    times = {}
    for n in (128, 256, 512):
        W = np.random.default_rng(n).integers(0, 1000, size=(n, n)).tolist()
        inst = BipartiteInstance.complete(W)
        t = time.perf_counter()
        hungarian_solve(inst)
        times[n] = time.perf_counter() - t
    r1, r2 = times[256] / times[128], times[512] / times[256]
    record(6, r1 <= 10 and r2 <= 10 and times[512] < 30,
           f"times {', '.join(f'n={n}: {t:.2f}s' for n, t in times.items())}; "
           f"doubling ratios {r1:.2f}, {r2:.2f}")


def test_criterion_07_ranking_ratio():
    start = time.perf_counter()
    two = OnlineInstance(2, ((0, 1), (0,)))
    est = monte_carlo_ratio(two, 100_000, 7)
    ok = abs(est.mean_ratio - 0.75) <= 3 * est.std_error
    parts = [f"2x2 {est.mean_ratio:.4f}+-{est.std_error:.4f}"]
    for n in (5, 10, 20):
        est = monte_carlo_ratio(upper_triangular(n), 100_000, 7)
        ok &= est.mean_ratio >= (1 - 1 / math.e) - 3 * est.std_error
        parts.append(f"U_{n} {est.mean_ratio:.4f}+-{est.std_error:.4f}")
    elapsed = time.perf_counter() - start
    record(7, ok and elapsed < 120, f"{'; '.join(parts)}; {elapsed:.1f}s")


def test_criterion_08_dual_fitting():
    rng = random.Random(8)
    start = time.perf_counter()
    exact_bad, float_worst = 0, 0.0
    g = lambda y: (y + 1) / 2
    F = Fraction(2, 3)
    for _ in range(2000):
        n = rng.randint(1, 6)
        inst = OnlineInstance(n, tuple(tuple(v for v in range(n) if rng.random() < 0.5)
                                       for _ in range(rng.randint(0, 7))),
                              tuple(rng.randint(1, 9) for _ in range(n)))
        Yq = [Fraction(rng.randint(0, 1000), 1000) for _ in range(n)]
        for run in (ranking_run(inst, Yq), vertex_weighted_run(inst, Yq, g)):
            exact_bad += dual_fit(run, Yq, g=g, F=F).objective != run.value / F
        Yf = [rng.random() for _ in range(n)]
        run = ranking_run(inst, Yf)
        float_worst = max(float_worst, abs(dual_fit(run, Yf).objective - float(run.value) / DEFAULT_F))
    flagged = {n: len(expected_dual_feasibility_check(upper_triangular(n), trials=100_000,
                                                      seed=8).flagged) for n in (3, 5)}
    elapsed = time.perf_counter() - start
    record(8, exact_bad == 0 and float_worst <= 1e-12 and not any(flagged.values())
           and elapsed < 60,
           f"{exact_bad} exact mismatches, float error {float_worst:.1e}, flagged edges "
           f"U_3={flagged[3]} U_5={flagged[5]}, {elapsed:.1f}s")


def _online_corpus():
    rng = random.Random(9)
    corpus = [OnlineInstance(1, ((0,),)), OnlineInstance(2, ((0, 1), (0,)))]
    corpus += [upper_triangular(n) for n in range(1, 7)]
    for _ in range(20):
        n = rng.randint(1, 6)
        corpus.append(OnlineInstance(n, tuple(
            tuple(v for v in range(n) if rng.random() < 0.5) for _ in range(rng.randint(1, 7)))))
    return corpus


def test_criterion_09_permutation_priority_equivalence():
    start = time.perf_counter()
    worst = 0.0
    corpus = _online_corpus()
    for inst in corpus:
        worst = max(worst, abs(float(permutation_expectation(inst) - priority_expectation(inst))))
    elapsed = time.perf_counter() - start
    record(9, worst <= 1e-9 and elapsed < 60,
           f"{len(corpus)} instances, max difference {worst:.1e}, {elapsed:.1f}s")


def test_criterion_10_adwords():
    start = time.perf_counter()
    ratios = []
    for seed in range(20):
        inst = adwords_small_bids(20, seed)
        assert len(inst.queries) == 2000
        ratios.append(float(adwords_run(inst).value / adwords_upper_bound(inst)))
    elapsed = time.perf_counter() - start
    record(10, min(ratios) >= 0.60 and elapsed < 60,
           f"20 instances, min ratio {min(ratios):.4f}, mean {np.mean(ratios):.4f}, {elapsed:.1f}s")


def _reduction_instance(problem, rng):
    low = 0 if problem is Problem.MAX_WEIGHT_MATCHING else -10
    if problem in (Problem.MIN_WEIGHT_PERFECT, Problem.MAX_WEIGHT_PERFECT) and rng.random() < 0.6:
        n = rng.randint(1, 5)
        return BipartiteInstance.from_weighted_edges(
            n, n, [(l, r, rng.randint(low, 10)) for l in range(n) for r in range(n)
                   if rng.random() < 0.7])
    return random_instance(rng, max_side=5, low=low, high=10)


def test_criterion_11_reductions():
    rng = random.Random(11)
    start = time.perf_counter()
    mismatches, infeasible = 0, 0
    for problem in Problem:
        for _ in range(500):
            inst = _reduction_instance(problem, rng)
            try:
                expected = brute_optimum(problem, inst, BIG)[0]
            except InfeasibleError:
                expected = None
            red = reduce_to_min_perfect(problem, inst)
            try:
                m = red.extract(hungarian_solve(red.instance).matching)
            except InfeasibleError:
                infeasible += 1
                mismatches += expected is not None
                continue
            got = len(m) if problem is Problem.MAX_CARDINALITY else inst.weight_of(m)
            mismatches += got != expected
    elapsed = time.perf_counter() - start
    record(11, mismatches == 0 and elapsed < 120,
           f"5 x 500 instances ({infeasible} infeasible), {mismatches} mismatches, {elapsed:.1f}s")


def _cli(args, threads, cwd):
    env = dict(os.environ, MATCHPD_THREADS=str(threads))
    proc = subprocess.run([sys.executable, "-m", "matchpd", *args], env=env, cwd=cwd,
                          capture_output=True)
    return proc.returncode, proc.stdout


def test_criterion_12_determinism(tmp_path):
    inst = random_bipartite(30, 30, 12, low=0, high=50)
    (tmp_path / "g.txt").write_text(io.format_instance(inst))
    (tmp_path / "u.json").write_text(io.format_online(upper_triangular(10)))
    commands = [
        ["solve", "--problem", "maxw", "--algorithm", "naive", "--input", "g.txt"],
        ["solve", "--problem", "minwmaxcard", "--input", "g.txt"],
        ["online", "--mode", "ranking", "--input", "u.json", "--trials", "100000", "--seed", "5"],
        ["online", "--mode", "dual-check", "--input", "u.json", "--trials", "50000", "--seed", "6"],
    ]
    differing = []
    for cmd in commands:
        outs = {_cli(cmd, t, tmp_path) for t in (1, 1, 4, 4)}
        if len(outs) != 1 or next(iter(outs))[0] != 0:
            differing.append(cmd[:3])
    record(12, not differing,
           f"{len(commands)} commands x 4 runs (MATCHPD_THREADS 1 and 4), "
           f"{len(differing)} differing")
