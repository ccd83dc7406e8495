import random

import pytest
from hypothesis import strategies as st

from matchpd.graph import BipartiteInstance, left, right
from matchpd.oracle import EnumerationBudget

# room for complete 6x6 instances
BIG = EnumerationBudget(max_vertices=12, max_edges=36)


@pytest.fixture
def g1():
    # w: l0r0=1, l0r1=2, l1r0=2, l1r1=4
    return BipartiteInstance.from_weighted_edges(2, 2, [(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)])


def L(i):
    return left(i)


def R(j):
    return right(j)


@st.composite
def instances(draw, max_side=5, low=0, high=10, min_side=0):
    nl = draw(st.integers(min_side, max_side))
    nr = draw(st.integers(min_side, max_side))
    pairs = [(l, r) for l in range(nl) for r in range(nr)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    ws = draw(st.lists(st.integers(low, high), min_size=len(chosen), max_size=len(chosen)))
    return BipartiteInstance.from_weighted_edges(
        nl, nr, [(l, r, w) for (l, r), w in zip(sorted(chosen), ws)])


def random_instance(rng: random.Random, max_side=6, low=0, high=10, density=None):
    nl, nr = rng.randint(0, max_side), rng.randint(0, max_side)
    p = rng.random() if density is None else density
    return BipartiteInstance.from_weighted_edges(
        nl, nr, [(l, r, rng.randint(low, high)) for l in range(nl) for r in range(nr)
                 if rng.random() < p])


def random_complete(rng: random.Random, n, low=-10, high=10):
    return BipartiteInstance.complete([[rng.randint(low, high) for _ in range(n)] for _ in range(n)])


# acceptance results, printed once at the end of the session
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
