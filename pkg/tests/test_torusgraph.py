import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmonodromy.torusgraph import (GraphStats, SupportGraph, act, cycle_monomials, evaluate_generator,
                                   graph_stats, invariant_generators)


def components_oracle(n, S):
    # union-find on rows 0..n-1 and columns n..2n-1
    parent = list(range(2 * n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in S:
        parent[find(i - 1)] = find(n + j - 1)
    return len({find(a) for a in range(2 * n)})


def all_supports(n):
    cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    for r in range(1, len(cells) + 1):
        yield from itertools.combinations(cells, r)


def test_examples():
    assert graph_stats(SupportGraph.full(2)) == GraphStats(1, 0, 1)
    three = SupportGraph(2, {(1, 1), (1, 2), (2, 1)})
    st_ = graph_stats(three)
    assert st_.chi == 1 and st_.cyclomatic == 0
    g = SupportGraph(3, {(i, j) for i in (1, 2) for j in (1, 2, 3)})
    assert graph_stats(g).chi == 2 and graph_stats(g).stab_dim == 1


def test_n2_formula_exhaustive():
    for S in all_supports(2):
        assert graph_stats(SupportGraph(2, frozenset(S))).chi == max(1, 4 - len(S))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_against_bruteforce(n):
    for S in all_supports(n):
        g = SupportGraph(n, frozenset(S))
        stt = graph_stats(g)
        chi = components_oracle(n, S)
        assert stt.chi == chi
        assert stt.cyclomatic == len(S) - 2 * n + chi >= 0
        mons = cycle_monomials(g)
        assert len(mons) == stt.cyclomatic
        if mons:
            order = sorted(S)
            V = np.array([m.vector(order) for m in mons])
            assert np.linalg.matrix_rank(V) == len(mons)


def test_js_monomial():
    (m,) = cycle_monomials(SupportGraph.full(2))
    assert m.exponents == {(1, 1): 1, (1, 2): -1, (2, 1): -1, (2, 2): 1}
    assert str(m) == "X11*X22/(X12*X21)"


def test_forest_empty():
    assert cycle_monomials(SupportGraph(3, {(1, 1), (2, 2), (1, 2)})) == []


@given(st.sets(st.tuples(st.integers(1, 4), st.integers(1, 4)), min_size=1))
@settings(max_examples=60, deadline=None)
def test_monomials_balanced(S):
    g = SupportGraph(4, frozenset(S))
    for m in cycle_monomials(g):
        for k in range(1, 5):
            assert sum(e for (i, _), e in m.exponents.items() if i == k) == 0
            assert sum(e for (_, j), e in m.exponents.items() if j == k) == 0
        assert set(m.exponents) <= set(S)


def test_monomial_character_trivial(rng):
    g = SupportGraph.full(3)
    for m in cycle_monomials(g):
        lam, mu = np.exp(rng.normal(size=3)), np.exp(rng.normal(size=3))
        val = np.prod([(lam[i - 1] / mu[j - 1]) ** e for (i, j), e in m.exponents.items()])
        assert abs(val - 1) < 1e-12


def test_generators_counts():
    full = invariant_generators(SupportGraph.full(2))
    assert sum(g.kind == "coordinate" for g in full) == 8
    assert [g.invertible for g in full if g.kind == "cycle"] == [True]
    deg = invariant_generators(SupportGraph(2, {(1, 1), (1, 2), (2, 1)}))
    assert sum(g.kind == "coordinate" for g in deg) == 6
    assert not any(g.kind == "cycle" for g in deg)


def rand_point(rng, S, dim=2):
    return {ij: rng.normal(size=dim) + 1j * rng.normal(size=dim) for ij in S}


def test_generators_invariant(rng):
    g = SupportGraph.full(2)
    gens = invariant_generators(g)
    chart = {ij: rng.normal(size=2) + 1j * rng.normal(size=2) for ij in g.S}
    pt = rand_point(rng, g.S)
    base = [evaluate_generator(x, pt, chart) for x in gens]
    for _ in range(20):
        gam = rng.normal(size=2) + 1j * rng.normal(size=2)
        dl = rng.normal(size=2) + 1j * rng.normal(size=2)
        moved = act(pt, gam, dl)
        for b, x in zip(base, gens):
            assert abs(evaluate_generator(x, moved, chart) - b) < 1e-10 * max(1, abs(b))


def test_orbit_invariants(rng):
    g = SupportGraph.full(2)
    gens = invariant_generators(g)
    pt = rand_point(rng, g.S)
    base = np.array([evaluate_generator(x, pt) for x in gens])
    worst = 0.0
    for _ in range(1000):
        gam = np.exp(rng.normal(scale=0.5, size=2) + 1j * rng.uniform(0, 6.3, 2))
        dl = np.exp(rng.normal(scale=0.5, size=2) + 1j * rng.uniform(0, 6.3, 2))
        vals = np.array([evaluate_generator(x, act(pt, gam, dl)) for x in gens])
        worst = max(worst, np.max(np.abs(vals - base) / np.maximum(1, np.abs(base))))
    assert worst < 1e-10


def test_invalid_support():
    with pytest.raises(ValueError):
        SupportGraph(2, {(3, 1)})
    with pytest.raises(ValueError):
        SupportGraph(0, set())
