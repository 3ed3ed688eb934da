from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from subtrees.graph import torus, complete, cycle, ladder_line, Graph, line
from subtrees.enumeration import (subtree_polynomial_rooted, subtree_polynomial_unrooted,
                                  subtree_counts, subtree_counts_matrix_tree, count_spanning_trees,
                                  format_polynomial, evaluate, enumerate_subtrees,
                                  exact_sample_rooted, exact_sample_unrooted, boltzmann_sample,
                                  forest_polynomial, enumerate_forests, ResourceLimitError,
                                  _counter, _BoltzmannChooser, DEFAULT_BUDGET)


def test_format_polynomial():
    assert format_polynomial([1, 4, 12, 32]) == "32x^3+12x^2+4x+1"
    assert format_polynomial([1]) == "1"
    assert format_polynomial([0, 1]) == "x"
    assert format_polynomial([]) == "0"


def test_small_polynomials():
    assert subtree_polynomial_rooted(torus(1), 0) == [1]
    assert subtree_polynomial_rooted(torus(2), 0) == [1, 4, 12, 32]
    # path on 3 vertices rooted at an end: {0}, {0,1}, {0,1,2}
    assert subtree_polynomial_rooted(line(3), 0) == [1, 1, 1]
    assert subtree_polynomial_rooted(line(3), 1) == [1, 2, 1]


def test_leading_coefficient_is_spanning_count():
    for g in [torus(2), torus(3), complete(5), ladder_line(2, 3)]:
        p = subtree_polynomial_rooted(g, 0)
        assert len(p) == g.num_vertices
        assert p[-1] == count_spanning_trees(g)


def test_unrooted_identity():
    # derivative of x T(G) equals the sum over roots
    g = ladder_line(2, 2)
    un = subtree_polynomial_unrooted(g)
    tot = [0] * g.num_vertices
    for r in range(g.num_vertices):
        for k, c in enumerate(subtree_polynomial_rooted(g, r)):
            tot[k] += c
    assert tot == [(k + 1) * c for k, c in enumerate(un)]


def test_matrix_tree_cross_check_torus3():
    assert subtree_polynomial_rooted(torus(3), 0) == subtree_counts_matrix_tree(torus(3), 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2 ** 31))
def test_recursion_matches_matrix_tree(n, seed):
    rng = np.random.default_rng(seed)
    edges = [(i, int(rng.integers(i))) for i in range(1, n)]
    for _ in range(int(rng.integers(0, 2 * n))):
        a, b = rng.choice(n, 2, replace=False)
        edges.append((int(a), int(b)))
    g = Graph(n, edges)
    r = int(rng.integers(n))
    assert subtree_polynomial_rooted(g, r) == subtree_counts_matrix_tree(g, r)


def test_enumeration_matches_counts():
    g = ladder_line(2, 2)
    p = subtree_polynomial_rooted(g, 0)
    for n in range(1, g.num_vertices + 1):
        assert len(enumerate_subtrees(g, n, 0)) == p[n - 1]
    total, per_root = subtree_counts(g, 3)
    assert total == len(enumerate_subtrees(g, 3))


def test_multigraph_enumeration_counts_copies():
    g = torus(2)
    assert len(enumerate_subtrees(g, 2, 0)) == 4
    assert len(enumerate_subtrees(g, 4, 0)) == 32


def test_budget_raises():
    with pytest.raises(ResourceLimitError):
        subtree_polynomial_rooted(torus(5), 0, budget=1000)


def test_exact_sampler_uniform():
    g = torus(3)
    M = 16000
    rng = np.random.default_rng(2)
    c = Counter(exact_sample_rooted(g, 0, 3, rng).key() for _ in range(M))
    assert len(c) == 18
    assert chisquare(list(c.values())).pvalue > 1e-3


def test_exact_unrooted_sampler_covers_universe():
    g = cycle(5)
    rng = np.random.default_rng(1)
    c = Counter(exact_sample_unrooted(g, 3, rng).key() for _ in range(3000))
    assert len(c) == 5
    assert chisquare(list(c.values())).pvalue > 1e-3


def test_exact_sampler_rejects_impossible_size():
    with pytest.raises(ValueError):
        exact_sample_rooted(torus(2), 0, 5)


@pytest.mark.parametrize("g,x,M", [(ladder_line(2, 2), Fraction(1, 2), 12000),
                                   (torus(3), Fraction(1, 4), 60000)])
def test_boltzmann_size_law(g, x, M):
    # torus(3) reaches the same branch states with one or two edges into the tree
    p = subtree_polynomial_rooted(g, 0)
    z = evaluate(p, x)
    rng = np.random.default_rng(4)
    c = Counter(boltzmann_sample(g, 0, x, rng).size for _ in range(M))
    exp = [M * float(p[k] * x ** k / z) for k in range(len(p))]
    obs = [c.get(k + 1, 0) for k in range(len(p))]
    assert chisquare(obs, exp).pvalue > 1e-3


@pytest.mark.parametrize("g", [complete(4), cycle(5), ladder_line(2, 2)])
def test_boltzmann_branch_law_is_exact(g):
    # follow every branch of the descent with the sampler's own probabilities
    x = Fraction(1, 3)
    c = _counter(g, 0, DEFAULT_BUDGET)
    c.poly()
    choose = _BoltzmannChooser(None, x)
    law = Counter()

    def walk(state, alive, parent, pr):
        ch = c._children(*state)
        if ch is None:
            law[frozenset(parent.items())] += pr
            return
        w, mult, con, dele = ch
        pc = choose.prob(c, mult, con, dele)
        if pc:
            for u in alive[w]:
                nxt = {v: list(a) for v, a in alive.items() if v != w}
                for v, mm in g.adjacency[w]:
                    if not (con[0] >> v) & 1:
                        nxt.setdefault(v, []).extend([w] * mm)
                walk(con, nxt, {**parent, w: u}, pr * pc / len(alive[w]))
        if pc != 1:
            walk(dele, {v: a for v, a in alive.items() if v != w}, parent, pr * (1 - pc))

    alive = {}
    for w, mm in g.adjacency[0]:
        alive.setdefault(w, []).extend([0] * mm)
    walk(c.start, alive, {}, Fraction(1))
    z = evaluate(subtree_polynomial_rooted(g, 0), x)
    assert len(law) == sum(subtree_polynomial_rooted(g, 0))
    assert all(p == x ** len(t) / z for t, p in law.items())


def test_forest_polynomial_matches_enumeration():
    g = ladder_line(1, 2)
    assert forest_polynomial(g, [0, 4]) == enumerate_forests(g, [0, 4])
    assert forest_polynomial(torus(2), [0, 3]) == enumerate_forests(torus(2), [0, 3])
