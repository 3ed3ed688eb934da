from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from subtrees.graph import complete, cycle, torus, Graph, EmbeddedTree
from subtrees.fixed_size import (run_chain, transition_matrix, BreakCycleRule)
from helpers import subtrees


def symmetric(K):
    return all(K[a].get(b, 0) == K[b].get(a, 0) for a in K for b in K)


@pytest.mark.parametrize("kernel", ["kernelA", "kernelB", "kernelB-leaf", "kernelC"])
def test_symmetric_on_k4(kernel):
    ts = subtrees(complete(4), 3, rooted=False)
    K = transition_matrix(kernel, ts)
    assert all(sum(row.values()) == 1 for row in K.values())
    assert all(set(row) <= set(K) for row in K.values())
    assert symmetric(K)


def test_kernel_c_excluding_variant_symmetric_on_c5():
    ts = subtrees(cycle(5), 4, rooted=False)
    assert symmetric(transition_matrix("kernelC", ts, BreakCycleRule("excluding")))


def test_kernel_b_not_symmetric_on_non_regular_host():
    # a star plus one edge: endpoint degrees differ, so the exchange rate is edge dependent
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
    ts = subtrees(g, 2, rooted=False)
    assert not symmetric(transition_matrix("kernelB", ts))
    assert symmetric(transition_matrix("kernelA", ts))


def test_chain_keeps_size_and_validity():
    g = torus(5)
    t0 = EmbeddedTree(g, 0, rooted=False)
    for k in range(1, 6):
        t0.add_leaf(k, k - 1)
    snaps = []
    t = run_chain("kernelC", t0, 2000, 3, observers=[(500, lambda s, tr: snaps.append((s, tr.size)))])
    t.validate()
    assert t.size == 6
    assert [s for s, _ in snaps] == [0, 500, 1000, 1500, 2000]
    assert t0.size == 6 and t0.vertices() == set(range(6))


def test_chain_seed_determinism():
    g = torus(4)
    t0 = EmbeddedTree(g, 0, rooted=False)
    t0.add_leaf(1, 0)
    t0.add_leaf(2, 1)
    a = run_chain("kernelB", t0, 500, 17)
    b = run_chain("kernelB", t0, 500, 17)
    assert a.key() == b.key()


def test_fixed_kernels_need_two_vertices():
    t = EmbeddedTree(torus(3), 0, rooted=False)
    with pytest.raises(ValueError):
        run_chain("kernelA", t, 10)
    with pytest.raises(ValueError):
        run_chain("nope", t, 10)


def test_bad_break_rule():
    with pytest.raises(ValueError):
        BreakCycleRule("sometimes")


def test_kernel_a_uniform_small():
    g = cycle(5)
    t0 = subtrees(g, 3, rooted=False)[0]
    rng = np.random.default_rng(0)
    c = Counter()
    t = t0
    for _ in range(6000):
        t = run_chain("kernelA", t, 15, rng)
        c[t.key()] += 1
    assert len(c) == 5
    assert chisquare(list(c.values())).pvalue > 1e-3
