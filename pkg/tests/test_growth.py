from fractions import Fraction

import numpy as np
import pytest

from subtrees.graph import complete, cycle, grid, torus, ladder_line
from subtrees.growth import (am_law, zm_law, sbf_law, ust_single_removal_law, kruskal_law,
                             one_edge_per_node, bernoulli_outgoing, size_biased_component,
                             ust_edge_evaporation, kruskal_component, prim_component, fpp_tree,
                             tdla, idla_tree, assign_weights, perimeter)
from subtrees.stats import tree_distances

from helpers import all_subtrees, subtrees, law_check

HOSTS = [complete(4), cycle(5), ladder_line(2, 2), torus(2)]
IDS = ["K4", "C5", "ladder", "T2"]


def key(t):
    return t.key()


@pytest.mark.parametrize("g", HOSTS, ids=IDS)
def test_zm_law_sums_to_one(g):
    # parallel edges: one term per tree of distinct vertex pairs, multiplicity in the law
    trees = {t.key(): t for t in all_subtrees(g, 0)}
    assert sum(zm_law(g, 0, t) for t in trees.values()) == 1


@pytest.mark.parametrize("q", [Fraction(1, 3), Fraction(3, 4)])
def test_am_law_sums_to_one(q):
    g = ladder_line(2, 2)
    assert sum(am_law(g, 0, q, t) for t in all_subtrees(g, 0)) == 1


@pytest.mark.parametrize("g", HOSTS[:3], ids=IDS[:3])
def test_sbf_law_sums_to_one(g):
    assert sum(sbf_law(g, 0, t) for t in all_subtrees(g, 0)) == 1


@pytest.mark.parametrize("g", HOSTS, ids=IDS)
def test_ust_single_removal_law_sums_to_one(g):
    assert sum(ust_single_removal_law(g, 0, t) for t in all_subtrees(g, 0)) == 1


@pytest.mark.parametrize("g,n", [(cycle(5), 3), (complete(4), 2), (ladder_line(2, 2), 3)])
def test_kruskal_law_sums_to_one(g, n):
    total = sum(kruskal_law(g, 0, n, t) for k in range(n, g.num_vertices + 1)
                for t in subtrees(g, k, 0))
    assert total == 1


def test_zm_law_by_hand_on_path():
    # on the path 0-1-2 rooted at the end: {0} needs 1 -> 2, prob 1/2
    from subtrees.graph import line
    g = line(3)
    p = {len(t.members): zm_law(g, 0, t) for t in all_subtrees(g, 0)}
    assert p == {1: Fraction(1, 2), 2: Fraction(0), 3: Fraction(1, 2)}


def _mc(sample, law, M=20000):
    z, zmax, outside = law_check(sample, law, M)
    assert outside == 0
    assert z < 4 and zmax < 4.5


def test_zm_sampler_matches_law():
    g = ladder_line(2, 2)
    law = {key(t): zm_law(g, 0, t) for t in all_subtrees(g, 0)}
    rng = np.random.default_rng(1)
    _mc(lambda: key(one_edge_per_node(g, 0, rng)), law)


def test_am_sampler_matches_law():
    g = cycle(5)
    q = Fraction(1, 2)
    law = {key(t): am_law(g, 0, q, t) for t in all_subtrees(g, 0)}
    rng = np.random.default_rng(2)
    _mc(lambda: key(bernoulli_outgoing(g, 0, 0.5, rng)), law)


def test_sbf_sampler_matches_law():
    g = complete(4)
    law = {key(t): sbf_law(g, 0, t) for t in all_subtrees(g, 0)}
    rng = np.random.default_rng(3)
    _mc(lambda: key(size_biased_component(g, 0, rng=rng)), law)


def test_ust_single_removal_matches_law():
    g = complete(4)
    law = {t.key(): ust_single_removal_law(g, 0, t) for t in all_subtrees(g, 0)}
    rng = np.random.default_rng(4)
    _mc(lambda: ust_edge_evaporation(g, 0, g.num_vertices, rng).key(), law)


def test_kruskal_sampler_matches_law():
    g = cycle(5)
    law = {t.key(): kruskal_law(g, 0, 3, t) for k in range(3, 6) for t in subtrees(g, k, 0)}
    rng = np.random.default_rng(5)
    _mc(lambda: kruskal_component(g, 0, 3, rng=rng).key(), law)


def test_sbf_conditioning():
    g = grid(3, 3)
    t = size_biased_component(g, 4, condition={"size": (3, 5)}, rng=7)
    assert 3 <= t.size <= 5 and t.attempts >= 1
    t = size_biased_component(g, 4, condition={"indegree": 0}, rng=8)
    assert t.num_trees == 1 and t.size == 9


def test_prim_depends_only_on_order():
    g = torus(5)
    w = assign_weights(g, "uniform", 11)
    a = prim_component(g, 0, 12, w)
    b = prim_component(g, 0, 12, np.exp(3 * w) - 7)
    assert a.key() == b.key() and a.size == 12


def test_fpp_tree_is_shortest_path_tree():
    g = grid(6, 6)
    w = assign_weights(g, "invexp5", 3)
    t = fpp_tree(g, 0, 15, weights=w)
    t.validate()
    assert t.size == 15
    # distances along tree edges are consistent with the stored first passage times
    for c, p in t.oriented_edges():
        assert t.dist[c] == pytest.approx(t.dist[p] + w[g.edge_id[(min(c, p), max(c, p))]])
    outside = perimeter(g, set(t.members))
    assert max(t.dist.values()) <= min(
        min(t.dist[u] + w[g.edge_id[(min(u, v), max(u, v))]] for u in g.nbrs[v] if u in t.dist)
        for v in outside)


@pytest.mark.parametrize("walk,g", [("uniform-start", torus(6)), ("reflected-square", grid(6, 5))])
def test_dla_trees_are_valid(walk, g):
    t = tdla(g, 0, 12, rng=9, walk=walk)
    t.validate()
    assert t.size == 12 and t.root == 0


def test_idla_grows_from_root():
    g = torus(7)
    t = idla_tree(g, 3, 20, rng=4)
    t.validate()
    d = tree_distances(t, 3)
    assert t.size == 20 and set(d) == set(t.members)


def test_edge_evaporation_stops_below_target():
    g = torus(4)
    t = ust_edge_evaporation(g, 0, 6, rng=2)
    assert t.size < 6 and t.removals >= 1


def test_bad_arguments():
    g = cycle(4)
    with pytest.raises(ValueError):
        bernoulli_outgoing(g, 0, 0)
    with pytest.raises(ValueError):
        tdla(g, 0, 2, walk="reflected-square")
    with pytest.raises(ValueError):
        prim_component(g, 0, 9, assign_weights(g))
