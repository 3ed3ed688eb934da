import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subtrees.graph import (Graph, torus, complete, line, cycle, ladder_line, dary_tree, generate,
                            spec_of, parse_graph, check_tree, EmbeddedTree, rectangle_tree,
                            exchange)


def test_torus_shapes():
    assert torus(1).num_edges == 0
    g2 = torus(2)
    assert g2.num_edges == 8 and not g2.is_simple
    assert all(m == 2 for m in g2.multiplicity.values())
    g5 = torus(5)
    assert g5.is_simple and g5.is_regular() and set(g5.deg) == {4}
    assert g5.num_edges == 2 * 25


def test_generators_roundtrip_spec():
    for spec in ["torus:3", "grid:4x3", "complete:5", "line:4", "cycle:6", "ladderline:2,3", "dary:2,3"]:
        g = generate(spec)
        assert spec_of(g) == spec
        assert g.is_connected()


def test_bad_specs():
    for spec in ["torus", "grid:4", "blob:3", "torus:0", "cycle:2"]:
        with pytest.raises(ValueError):
            generate(spec)


def test_ladder_line_counts():
    g = ladder_line(2, 3)
    assert g.num_vertices == 8
    assert g.num_edges == 1 + 3 + 2 * 2 + 1


def test_dary_tree():
    g = dary_tree(2, 3)
    assert g.num_vertices == 15 and g.num_edges == 14 and g.is_connected()


def test_graph_text_roundtrip():
    g = torus(2)
    assert parse_graph(g.to_text()) == g
    with pytest.raises(ValueError):
        parse_graph("edges\n")


def test_graph_rejects_loops():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])


def test_check_tree():
    g = complete(4)
    assert check_tree(g, [(0, 1), (1, 2)])
    assert not check_tree(g, [(0, 1), (1, 2), (0, 2)])
    assert not check_tree(g, [(0, 1), (2, 3)])
    assert check_tree(g, [], vertex=2)
    assert not check_tree(g, [])


def test_rectangle_tree():
    g = torus(10)
    t = rectangle_tree(g, 4, 3)
    assert t.size == 12
    xs = {g.coords(v)[0] for v in t.members}
    ys = {g.coords(v)[1] for v in t.members}
    assert len(xs) == 4 and len(ys) == 3
    t.validate()
    with pytest.raises(ValueError):
        rectangle_tree(g, 11, 1)


def test_rooted_leaves_exclude_root():
    g = line(3)
    t = EmbeddedTree(g, 0)
    t.add_leaf(1, 0)
    assert t.leaves == [1]
    u = t.unrooted()
    assert sorted(u.leaves) == [0, 1]


def test_remove_anchor_leaf_reanchors():
    g = line(4)
    t = EmbeddedTree.from_edges(g, [(0, 1), (1, 2)], vertex=0).unrooted()
    t.remove_leaf(t.anchor)
    t.validate()
    assert t.vertices() == {1, 2}


def test_exchange_keeps_size():
    g = cycle(4)
    t = EmbeddedTree.from_edges(g, [(0, 1), (1, 2), (2, 3)], vertex=0).unrooted()
    s = exchange(t, (3, 0), (1, 2))
    assert s.size == 4 and s.edges() == {(0, 1), (2, 3), (0, 3)}
    s.validate()
    assert exchange(t, (0, 1), (1, 2)) is t


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(3, 6))
def test_random_mutations_stay_consistent(seed, N):
    # random add/remove/exchange sequences never break the cached structure
    rng = np.random.default_rng(seed)
    g = torus(N)
    t = EmbeddedTree(g, 0, rooted=bool(seed % 2))
    for _ in range(60):
        if rng.random() < 0.5 or t.size == 1:
            u = t.members[rng.integers(t.size)]
            w = g.nbrs[u][rng.integers(len(g.nbrs[u]))]
            if not t.inside[w]:
                t.add_leaf(w, u)
        elif t.leaves:
            t.remove_leaf(t.leaves[rng.integers(len(t.leaves))])
        t.validate()
    if t.size >= 3:
        r = t.members[rng.integers(t.size)]
        s = t.as_rooted(r)
        s.validate()
        assert s.root == r and s.key() == t.key()
