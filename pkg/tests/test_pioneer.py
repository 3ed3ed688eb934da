from collections import defaultdict
from fractions import Fraction

import pytest

from subtrees.graph import complete, cycle, ladder_line, torus
from subtrees.pioneer import (pioneer_tree, labelled_states, eoe_transition_row, prt_exact_law,
                              project_drop_max, run_eoe)
from subtrees.randomness import stationary_distribution


def eoe_stationary(g, n, youngest=False):
    states = labelled_states(g, n)
    K = {s.key(): eoe_transition_row(s, youngest) for s in states}
    return stationary_distribution(K)


@pytest.mark.parametrize("g", [complete(3), cycle(4)], ids=["K3", "C4"])
def test_eoe_stationary_is_pioneer_law(g):
    pi = eoe_stationary(g, 3)
    law, tail = prt_exact_law(g, 3, horizon=120)
    assert tail < Fraction(1, 10 ** 12)
    for k, p in pi.items():
        assert law.get(k, 0) <= p <= law.get(k, 0) + tail


def test_eoe_on_ladder_line_n3():
    g = ladder_line(2, 2)
    pi = eoe_stationary(g, 3)
    law, tail = prt_exact_law(g, 3, horizon=200)
    assert max(abs(float(pi[k] - law.get(k, 0))) for k in pi) <= float(tail) + 1e-15


def test_youngest_variant_keeps_size_and_bijection():
    s = pioneer_tree(torus(4), 5, rng=1)
    monotone = []
    for seed in range(40):
        s = run_eoe(s, 25, rng=seed, youngest=True)
        assert s.size == 5
        assert sorted(s.labels.values()) == [1, 2, 3, 4] and set(s.labels) == s.tree.edges()
        monotone.append(s.is_valid())
    # erasing the youngest edge reverses part of the root path, so the
    # increasing-away-from-the-root labelling is not preserved
    assert not all(monotone)


def test_drop_max_projects_pioneer_laws():
    g = cycle(5)
    law4, tail4 = prt_exact_law(g, 4, horizon=150)
    law3, tail3 = prt_exact_law(g, 3, horizon=150)
    states = {s.key(): s for s in labelled_states(g, 4)}
    proj = defaultdict(Fraction)
    for k, p in law4.items():
        proj[project_drop_max(states[k]).key()] += p
    assert all(abs(float(proj[k] - law3.get(k, 0))) < 1e-9 for k in set(proj) | set(law3))


def test_pioneer_tree_labels_valid():
    for seed in range(30):
        lt = pioneer_tree(torus(5), 8, rng=seed)
        assert lt.is_valid()
        assert lt.size == 8
        assert lt.path[0] == lt.root


def test_eoe_keeps_states_valid():
    s = pioneer_tree(torus(4), 6, rng=2)
    s = run_eoe(s, 500, rng=3)
    assert s.is_valid() and s.size == 6


def test_pioneer_bounds():
    with pytest.raises(ValueError):
        pioneer_tree(complete(3), 4)
