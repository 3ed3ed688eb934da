from fractions import Fraction

import pytest

from subtrees.graph import cycle, line, torus, Graph, EmbeddedTree
from subtrees.fixed_size import BreakCycleRule
from subtrees.variable_size import (PqrConfig, invariant_measure, transition_row, run_variable,
                                    size_law, remove_unrooted, remove_rooted)
from subtrees.enumeration import subtree_polynomial_unrooted
from helpers import all_subtrees


def balanced(kernel, g, cfg, variant, root=None, rule=None):
    ts = all_subtrees(g)
    if root is not None:
        ts = [t.as_rooted(root) for t in ts if root in t]
    else:
        ts = [t.unrooted() if t.rooted else t for t in ts]
    nu = invariant_measure(cfg, variant)
    K = {t.key(): transition_row(kernel, t, cfg, rule, root=root) for t in ts}
    size = {t.key(): t.size for t in ts}
    closed = all(set(row) <= set(K) for row in K.values())
    ok = all(nu[size[a]] * K[a].get(b, 0) == nu[size[b]] * K[b].get(a, 0) for a in K for b in K)
    return closed and ok


CFG4 = PqrConfig([Fraction(1, 2), Fraction(2, 5), Fraction(1, 3), 0],
                 [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 5)])


@pytest.mark.parametrize("rule", ["including", "excluding"])
def test_kernel_d_balance_on_path_plus(rule):
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (1, 3)])
    assert balanced("kernelD", g, CFG4, "unrooted", rule=BreakCycleRule(rule))


def test_kernel_dr_balance():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (1, 3)])
    assert balanced("kernelDr", g, CFG4, "rooted", root=0)


def test_kernel_e_balance_on_c4():
    assert balanced("kernelE", cycle(4), CFG4, "regular")


def test_windowed_measure_zero_outside():
    cfg = PqrConfig.windowed(5, 2, 4)
    nu = invariant_measure(cfg, "windowed")
    assert nu[1] == 0 and nu[5] == 0 and nu[2] == 1 and nu[3] > 0
    with pytest.raises(ValueError):
        PqrConfig([Fraction(1, 2)] * 3, [Fraction(1, 2)] * 3, window=(1, 3))


def test_pqr_validation_and_parsing():
    with pytest.raises(ValueError):
        PqrConfig([Fraction(1, 2)], [Fraction(2, 3)])
    text = "1 1/2 1/2 0\n2 1/3 1/3 1/3\n3 0 1/2 1/2\n"
    cfg = PqrConfig.parse(text)
    assert cfg.N == 3 and cfg.triple(2) == (Fraction(1, 3),) * 3
    assert PqrConfig.parse(cfg.to_text()).to_text() == cfg.to_text()
    assert PqrConfig.preset("geom:2", 4).p(1) == Fraction(2, 3)
    with pytest.raises(ValueError):
        PqrConfig.preset("banana", 3)


def test_size_law_sums_to_one():
    g = cycle(5)
    nu = invariant_measure(PqrConfig.constant(5, Fraction(1, 2)), "unrooted")
    law = size_law(nu, subtree_polynomial_unrooted(g))
    assert sum(law) == 1


def test_oriented_removal_of_single_edge():
    g = line(2)
    t = EmbeddedTree.from_edges(g, [(0, 1)], vertex=0).unrooted()
    remove_unrooted(t, (1, 0))
    assert t.vertices() == {1}


def test_rooted_removal_keeps_root():
    g = line(2)
    t = EmbeddedTree.from_edges(g, [(0, 1)], root=0)
    remove_rooted(t, 0, (0, 1))
    assert t.vertices() == {0}
    t2 = EmbeddedTree.from_edges(g, [(0, 1)], root=1)
    remove_rooted(t2, 1, (0, 1))
    assert t2.vertices() == {1}


def test_run_variable_checks():
    g = torus(3)
    t = EmbeddedTree(g, 0)
    cfg = PqrConfig.constant(9, Fraction(1, 2))
    out = run_variable("kernelDr", t, cfg, 300, rng=1)
    assert 0 in out and out.root == 0
    out.validate()
    with pytest.raises(ValueError):
        run_variable("kernelD", t, PqrConfig.constant(4, Fraction(1, 2)), 10)
    with pytest.raises(ValueError):
        run_variable("kernelE", EmbeddedTree(line(3), 0), PqrConfig.constant(3, Fraction(1, 2)), 10)
