from collections import Counter

import numpy as np
import pytest
from scipy.stats import ks_2samp, chi2_contingency

from subtrees.fast import kernel_c_fast, square_dla_fast, square_dla_jump, box_exit_law, _fold
from subtrees.graph import torus, rectangle_tree
from subtrees.stats import chi_square_uniform

from helpers import subtrees


def test_fast_kernel_c_is_uniform_on_torus3():
    g = torus(3)
    universe = [frozenset(t.edges()) for t in subtrees(g, 4)]
    assert len(universe) == 180
    seen = Counter()
    t0 = subtrees(g, 4)[0]
    kernel_c_fast(t0, 300 * 9000, seed=12, chunk=300,
                  observer=lambda k, ft: seen.update([frozenset(ft.to_tree().edges())]))
    stat, p = chi_square_uniform(dict(seen), universe)
    assert p > 0.001


def test_fast_kernel_c_keeps_size_and_validity():
    g = torus(20)
    t = kernel_c_fast(rectangle_tree(g, 4, 5), 200000, seed=3)
    t.validate()
    assert t.size == 20 and not t.rooted


def test_fast_kernel_c_is_deterministic():
    g = torus(10)
    a = kernel_c_fast(rectangle_tree(g, 3, 3), 5000, seed=8)
    b = kernel_c_fast(rectangle_tree(g, 3, 3), 5000, seed=8)
    assert a.edges() == b.edges()


def test_box_exit_law_basic():
    dx, dy, p = box_exit_law(1)
    assert sorted(zip(dx, dy)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert np.allclose(p, 0.25)
    dx, dy, p = box_exit_law(4)
    assert p.sum() == pytest.approx(1.0)
    assert np.all(np.maximum(abs(dx), abs(dy)) == 4)
    # the eight symmetries of the square
    law = dict(zip(zip(dx, dy), p))
    for (a, b), q in law.items():
        assert law[(b, a)] == pytest.approx(q) and law[(-a, b)] == pytest.approx(q)


def test_box_exit_law_matches_simulation():
    R = 3
    dx, dy, p = box_exit_law(R)
    idx = {k: i for i, k in enumerate(zip(dx, dy))}
    rng = np.random.default_rng(0)
    M = 40000
    counts = np.zeros(len(p))
    steps = np.array([(1, 0), (-1, 0), (0, 1), (0, -1)])
    for _ in range(M):
        x = y = 0
        while max(abs(x), abs(y)) < R:
            s = steps[rng.integers(4)]
            x += s[0]
            y += s[1]
        counts[idx[(x, y)]] += 1
    x2 = np.sum((counts - M * p) ** 2 / (M * p))
    df = len(p) - 1
    assert (x2 - df) / np.sqrt(2 * df) < 4


@pytest.mark.parametrize("W", [2, 5, 7])
def test_fold_has_reflected_transitions(W):
    # from any free position the two folded neighbours are the two mirror steps
    def mirror(x, s):
        return x + s if 0 <= x + s < W else x - s
    P = 2 * (W - 1)
    for z in range(-3 * P, 3 * P):
        x = _fold(z, W)
        assert 0 <= x < W
        assert sorted([_fold(z + 1, W), _fold(z - 1, W)]) == sorted([mirror(x, 1), mirror(x, -1)])


def test_square_dla_samplers_valid():
    for fn in (square_dla_fast, square_dla_jump):
        parent, verts, walkers = fn(30, 20, 40, seed=1)
        assert len(verts) == 40 and parent[0] == -1 and walkers >= 39
        assert all(parent[v] in set(verts) for v in verts if v != 0)
        for v in verts:
            if v != 0:
                a, b = divmod(int(v), 30), divmod(int(parent[v]), 30)
                assert abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def test_square_dla_jump_matches_plain_walker():
    # same law: compare the extent of the cluster and the vertex occupancy
    W, H, n, M = 24, 18, 25, 1500
    def extent(fn, seed):
        _, verts, _ = fn(W, H, n, seed=seed)
        return int(np.max(verts % W) + np.max(verts // W)), verts
    a = [extent(square_dla_fast, s) for s in range(M)]
    b = [extent(lambda *x, **k: square_dla_jump(*x, levels=3, **k), 10 ** 6 + s) for s in range(M)]
    assert ks_2samp([e for e, _ in a], [e for e, _ in b]).pvalue > 0.001
    occ = np.zeros((2, W * H))
    for i, rows in enumerate((a, b)):
        for _, v in rows:
            occ[i, v] += 1
    keep = occ.sum(axis=0) >= 20
    assert chi2_contingency(occ[:, keep])[1] > 0.001


def test_square_dla_grid_arguments():
    with pytest.raises(ValueError):
        square_dla_fast(1, 5, 2)
    with pytest.raises(ValueError):
        square_dla_jump(4, 4, 17)
