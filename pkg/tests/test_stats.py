import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import kstest

from subtrees.graph import line, torus, grid, EmbeddedTree
from subtrees.stats import (StatsRecord, degree_counts, width_height, measure, canonical_embedding,
                            deciles, median, est_exponent, decile_fit, chi_square_uniform,
                            aggregate, read_records, tree_distances)


def path3():
    return EmbeddedTree.from_edges(line(3), [(0, 1), (1, 2)], root=0)


def test_degree_proportions_of_a_path():
    rec = measure(path3(), pairs=5, rng=0)
    assert rec.deg == [2, 1, 0, 0]
    q = aggregate([json.loads(rec.to_json())])["q_mean"]
    assert q == pytest.approx([2 / 3, 1 / 3, 0, 0])


def test_single_vertex_has_no_degree_histogram():
    assert degree_counts(EmbeddedTree(line(3), 1)) == []


def test_width_height_on_torus():
    g = torus(6)
    t = EmbeddedTree.from_edges(g, [(0, 1), (1, 2), (2, 8)], root=0)
    assert width_height(t) == (3, 2)


def test_distances_from_root():
    t = path3()
    rec = measure(t, pairs=50, rng=1, from_root=True)
    assert set(rec.dists) <= {0, 1, 2}
    assert tree_distances(t, 2) == {2: 0, 1: 1, 0: 2}


def test_canonical_embedding_unwraps():
    g = torus(5)
    # 0 - 4 wraps horizontally, 0 - 20 vertically
    t = EmbeddedTree.from_edges(g, [(0, 4), (0, 20), (0, 1)], root=0)
    pos = canonical_embedding(t)
    assert pos == {0: (0, 0), 4: (-1, 0), 20: (0, -1), 1: (1, 0)}
    with pytest.raises(ValueError):
        canonical_embedding(EmbeddedTree(grid(3, 3), 0))


def test_canonical_embedding_rejects_long_trees():
    g = torus(4)
    t = EmbeddedTree.from_edges(g, [(0, 1), (1, 2), (2, 3), (3, 7)], root=0)
    with pytest.raises(ValueError):
        canonical_embedding(t)


def test_published_summaries():
    assert round(est_exponent(171, 95, 2500, 1000, "median"), 3) == 0.641
    assert round(est_exponent(189.60, 95.68, 2500, 1000, "mean"), 3) == 0.746


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 1.0), st.integers(100, 2000), st.integers(2, 9))
def test_exact_power_law_is_recovered(g, n, k):
    m = n * k
    rng = np.random.default_rng(n)
    base = rng.uniform(1, 2, 200)
    for method in ("mean", "median", "decile"):
        est = est_exponent(base * m ** g, base * n ** g, m, n, method)
        assert est == pytest.approx(g, abs=1e-6)


def test_estimators_are_scale_invariant():
    rng = np.random.default_rng(3)
    a, b = rng.gamma(3, size=300), rng.gamma(5, size=300)
    for method in ("mean", "median", "decile"):
        assert est_exponent(7 * a, 7 * b, 900, 300, method) == pytest.approx(
            est_exponent(a, b, 900, 300, method), abs=1e-6)


def test_decile_and_median_conventions():
    y = np.arange(1, 11)
    assert list(deciles(y)) == list(range(1, 10))
    assert median([5, 1, 3]) == 3
    assert median([4, 1, 3, 2]) == 2


def test_decile_fit_stays_in_range():
    x = decile_fit(np.ones(9), np.ones(9) * 1e6, 10, 1000)
    assert 0.5 <= x <= 1.0


def test_estimator_errors():
    with pytest.raises(ValueError):
        est_exponent([1], [2], 10, 10)
    with pytest.raises(ValueError):
        est_exponent([], [2], 10, 20)
    with pytest.raises(ValueError):
        est_exponent([1], [2], 10, 20, "mode")


def test_chi_square_examples():
    assert chi_square_uniform([10, 10, 10]) == (0.0, 1.0)
    stat, p = chi_square_uniform({"a": 100}, ["a", "b"])
    assert stat == pytest.approx(100.0) and p < 1e-20
    with pytest.raises(ValueError):
        chi_square_uniform({"c": 10}, ["a", "b"])
    with pytest.raises(ValueError):
        chi_square_uniform([3, 4])
    with pytest.raises(ValueError):
        chi_square_uniform([10])


def test_chi_square_p_values_are_uniform_under_the_null():
    rng = np.random.default_rng(4)
    ps = [chi_square_uniform(rng.multinomial(400, [0.125] * 8))[1] for _ in range(2000)]
    assert kstest(ps, "uniform").pvalue > 0.001


def test_records_round_trip(tmp_path):
    recs = [measure(path3(), pairs=3, rng=s, seed=s) for s in range(4)]
    f = tmp_path / "r.jsonl"
    f.write_text("".join(r.to_json() + "\n" for r in recs))
    back = read_records(f)
    assert [r["seed"] for r in back] == [0, 1, 2, 3]
    agg = aggregate(back)
    assert agg["replicas"] == 4 and agg["dist_n"] == 12
    assert StatsRecord(**back[0]).size == 3
