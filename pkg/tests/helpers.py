"""Shared small-host utilities for the tests."""
import math
from collections import Counter

import networkx as nx

from subtrees.graph import Graph, EmbeddedTree
from subtrees.enumeration import enumerate_subtrees


def subtrees(g, n, root=None, rooted=None):
    """EmbeddedTree objects for every subtree with n vertices (containing root if given)."""
    rooted = root is not None if rooted is None else rooted
    out = []
    for V, E in enumerate_subtrees(g, n, root):
        start = root if root is not None else min(V)
        t = EmbeddedTree.from_edges(g, [e[:2] for e in E], root=start) if E else EmbeddedTree(g, start)
        out.append(t if rooted else t.unrooted())
    return out


def all_subtrees(g, root=None):
    return [t for n in range(1, g.num_vertices + 1) for t in subtrees(g, n, root)]


def connected_graphs(nv):
    """One representative per isomorphism class of connected graphs on nv vertices."""
    for G in nx.graph_atlas_g():
        if G.number_of_nodes() == nv and nx.is_connected(G):
            yield Graph(nv, list(G.edges()))


def key_of(V, E):
    from subtrees.graph import edge_key
    return (frozenset(V), frozenset(edge_key(*e[:2]) for e in E))


def chi2_z(counts, probs, total):
    """Pearson statistic standardised as (X2 - df) / sqrt(2 df), classes with p > 0."""
    x2 = 0.0
    k = 0
    for c, p in zip(counts, probs):
        if p > 0:
            e = total * p
            x2 += (c - e) ** 2 / e
            k += 1
    df = k - 1
    return (x2 - df) / math.sqrt(2 * df) if df > 0 else 0.0


def max_abs_z(counts, probs, total):
    z = 0.0
    for c, p in zip(counts, probs):
        if 0 < p < 1:
            z = max(z, abs(c - total * p) / math.sqrt(total * p * (1 - p)))
    return z


def law_check(sample, law, M):
    """Draw M samples (keys) and compare with an exact law {key: prob}."""
    c = Counter(sample() for _ in range(M))
    keys = list(law)
    outside = sum(v for k, v in c.items() if k not in law or law[k] == 0)
    counts = [c.get(k, 0) for k in keys]
    probs = [float(law[k]) for k in keys]
    return chi2_z(counts, probs, M), max_abs_z(counts, probs, M), outside
