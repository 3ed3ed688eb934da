"""Pioneer random tree and the erase-oldest-edge chain."""
import itertools
from fractions import Fraction

from .graph import EmbeddedTree, edge_key
from .randomness import as_draws, exact_outcomes
from .spanning import first_entrance_tree


class LabelledTree:
    """Rooted tree plus edge labels {edge_key: label} forming {1..n-1}."""

    def __init__(self, tree, labels, path=None):
        self.tree = tree
        self.labels = dict(labels)
        self.path = path

    @property
    def root(self):
        return self.tree.root

    @property
    def size(self):
        return self.tree.size

    def copy(self):
        return LabelledTree(self.tree.copy(), self.labels)

    def key(self):
        return (self.tree.root, frozenset(self.labels.items()), frozenset(self.tree.members))

    def label_of(self, child):
        return self.labels[edge_key(child, self.tree.parent[child])]

    def is_valid(self):
        """Labels are a bijection onto 1..n-1 and increase away from the root."""
        t = self.tree
        if sorted(self.labels.values()) != list(range(1, t.size)):
            return False
        if set(self.labels) != t.edges():
            return False
        for v in t.members:
            p = t.parent[v]
            if p != -1 and t.parent[p] != -1:
                if self.label_of(v) <= self.label_of(p):
                    return False
        return True


def stationary_start(g, draws):
    """Exact draw from the simple walk's invariant law (proportional to degree)."""
    s = sum(g.deg)
    return draws.pick([Fraction(d, s) for d in g.deg])


def pioneer_tree(g, n, rng=None, start="stationary", max_steps=None):
    """Walk until n distinct vertices are seen; first-entrance tree labelled by discovery order."""
    g.require_simple()
    if not 1 <= n <= g.num_vertices:
        raise ValueError("n must lie in 1..|V|")
    d = as_draws(rng)
    w = stationary_start(g, d) if start == "stationary" else int(start)
    path = [w]
    seen = {w}
    labels = {}
    cap = max_steps or 1000 * g.num_vertices ** 3 + 10 ** 6
    while len(seen) < n:
        nb = g.nbrs[w]
        x = nb[d.below(len(nb))]
        if x not in seen:
            seen.add(x)
            labels[edge_key(w, x)] = len(seen) - 1
        path.append(x)
        w = x
        if len(path) > cap:
            raise RuntimeError("walk exceeded %d steps" % cap)
    return LabelledTree(first_entrance_tree(g, path), labels, path)


def _relabel(labels, m, removed, new_edge):
    out = {}
    for e, l in labels.items():
        if e == removed:
            continue
        out[e] = l if l > m else l + 1
    out[new_edge] = 1
    return out


def _step(state, draws, oldest):
    t = state.tree
    g = t.host
    r0 = t.root
    nb = g.nbrs[r0]
    r1 = nb[draws.below(len(nb))]
    if r1 == r0:
        return state
    if t.size == 1:
        return LabelledTree(EmbeddedTree(g, r1), {})
    e = edge_key(r0, r1)
    if t.inside[r1]:
        # the cycle: e plus the tree path from r1 up to the root r0
        path = t.path_to_anchor(r1)
        cyc = [(path[i], path[i + 1]) for i in range(len(path) - 1)]
        pick = max if oldest else min
        a, b = pick(cyc, key=lambda ab: state.labels[edge_key(*ab)])
        removed = edge_key(a, b)
        m = state.labels[removed]
        s = t.copy()
        s.swap(r0, r1, a, b)
        s.reroot(r1)
    else:
        s = t.copy()
        s.add_leaf(r1, r0)
        s.reroot(r1)
        leaf_edges = [edge_key(v, s.parent[v]) for v in s.leaves if edge_key(v, s.parent[v]) != e]
        pick = max if oldest else min
        removed = pick(leaf_edges, key=lambda x: state.labels[x])
        m = state.labels[removed]
        a, b = removed
        s.remove_leaf(a if s.parent[a] == b else b)
    return LabelledTree(s, _relabel(state.labels, m, removed, e))


def eoe_step(state, rng=None):
    """Root takes a walk step, the oldest edge of the cycle (or the oldest leaf edge) is erased."""
    return _step(state, as_draws(rng), oldest=True)


def youngest_step(state, rng=None):
    """Same dynamics erasing the youngest (minimal label) eligible edge instead."""
    return _step(state, as_draws(rng), oldest=False)


def project_drop_max(state):
    """Remove the edge with the largest label."""
    t = state.tree
    if t.size < 2:
        raise ValueError("cannot project a single-vertex tree")
    e = max(state.labels, key=state.labels.get)
    a, b = e
    s = t.copy()
    s.remove_leaf(a if s.parent[a] == b else b)
    labels = dict(state.labels)
    del labels[e]
    return LabelledTree(s, labels)


def run_eoe(state, steps, rng=None, youngest=False):
    d = as_draws(rng)
    for _ in range(int(steps)):
        state = _step(state, d, oldest=not youngest)
    return state


# exact objects for small hosts

def labelled_states(g, n):
    """Every rooted edge-labelled tree of size n with labels decreasing toward the root."""
    from .enumeration import enumerate_subtrees
    out = []
    for r in range(g.num_vertices):
        for V, E in enumerate_subtrees(g, n, r):
            t = EmbeddedTree.from_edges(g, list(E), root=r) if E else EmbeddedTree(g, r)
            edges = sorted(t.edges())
            for perm in itertools.permutations(range(1, n)):
                s = LabelledTree(t, dict(zip(edges, perm)))
                if s.is_valid():
                    out.append(s)
    return out


def eoe_transition_row(state, youngest=False):
    return exact_outcomes(lambda d: _step(state, d, oldest=not youngest), key=lambda s: s.key())


def prt_exact_law(g, n, horizon=200):
    """Law of PRT_n from a stationary start by summing over walk prefixes.

    Returns (law {key: Fraction}, tail) where tail is the probability mass of
    walks that have not seen n vertices within `horizon` steps; every true
    probability lies in [law[k], law[k] + tail].
    """
    s = sum(g.deg)
    # state: (current vertex, root, frozenset labels, frozenset vertices) -> mass
    cur = {}
    law = {}
    for v in range(g.num_vertices):
        key = (v, v, frozenset(), frozenset([v]))
        cur[key] = cur.get(key, 0) + Fraction(g.deg[v], s)
    for _ in range(horizon + 1):
        nxt = {}
        for (v, r, labs, vs), mass in cur.items():
            if len(vs) == n:
                k = (r, labs, vs)
                law[k] = law.get(k, 0) + mass
                continue
            nb = g.nbrs[v]
            p = mass / len(nb)
            for w in nb:
                if w in vs:
                    key = (w, r, labs, vs)
                else:
                    key = (w, r, labs | {(edge_key(v, w), len(vs))}, vs | {w})
                nxt[key] = nxt.get(key, 0) + p
        cur = nxt
    tail = sum(cur.values(), Fraction(0))
    return law, tail
