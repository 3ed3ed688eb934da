"""Random subtrees of a fixed tree: leaf evaporations, edge removal, the
subtree polynomial of a tree and monotone coupling from the past."""
import heapq
from fractions import Fraction
from math import comb, factorial

from .graph import EmbeddedTree, Graph, edge_key
from .randomness import as_draws


def as_tree(T, r=None):
    """Accept an EmbeddedTree or a Graph that is itself a tree; return an EmbeddedTree."""
    if isinstance(T, Graph):
        if T.num_edges != T.num_vertices - 1:
            raise ValueError("host graph is not a tree")
        root = 0 if r is None else r
        if T.num_edges == 0:
            return EmbeddedTree(T, root)
        return EmbeddedTree.from_edges(T, T.edges, root=root)
    if r is not None and r != T.root:
        if not T.inside[r]:
            raise ValueError("root %d is not a vertex of the tree" % r)
        return T.as_rooted(r)
    return T.copy()


def _tree_of(host, vertices, parent, r, rooted=True):
    pm = {v: parent[v] for v in vertices if v != r}
    return EmbeddedTree.from_parents(host, pm, r, rooted=rooted)


def _adjacency(T):
    adj = {v: [] for v in T.members}
    for c, p in T.oriented_edges():
        adj[c].append(p)
        adj[p].append(c)
    return adj


# subtree polynomial of a tree

def subtree_polynomial_of_tree(T, r=None, rooted=True):
    """Coefficients c[k] = number of subtrees with k edges (containing r when rooted).

    Root decomposition: P_v = prod over children c of (1 + x P_c).
    """
    T = as_tree(T, r)
    order = []
    stack = [T.anchor]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(T.children(v))
    P = {}
    for v in reversed(order):
        poly = [1]
        for c in T.children(v):
            factor = [1] + P[c]
            out = [0] * (len(poly) + len(factor) - 1)
            for i, a in enumerate(poly):
                if a:
                    for j, b in enumerate(factor):
                        out[i + j] += a * b
            poly = out
        P[v] = poly
    if rooted:
        return P[T.anchor]
    total = [0] * T.size
    for poly in P.values():
        for k, a in enumerate(poly):
            total[k] += a
    while len(total) > 1 and total[-1] == 0:
        total.pop()
    return total


# uniform leaf evaporation

def uniform_leaf_evaporation(T, r, k, rng=None):
    """Remove k uniform leaves one after the other (the root is never a leaf)."""
    t = as_tree(T, r)
    if not 0 <= k <= t.size - 1:
        raise ValueError("k must lie in 0..|T|-1")
    d = as_draws(rng)
    for _ in range(k):
        t.remove_leaf(t.leaves[d.below(len(t.leaves))])
    return t


def _rooted_leaves(adj, S, r):
    return [u for u in S if u != r and sum(1 for w in adj[u] if w in S) == 1]


def uniform_leaf_law(T, r, t):
    """Sum over removal histories of the product of inverse leaf counts (memoized on the vertex set)."""
    T = as_tree(T, r)
    adj = _adjacency(T)
    target = frozenset(t.members if isinstance(t, EmbeddedTree) else t)
    memo = {}

    def rec(S):
        if S == target:
            return Fraction(1)
        if len(S) <= len(target) or not target <= S:
            return Fraction(0)
        if S in memo:
            return memo[S]
        leaves = _rooted_leaves(adj, S, r)
        val = sum((rec(S - {u}) for u in leaves if u not in target), Fraction(0)) / len(leaves)
        memo[S] = val
        return val

    return rec(frozenset(T.members))


# evaporation of the smallest leaf

def tree_edge_weights(T, rng=None):
    """i.i.d. uniform weights on the edges of T, as {edge_key: weight} (distinct a.s.)."""
    d = as_draws(rng)
    while True:
        w = {edge_key(c, p): d.uniform() for c, p in T.oriented_edges()}
        if len(set(w.values())) == len(w):
            return w


def smallest_leaf_evaporation(T, r, n, weights=None, rng=None):
    """Remove the leaf whose edge is lightest among leaf edges until n vertices remain."""
    t = as_tree(T, r)
    if not 1 <= n <= t.size:
        raise ValueError("n must lie in 1..|T|")
    w = tree_edge_weights(t, rng) if weights is None else weights
    heap = [(w[edge_key(v, t.parent[v])], v) for v in t.leaves]
    heapq.heapify(heap)
    while t.size > n:
        _, v = heapq.heappop(heap)
        p = t.parent[v]
        t.remove_leaf(v)
        if t.is_leaf(p):
            heapq.heappush(heap, (w[edge_key(p, t.parent[p])], p))
    return t


def elimination_order(T, r, sigma):
    """Dates of disappearance ell (1..|E|) of the edges under smallest-leaf evaporation driven by sigma."""
    t = as_tree(T, r)
    ell = {}
    k = 0
    heap = [(sigma[edge_key(v, t.parent[v])], v) for v in t.leaves]
    heapq.heapify(heap)
    while heap:
        _, v = heapq.heappop(heap)
        p = t.parent[v]
        k += 1
        ell[edge_key(v, p)] = k
        t.remove_leaf(v)
        if t.is_leaf(p):
            heapq.heappush(heap, (sigma[edge_key(p, t.parent[p])], p))
    return ell


def sigma_compatible(T, r, ell, sigma):
    """Whether sigma maps to ell: each removed edge beats every edge that was a leaf edge at that moment."""
    t = as_tree(T, r)
    for e1 in sorted(ell, key=ell.get):
        for v in t.leaves:
            e2 = edge_key(v, t.parent[v])
            if e2 != e1 and sigma[e1] > sigma[e2]:
                return False
        a, b = e1
        child = a if t.parent[a] == b else b
        if not t.is_leaf(child):
            return False
        t.remove_leaf(child)
    return True


# threshold evaporation

def threshold_evaporation(T, r, w, weights):
    """Strip, recursively, leaves whose edge weight is <= w."""
    t = as_tree(T, r)
    stack = [v for v in t.leaves if weights[edge_key(v, t.parent[v])] <= w]
    while stack:
        v = stack.pop()
        p = t.parent[v]
        t.remove_leaf(v)
        if t.is_leaf(p) and weights[edge_key(p, t.parent[p])] <= w:
            stack.append(p)
    return t


def threshold_law(T, r, t, w):
    """P(T(w) = t) = (1-w)^{#leaves of t} w^{|T - t|} for uniform weights."""
    T = as_tree(T, r)
    vs = set(t.members)
    if r not in vs:
        return Fraction(0)
    w = Fraction(w)
    leaves = sum(1 for v in t.members if v != r and t.degree(v) == 1)
    return (1 - w) ** leaves * w ** (T.size - len(vs))


# election type evaporation

def election_evaporation(T, n, rng=None):
    """Active leaves die after Exp(q) lifetimes, q = 1 + parameters received; stop at n vertices."""
    t = as_tree(T).unrooted()
    N = t.size
    if not 1 <= n <= N:
        raise ValueError("n must lie in 1..|T|")
    d = as_draws(rng)
    adj = _adjacency(t)
    alive = set(t.members)
    deg = {v: len(adj[v]) for v in alive}
    q = {v: 1 for v in alive}
    heap = []
    if N > 1:
        for v in alive:
            if deg[v] == 1:
                heapq.heappush(heap, (d.exponential(q[v]), v))
    while len(alive) > n:
        now, u = heapq.heappop(heap)
        alive.discard(u)
        for v in adj[u]:
            if v in alive:
                q[v] += q[u]
                deg[v] -= 1
                if deg[v] == 1:
                    heapq.heappush(heap, (now + d.exponential(q[v]), v))
    return t_from_vertices(t, alive, rooted=False)


def t_from_vertices(T, vertices, rooted=True, r=None):
    """Subtree of T induced by a connected vertex set."""
    vs = set(vertices)
    start = r if r is not None else min(vs)
    edges = [e for e in T.edges() if e[0] in vs and e[1] in vs]
    if not edges:
        return EmbeddedTree(T.host, start, rooted=rooted)
    if rooted:
        return EmbeddedTree.from_edges(T.host, edges, root=start)
    return EmbeddedTree.from_edges(T.host, edges, vertex=start)


def election_law(T, t):
    """Theorem law for n >= 2: (L-1)! (N-n)! / (L+N-n)! * sum over leaves v of t of |Delta_v|.

    L is the number of leaves of t and Delta_v the part of T hanging at v
    (v included).  For n = 1 the law is uniform over the vertices.
    """
    T = as_tree(T).unrooted()
    N = T.size
    vs = set(t.members if isinstance(t, EmbeddedTree) else t)
    n = len(vs)
    if n == 1:
        return Fraction(1, N)
    adj = _adjacency(T)
    leaves = [v for v in vs if sum(1 for w in adj[v] if w in vs) == 1]
    L = len(leaves)

    def delta(v):
        seen = {v}
        stack = [v]
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if b not in vs and b not in seen:
                    seen.add(b)
                    stack.append(b)
        return len(seen)

    return Fraction(factorial(L - 1) * factorial(N - n), factorial(L + N - n)) * sum(delta(v) for v in leaves)


# uniform edge removal

def uniform_edge_removal(T, r, k, rng=None):
    """Component of r after deleting a uniform k-subset of the edges of T."""
    t = as_tree(T, r)
    E = sorted(t.edges())
    if not 0 <= k <= len(E):
        raise ValueError("k must lie in 0..|E(T)|")
    d = as_draws(rng)
    # partial Fisher-Yates for a uniform k-subset
    idx = list(range(len(E)))
    for i in range(k):
        j = i + d.below(len(E) - i)
        idx[i], idx[j] = idx[j], idx[i]
    return _component_without(t, r, {E[i] for i in idx[:k]})


def edge_threshold_component(T, r, w, weights):
    """T*_r(w): component of r keeping the edges with weight >= w."""
    t = as_tree(T, r)
    return _component_without(t, r, {e for e in t.edges() if weights[e] < w})


def _component_without(t, r, removed):
    adj = _adjacency(t)
    seen = {r}
    parent = {}
    stack = [r]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in seen and edge_key(a, b) not in removed:
                seen.add(b)
                parent[b] = a
                stack.append(b)
    return EmbeddedTree.from_parents(t.host, parent, r)


def _boundary(T, t):
    vs = set(t.members)
    return sum(1 for a, b in T.edges() if (a in vs) != (b in vs))


def edge_threshold_law(T, r, t, w):
    """P(T*_r(w) = t) = w^{|B(t)|} (1-w)^{|E(t)|}."""
    T = as_tree(T, r)
    w = Fraction(w)
    return w ** _boundary(T, t) * (1 - w) ** (t.size - 1)


def edge_removal_law(T, r, t, k):
    """P(T_r(k) = t) = C(|E(T)| - |E(t)| - |B|, k - |B|) / C(|E(T)|, k) when k >= |B|."""
    T = as_tree(T, r)
    B = _boundary(T, t)
    m = T.size - 1
    if k < B:
        return Fraction(0)
    return Fraction(comb(m - (t.size - 1) - B, k - B), comb(m, k))


# monotone coupling from the past

class _Chain:
    """Rooted subtree of a fixed tree as a membership array, for the shared update map."""

    def __init__(self, T, r, cfg):
        self.T = T.as_rooted(r) if T.root != r else T
        self.r = r
        self.N = self.T.size
        if cfg.N < self.N:
            raise ValueError("configuration covers sizes up to %d, tree has %d" % (cfg.N, self.N))
        check_hypothesis_m(cfg, self.N)
        self.cfg = cfg
        self.p = [float(cfg.p(i)) if i else 0.0 for i in range(self.N + 1)]
        self.rr = [float(cfg.r(i)) if i else 0.0 for i in range(self.N + 1)]
        self.parent = self.T.parent
        self.edges = [v for v in self.T.members if v != r]  # an edge is named by its child end
        self.nv = self.T.host.num_vertices

    def bottom(self):
        inside = bytearray(self.nv)
        inside[self.r] = 1
        return [inside, [0] * self.nv, 1]

    def top(self):
        inside = bytearray(self.nv)
        kids = [0] * self.nv
        for v in self.T.members:
            inside[v] = 1
            if v != self.r:
                kids[self.parent[v]] += 1
        return [inside, kids, self.N]

    def apply(self, s, c, v):
        inside, kids, size = s
        p = self.parent[c]
        if v <= self.p[size]:
            if inside[p] and not inside[c]:
                inside[c] = 1
                kids[p] += 1
                s[2] = size + 1
        elif v >= 1 - self.rr[size]:
            if inside[c] and kids[c] == 0:
                inside[c] = 0
                kids[p] -= 1
                s[2] = size - 1

    def to_tree(self, s):
        vs = [v for v in self.T.members if s[0][v]]
        return _tree_of(self.T.host, vs, self.parent, self.r)

    def from_tree(self, t):
        inside = bytearray(self.nv)
        kids = [0] * self.nv
        for v in t.members:
            inside[v] = 1
            if v != self.r:
                kids[self.parent[v]] += 1
        return [inside, kids, t.size]


def check_hypothesis_m(cfg, N):
    """p_1 <= ... <= p_{N-1}, r_2 >= ... >= r_N and r_i > 0 on 2..N; raises ValueError otherwise."""
    ps = [cfg.p(i) for i in range(1, N)]
    rs = [cfg.r(i) for i in range(2, N + 1)]
    if any(a > b for a, b in zip(ps, ps[1:])) or any(a < b for a, b in zip(rs, rs[1:])):
        raise ValueError("configuration violates the monotonicity hypothesis (p non-decreasing, r non-increasing)")
    if any(x <= 0 for x in rs):
        raise ValueError("need r_i > 0 for i = 2..%d" % N)


def update(T, r, cfg, t, e, v):
    """The shared update map f(t, e, v); e is an edge of T, v in [0, 1]."""
    ch = _Chain(as_tree(T, r), r, cfg)
    a, b = e
    c = a if ch.parent[a] == b else b
    s = ch.from_tree(t)
    ch.apply(s, c, v)
    return ch.to_tree(s)


class _Past:
    """Randomness (edge, v) for times -1, -2, ... drawn once and replayed."""

    def __init__(self, ch, draws):
        self.ch = ch
        self.d = draws
        self.e = []
        self.v = []

    def extend(self, s):
        m = len(self.ch.edges)
        while len(self.e) < s:
            self.e.append(self.ch.edges[self.d.below(m)])
            self.v.append(self.d.uniform())

    def run(self, s, audit=False):
        """F_{-s}^{-1} applied to bottom and top; returns the two final states."""
        self.extend(s)
        lo, hi = self.ch.bottom(), self.ch.top()
        for k in range(s - 1, -1, -1):
            c, v = self.e[k], self.v[k]
            self.ch.apply(lo, c, v)
            self.ch.apply(hi, c, v)
            if audit and any(x and not y for x, y in zip(lo[0], hi[0])):
                raise AssertionError("monotonicity broken at time -%d" % (k + 1))
        return lo, hi


def cftp_subtree(T, r, cfg, rng=None, iterate=2, max_time=2 ** 40, audit=False):
    """Exact draw from the invariant law of the rooted birth-death kernel on subtrees of T containing r.

    Starts at time -1 and multiplies the horizon by `iterate` until the chains
    from {r} and from T agree at time 0.  The result carries `.horizon`.
    """
    T = as_tree(T, r)
    ch = _Chain(T, r, cfg)
    if ch.N == 1:
        t = EmbeddedTree(T.host, r)
        t.horizon = 0
        return t
    past = _Past(ch, as_draws(rng))
    s = 1
    while True:
        lo, hi = past.run(s, audit)
        if lo[2] == hi[2]:
            t = ch.to_tree(lo)
            t.horizon = s
            return t
        s *= iterate
        if s > max_time:
            raise RuntimeError("no coalescence from time -%d" % (s // iterate))


def forward_coupling_time(T, r, cfg, rng=None, max_steps=10 ** 9):
    """First s with F_0^s(bottom) = F_0^s(top)."""
    T = as_tree(T, r)
    ch = _Chain(T, r, cfg)
    d = as_draws(rng)
    lo, hi = ch.bottom(), ch.top()
    m = len(ch.edges)
    s = 0
    while lo[2] != hi[2]:
        c = ch.edges[d.below(m)]
        v = d.uniform()
        ch.apply(lo, c, v)
        ch.apply(hi, c, v)
        s += 1
        if s > max_steps:
            raise RuntimeError("no coalescence within %d steps" % max_steps)
    return s


def backward_coupling_time(T, r, cfg, rng=None, max_time=2 ** 40):
    """Smallest s with F_{-s}^0(bottom) = F_{-s}^0(top) (doubling, then bisection)."""
    T = as_tree(T, r)
    ch = _Chain(T, r, cfg)
    if ch.N == 1:
        return 0
    past = _Past(ch, as_draws(rng))

    def ok(s):
        lo, hi = past.run(s)
        return lo[2] == hi[2]

    s = 1
    while not ok(s):
        s *= 2
        if s > max_time:
            raise RuntimeError("no coalescence from time -%d" % (s // 2))
    a, b = s // 2, s  # ok(b), not ok(a) (a = 0 means nothing run)
    while b - a > 1:
        mid = (a + b) // 2
        if ok(mid):
            b = mid
        else:
            a = mid
    return b


def cftp_law(T, r, cfg):
    """Exact target law {vertex frozenset: Fraction} of the rooted kernel on subtrees of T."""
    from .enumeration import enumerate_subtrees
    from .variable_size import invariant_measure
    T = as_tree(T, r)
    h = tree_host(T)
    nu = invariant_measure(cfg, "rooted")
    w = {}
    for n in range(1, T.size + 1):
        for V, _ in enumerate_subtrees(h, n, r):
            w[V] = Fraction(nu[n])
    z = sum(w.values())
    return {k: x / z for k, x in w.items()}


def tree_host(T):
    """The tree T as a stand-alone host graph (same vertex ids)."""
    return Graph(T.host.num_vertices, sorted(T.edges()), kind=("tree",))


# coupling time bounds

def leaf_perimeter_extremes(T, r):
    """For each size k: min number of leaves and max number of perimeter sites over rooted subtrees."""
    from .enumeration import enumerate_subtrees
    T = as_tree(T, r)
    h = tree_host(T)
    adj = _adjacency(T)
    lmin, pmax = {}, {}
    for k in range(1, T.size + 1):
        for V, _ in enumerate_subtrees(h, k, r, cap=10 ** 7):
            leaves = sum(1 for v in V if v != r and sum(1 for w in adj[v] if w in V) == 1)
            per = len({w for v in V for w in adj[v] if w not in V})
            lmin[k] = min(lmin.get(k, leaves), leaves)
            pmax[k] = max(pmax.get(k, per), per)
    return lmin, pmax


def _check_bound_hypothesis(T, r, cfg, c):
    T = as_tree(T, r)
    N = T.size
    check_hypothesis_m(cfg, N)
    lmin, pmax = leaf_perimeter_extremes(T, r)
    for i in range(2, N):
        if pmax[i] and Fraction(cfg.p(i)) / Fraction(cfg.r(i)) > Fraction(c) * lmin[i] / pmax[i]:
            raise ValueError("p_%d/r_%d exceeds c * V_leaf(%d)/V_perimeter(%d)" % (i, i, i, i))
    return lmin, pmax


def coupling_time_bound_general(T, r, cfg, c):
    """(N-1) sum_{j=2}^N (j-1)/(r_j V_leaf(j)) (c^{j-1}-1)/(c-1)."""
    T = as_tree(T, r)
    lmin, _ = _check_bound_hypothesis(T, r, cfg, c)
    N = T.size
    c = float(c)
    tot = 0.0
    for j in range(2, N + 1):
        geo = (j - 1) if c == 1 else (c ** (j - 1) - 1) / (c - 1)
        tot += (j - 1) / (float(cfg.r(j)) * lmin[j]) * geo
    return (N - 1) * tot


def coupling_time_bound(d, h, cfg, c, check=True):
    """Closed form for the complete d-ary tree of height h:
    (1/(r_N (c-1))) (d/(d-1)) ((c - c^N)/(1-c) - (N-1))."""
    from .graph import dary_tree
    if d < 2:
        raise ValueError("d must be at least 2")
    N = (d ** (h + 1) - 1) // (d - 1)
    if check:
        _check_bound_hypothesis(dary_tree(d, h), 0, cfg, c)
    rN = float(cfg.r(N))
    c = float(c)
    if c == 1:
        raise ValueError("the closed form needs c != 1")
    return 1.0 / (rN * (c - 1)) * d / (d - 1) * ((c - c ** N) / (1 - c) - (N - 1))


def coupling_time_bound_sum(d, h, rN, c):
    """The same bound written as d/((d-1) r_N) * sum_{j=2}^N (c^{j-1}-1)/(c-1)."""
    N = (d ** (h + 1) - 1) // (d - 1)
    return d / ((d - 1) * rN) * sum(sum(c ** i for i in range(j - 1)) for j in range(2, N + 1))
