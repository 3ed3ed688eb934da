"""Growth and extraction models: outgoing-edge clusters, size-biased forests,
DLA-type trees, Prim/Kruskal components, first passage percolation and UST
edge evaporation.  Exact laws for small hosts sit next to each sampler."""
import heapq
import itertools
from collections import deque
from fractions import Fraction
from math import factorial

import numpy as np

from .enumeration import count_spanning_trees
from .graph import EmbeddedTree, Graph, edge_key
from .randomness import as_draws
from .spanning import wilson


def _vertex_set(t):
    if isinstance(t, EmbeddedTree):
        return set(t.members)
    return set(t[0])


def _edge_set(t):
    if isinstance(t, EmbeddedTree):
        return t.edges()
    return {edge_key(*e[:2]) for e in t[1]}


def perimeter(g, vs):
    """Vertices outside vs with a neighbour in vs."""
    out = set()
    for v in vs:
        for w in g.nbrs[v]:
            if w not in vs:
                out.add(w)
    return out


def _tree_from_arrows(g, r, arrow):
    """r's component of the functional graph u -> arrow[u] (arrow -1 means no edge)."""
    kids = {}
    for u, a in enumerate(arrow):
        if a >= 0:
            kids.setdefault(a, []).append(u)
    parent = {}
    q = deque([r])
    while q:
        v = q.popleft()
        for u in kids.get(v, ()):
            if u != r and u not in parent:
                parent[u] = v
                q.append(u)
    return EmbeddedTree.from_parents(g, parent, r)


# one outgoing edge per node and its Bernoulli thinning

def one_edge_per_node(g, r, rng=None):
    """Each u != r points to a uniform neighbour; return the component of r."""
    return bernoulli_outgoing(g, r, 1, rng)


def bernoulli_outgoing(g, r, q, rng=None):
    """Like one_edge_per_node, but each u != r keeps its arrow only with probability q."""
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    g.require_simple()
    d = as_draws(rng)
    arrow = [-1] * g.num_vertices
    for u in range(g.num_vertices):
        if u == r:
            continue
        if q < 1 and d.uniform() >= q:
            continue
        nb = g.nbrs[u]
        arrow[u] = nb[d.below(len(nb))]
    return _tree_from_arrows(g, r, arrow)


def am_law(g, r, q, t):
    """Exact P(component of r = t) for the thinned model; q = 1 gives zm_law."""
    q = Fraction(q)
    vs = _vertex_set(t)
    if r not in vs:
        return Fraction(0)
    p = Fraction(1)
    if isinstance(t, EmbeddedTree):
        par = (t if t.root == r else t.as_rooted(r)).parent
        for v in vs:
            if v != r:
                p *= q * g.multiplicity[edge_key(v, par[v])] / g.deg[v]
    else:
        for v in vs:
            if v != r:
                p *= q / g.deg[v]
    for w in perimeter(g, vs):
        away = sum(m for x, m in g.adjacency[w] if x not in vs)
        p *= (1 - q) + q * Fraction(away, g.deg[w])
    return p


def zm_law(g, r, t):
    return am_law(g, r, 1, t)


# size-biased forest through the apex graph

def apex_graph(g):
    """G plus a vertex z = |V| joined to every vertex."""
    z = g.num_vertices
    edges = [(u, v, m) for (u, v), m in g.multiplicity.items()]
    return Graph(z + 1, edges + [(v, z) for v in range(z)])


def _apex_wilson(g, p, d):
    """Wilson on G + z rooted at z; from v the walk jumps to z w.p. p (None: uniform on G+z)."""
    n = g.num_vertices
    z = n
    in_tree = bytearray(n + 1)
    in_tree[z] = 1
    nxt = [-1] * (n + 1)
    for s in range(n):
        u = s
        while not in_tree[u]:
            nb = g.nbrs[u]
            if p is None:
                k = d.below(len(nb) + 1)
                w = z if k == len(nb) else nb[k]
            elif d.uniform() < p:
                w = z
            else:
                w = nb[d.below(len(nb))]
            nxt[u] = w
            u = w
        u = s
        while not in_tree[u]:
            in_tree[u] = 1
            u = nxt[u]
    return nxt


def size_biased_component(g, r, z_bias=None, condition=None, rng=None, max_tries=10 ** 5):
    """Tree of r in the forest left by a spanning tree of G + z after deleting z.

    z_bias: None for the uniform spanning tree of G + z, else the probability p
    of jumping to z.  condition: optional dict with 'indegree' (number of trees
    minus one) and/or 'size' = (lo, hi); samples are rejected until both hold.
    The returned tree carries `.attempts` and `.num_trees`.
    """
    g.require_simple()
    if z_bias is not None and not 0 < z_bias <= 1:
        raise ValueError("z_bias must lie in (0, 1]")
    d = as_draws(rng)
    cond = condition or {}
    D = cond.get("indegree")
    lo, hi = cond.get("size", (1, g.num_vertices))
    z = g.num_vertices
    for attempt in range(1, max_tries + 1):
        nxt = _apex_wilson(g, z_bias, d)
        k = sum(1 for v in range(z) if nxt[v] == z)
        if D is not None and k - 1 != D:
            continue
        arrow = [a if a != z else -1 for a in nxt[:z]]
        # re-hang r's tree from r: its component is found through undirected adjacency
        comp = _component(g, arrow, r)
        if not lo <= len(comp[0]) <= hi:
            continue
        t = EmbeddedTree.from_edges(g, comp[1], root=r) if comp[1] else EmbeddedTree(g, r)
        t.attempts = attempt
        t.num_trees = k
        return t
    raise RuntimeError("size-biased forest condition not met after %d attempts" % max_tries)


def _component(g, arrow, r):
    adj = {}
    for u, a in enumerate(arrow):
        if a >= 0:
            adj.setdefault(u, []).append(a)
            adj.setdefault(a, []).append(u)
    seen = {r}
    edges = []
    q = deque([r])
    while q:
        v = q.popleft()
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                edges.append(edge_key(v, w))
                q.append(w)
    return seen, edges


def sbf_law(g, r, t):
    """Exact P(tree of r = t) for the unbiased size-biased forest: |t| tau(G' - t) / tau(G')."""
    vs = _vertex_set(t)
    if r not in vs:
        return Fraction(0)
    gp = apex_graph(g)
    rest = [v for v in range(gp.num_vertices) if v not in vs]
    return Fraction(len(vs) * count_spanning_trees(gp, rest), count_spanning_trees(gp))


# subtrees extracted from a uniform spanning tree

def tree_as_graph(t):
    """The tree t as a host graph on the same vertex ids."""
    return Graph(t.host.num_vertices, sorted(t.edges()), kind=("tree",))


def uniform_subtree_of_ust(g, r, cfg, rng=None, steps=None):
    """UST of g rooted at r, then a nu-weighted rooted subtree of it.

    Uses coupling from the past when cfg satisfies the monotonicity hypothesis
    and `steps` is None, else runs the rooted birth-death kernel for `steps`
    steps from {r}.
    """
    from .evaporation import cftp_subtree
    from .variable_size import run_variable
    d = as_draws(rng)
    T = wilson(g, r, d)
    h = tree_as_graph(T)
    if steps is None:
        s = cftp_subtree(h, r, cfg, d)
    else:
        s = run_variable("kernelDr", EmbeddedTree(h, r), cfg, steps, d, root=r)
    out = EmbeddedTree.from_edges(g, sorted(s.edges()), root=r) if s.size > 1 else EmbeddedTree(g, r)
    out.ust = T
    return out


def ust_edge_evaporation(g_or_tree, r, n, rng=None):
    """Cut outgoing edges of i.i.d. uniform non-root vertices until r's tree has < n vertices.

    The input is a host graph (a UST rooted at r is drawn first) or a spanning
    tree.  The result carries `.removals`, the number of draws used.
    """
    d = as_draws(rng)
    if isinstance(g_or_tree, Graph):
        g = g_or_tree
        T = wilson(g, r, d)
    else:
        T = g_or_tree.as_rooted(r)
        g = T.host
    N = g.num_vertices
    if T.size != N:
        raise ValueError("need a spanning tree")
    if n <= 1:
        raise ValueError("target size must exceed 1")
    if N == 1:
        raise ValueError("a one-vertex host has no edge to remove")
    parent = T.parent
    kids = [[] for _ in range(N)]
    for v in range(N):
        if parent[v] >= 0:
            kids[parent[v]].append(v)
    cut = bytearray(N)
    out = bytearray(N)  # no longer connected to r
    size = N
    removals = 0
    while size >= n:
        k = d.below(N - 1)
        u = k if k < r else k + 1
        removals += 1
        if cut[u]:
            continue
        cut[u] = 1
        if out[u]:
            continue
        stack = [u]
        out[u] = 1
        while stack:
            a = stack.pop()
            size -= 1
            for b in kids[a]:
                if not cut[b] and not out[b]:
                    out[b] = 1
                    stack.append(b)
    pm = {v: parent[v] for v in range(N) if v != r and not out[v]}
    t = EmbeddedTree.from_parents(g, pm, r)
    t.removals = removals
    return t


def ust_single_removal_law(g, r, t):
    """P(r's tree after one removal = t) = tau(G[V - t]) |boundary edges| / (tau(G) (|V| - 1))."""
    vs = _vertex_set(t)
    N = g.num_vertices
    if r not in vs or len(vs) == N:
        return Fraction(0)
    rest = [v for v in range(N) if v not in vs]
    bd = sum(m for (u, v), m in g.multiplicity.items() if (u in vs) != (v in vs))
    return Fraction(count_spanning_trees(g, rest) * bd, count_spanning_trees(g) * (N - 1))


# DLA-type trees

def _square_step(g, v, d):
    """Walk on a grid host with mirror reflection at the sides."""
    W, H = g.kind[1], g.kind[2]
    x, y = v % W, v // W
    k = d.below(4)
    if k == 0:
        x = x + 1 if x + 1 < W else x - 1
    elif k == 1:
        x = x - 1 if x > 0 else x + 1
    elif k == 2:
        y = y + 1 if y + 1 < H else y - 1
    else:
        y = y - 1 if y > 0 else y + 1
    return y * W + x


def tdla(g, r, n, rng=None, walk="uniform-start", max_walkers=None):
    """DLA tree on a finite host: walkers from uniform vertices stick by their hitting step.

    walk='uniform-start' uses the simple walk on g; 'reflected-square' needs a
    grid host and reflects steps that would leave the square.
    """
    if not 1 <= n <= g.num_vertices:
        raise ValueError("n must lie in 1..|V|")
    if walk == "reflected-square":
        if g.kind is None or g.kind[0] != "grid" or min(g.kind[1], g.kind[2]) < 2:
            raise ValueError("the square walk needs a grid host with sides >= 2")
        step = _square_step
    elif walk == "uniform-start":
        def step(h, v, dd):
            nb = h.nbrs[v]
            return nb[dd.below(len(nb))]
    else:
        raise ValueError("unknown walk %r" % walk)
    d = as_draws(rng)
    t = EmbeddedTree(g, r)
    cap = max_walkers or 1000 * g.num_vertices * n + 10 ** 6
    walkers = 0
    while t.size < n:
        walkers += 1
        if walkers > cap:
            raise RuntimeError("DLA exceeded %d walkers" % cap)
        v = d.below(g.num_vertices)
        if t.inside[v]:
            continue
        while True:
            w = step(g, v, d)
            if t.inside[w]:
                t.add_leaf(v, w)
                break
            v = w
    return t


def idla_tree(g, r, n, rng=None):
    """Internal DLA tree: walkers from r add the first step that leaves the current tree."""
    if not 1 <= n <= g.num_vertices:
        raise ValueError("n must lie in 1..|V|")
    d = as_draws(rng)
    t = EmbeddedTree(g, r)
    while t.size < n:
        v = r
        while True:
            nb = g.nbrs[v]
            w = nb[d.below(len(nb))]
            if not t.inside[w]:
                t.add_leaf(w, v)
                break
            v = w
    return t


# weighted constructions

def assign_weights(g, law="uniform", rng=None):
    """i.i.d. edge weights indexed like g.edges; 'uniform' on (0,1) or 'invexp5' = 1/E^5."""
    gen = as_draws(rng)
    gen = gen.gen if hasattr(gen, "gen") else np.random.default_rng()
    m = len(g.edges)
    while True:
        if law == "uniform":
            w = gen.random(m)
        elif law == "invexp5":
            w = 1.0 / gen.exponential(1.0, m) ** 5
        else:
            raise ValueError("unknown weight law %r" % law)
        if len(np.unique(w)) == m:
            return w


def _weight_of(g, weights):
    if isinstance(weights, dict):
        return lambda u, v: weights[edge_key(u, v)]
    w = np.asarray(weights)
    return lambda u, v: w[g.edge_id[edge_key(u, v)]]


def prim_component(g, r, n, weights):
    """Grow from r by the lightest edge leaving the current tree, until n vertices."""
    if not 1 <= n <= g.num_vertices:
        raise ValueError("n must lie in 1..|V|")
    wt = _weight_of(g, weights)
    t = EmbeddedTree(g, r)
    heap = [(wt(r, x), g.edge_id[edge_key(r, x)], r, x) for x in g.nbrs[r]]
    heapq.heapify(heap)
    while t.size < n:
        _, _, u, v = heapq.heappop(heap)
        if t.inside[v]:
            continue
        t.add_leaf(v, u)
        for x in g.nbrs[v]:
            if not t.inside[x]:
                heapq.heappush(heap, (wt(v, x), g.edge_id[edge_key(v, x)], v, x))
    return t


def _kruskal_once(g, r, n, order):
    N = g.num_vertices
    uf = list(range(N))
    sz = [1] * N

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    added = []
    if n <= 1:
        return [], 1
    for k in order:
        u, v = g.edges[k]
        a, b = find(u), find(v)
        if a == b:
            continue
        if sz[a] < sz[b]:
            a, b = b, a
        uf[b] = a
        sz[a] += sz[b]
        added.append((u, v))
        if find(r) == a and sz[a] >= n:
            break
    root = find(r)
    return [e for e in added if find(e[0]) == root], sz[root]


def kruskal_component(g, r, n, window_eps=None, rng=None, weights=None, max_tries=10 ** 4):
    """Component of r in Kruskal's forest when it first has at least n vertices.

    With window_eps the weights are redrawn until the size lies in
    [n, n (1 + window_eps)].  The tree carries `.attempts`.
    """
    if not 1 <= n <= g.num_vertices:
        raise ValueError("n must lie in 1..|V|")
    d = as_draws(rng)
    hi = g.num_vertices if window_eps is None else n * (1 + window_eps)
    for attempt in range(1, max_tries + 1):
        w = weights if (weights is not None and attempt == 1) else assign_weights(g, "uniform", d)
        order = np.argsort(np.asarray(w), kind="stable")
        edges, size = _kruskal_once(g, r, n, order)
        if size <= hi:
            t = EmbeddedTree.from_edges(g, edges, root=r) if edges else EmbeddedTree(g, r)
            t.attempts = attempt
            return t
        if weights is not None and window_eps is not None:
            raise RuntimeError("fixed weights give size %d outside the window" % size)
    raise RuntimeError("Kruskal window not hit after %d attempts" % max_tries)


def kruskal_law(g, r, n, t):
    """Exact P(Kruskal component = t) as the fraction of admissible relative orders.

    Only tree, perimeter and cyclic edges are constrained; edges of the
    neighbourhood graph joining two outside vertices drop out of the ratio.
    """
    vs = _vertex_set(t)
    E = sorted(_edge_set(t))
    if r not in vs or len(vs) < n:
        return Fraction(0)
    if len(vs) == 1:
        return Fraction(1) if n <= 1 else Fraction(0)
    tree = EmbeddedTree.from_edges(g, E, root=r)
    per, cyc = [], []
    for (u, v) in g.edges:
        if (u, v) in tree.edges():
            continue
        if u in vs and v in vs:
            path = tree.tree_path(u, v)
            cyc.append(((u, v), [edge_key(path[i], path[i + 1]) for i in range(len(path) - 1)]))
        elif u in vs or v in vs:
            per.append((u, v))
    items = E + per + [c for c, _ in cyc]
    if len(items) > 11:
        raise ValueError("too many constrained edges for permutation counting")
    pos = {e: i for i, e in enumerate(items)}
    below = {}
    for a, b in E:
        below[(a, b)] = len(tree.subtree_vertices(a if tree.parent[a] == b else b))
    good = 0
    for perm in itertools.permutations(range(len(items))):
        s = {e: perm[pos[e]] for e in items}
        top = max(s[e] for e in E)
        if per and min(s[f] for f in per) < top:
            continue
        if any(s[c] < max(s[f] for f in path) for c, path in cyc):
            continue
        last = max(E, key=s.get)
        if len(vs) - below[last] >= n:
            continue
        good += 1
    return Fraction(good, factorial(len(items)))


def fpp_tree(g, r, n, weight_law="uniform", rng=None, weights=None):
    """Union of the minimal-weight paths from r to the n closest vertices (r included)."""
    if not 1 <= n <= g.num_vertices:
        raise ValueError("n must lie in 1..|V|")
    w = assign_weights(g, weight_law, rng) if weights is None else weights
    wt = _weight_of(g, w)
    dist = {r: 0.0}
    done = set()
    parent = {}
    heap = [(0.0, r, -1)]
    while heap and len(done) < n:
        dv, v, p = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if p >= 0:
            parent[v] = p
        for x in g.nbrs[v]:
            if x in done:
                continue
            nd = dv + wt(v, x)
            if nd < dist.get(x, float("inf")):
                dist[x] = nd
                heapq.heappush(heap, (nd, x, v))
    t = EmbeddedTree.from_parents(g, parent, r)
    t.dist = {v: dist[v] for v in done}
    return t
