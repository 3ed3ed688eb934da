"""Exact subtree counting and count-driven samplers.

The rooted subtree polynomial is computed by deletion-contraction on the
edges leaving the contracted root.  A state of the recursion is the set S
of vertices already merged into the root together with the number of
surviving parallel edges from S to each outside vertex; everything else of
the contracted multigraph is the untouched original graph, so states are
memoized on that pair.
"""
import itertools
import sys
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

from .graph import EmbeddedTree
from .randomness import as_draws

DEFAULT_BUDGET = 10 ** 7


class ResourceLimitError(RuntimeError):
    """Raised when an exact computation exceeds its node budget."""


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


def format_polynomial(coeffs, var="x"):
    """Descending terms, e.g. [1, 4, 12, 32] -> '32x^3+12x^2+4x+1'."""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        if k == 0:
            terms.append(str(c))
        else:
            mono = var if k == 1 else "%s^%d" % (var, k)
            terms.append(mono if c == 1 else "%d%s" % (c, mono))
    return "+".join(terms) if terms else "0"


def evaluate(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class RootedCounter:
    """Memoized deletion-contraction for T_r(G) on a multigraph host.

    :param g: Graph (parallel edges allowed)
    :param r: root vertex
    :param budget: maximal number of distinct recursion states
    """

    def __init__(self, g, r, budget=DEFAULT_BUDGET):
        self.g = g
        self.r = r
        self.n = g.num_vertices
        self.budget = budget
        self.A = [[0] * self.n for _ in range(self.n)]
        for (u, v), m in g.multiplicity.items():
            self.A[u][v] = m
            self.A[v][u] = m
        self.memo = {}
        self.start = (1 << r, tuple(self.A[r][v] if v != r else 0 for v in range(self.n)))

    def _children(self, S, m):
        """Lowest outside vertex w reachable from S, and the two child states."""
        for w in range(self.n):
            if m[w]:
                break
        else:
            return None
        S2 = S | (1 << w)
        Aw = self.A[w]
        m2 = tuple(0 if (S2 >> v) & 1 else m[v] + Aw[v] for v in range(self.n))
        m0 = m[:w] + (0,) + m[w + 1:]
        return w, m[w], (S2, m2), (S, m0)

    def poly(self, state=None):
        state = self.start if state is None else state
        got = self.memo.get(state)
        if got is not None:
            return got
        limit = sys.getrecursionlimit()
        if limit < 10 * self.n * self.n + 1000:
            sys.setrecursionlimit(10 * self.n * self.n + 1000)
        return self._poly(state)

    def _poly(self, state):
        memo = self.memo
        got = memo.get(state)
        if got is not None:
            return got
        ch = self._children(*state)
        if ch is None:
            res = (1,)
        else:
            _, mult, con, dele = ch
            a = self._poly(con)
            b = self._poly(dele)
            res = tuple(_padd([0] + [mult * c for c in a], list(b)))
        if len(memo) >= self.budget:
            raise ResourceLimitError(
                "deletion-contraction exceeded %d states (root %d, %d vertices)"
                % (self.budget, self.r, self.n))
        memo[state] = res
        return res

    def count(self, state, k):
        p = self.poly(state)
        return p[k] if 0 <= k < len(p) else 0


@lru_cache(maxsize=32)
def _counter(g, r, budget=DEFAULT_BUDGET):
    return RootedCounter(g, r, budget)


def subtree_polynomial_rooted(g, r, budget=DEFAULT_BUDGET):
    """Coefficient list c with c[k] = number of subtrees with k edges containing r."""
    c = _counter(g, r, budget)
    try:
        return list(c.poly())
    except ResourceLimitError:
        _counter.cache_clear()
        raise


def subtree_polynomial_unrooted(g, budget=DEFAULT_BUDGET):
    """c[k] = number of subtrees of g with k edges (k+1 vertices)."""
    total = [0]
    for r in range(g.num_vertices):
        total = _padd(total, subtree_polynomial_rooted(g, r, budget))
    out = []
    for k, c in enumerate(total):
        q, rem = divmod(c, k + 1)
        if rem:
            raise ArithmeticError("rooted sums not divisible by k+1 at k=%d" % k)
        out.append(q)
    return out


def subtree_counts(g, n, budget=DEFAULT_BUDGET):
    """|T(g, n)| and the per-root counts |T_r(g, n)|."""
    per_root = []
    for r in range(g.num_vertices):
        p = subtree_polynomial_rooted(g, r, budget)
        per_root.append(p[n - 1] if n - 1 < len(p) else 0)
    return sum(per_root) // n, per_root


# forests

def forest_polynomial(g, roots, budget=DEFAULT_BUDGET):
    """{exponent tuple: count} for forests of trees t_j containing roots[j], pairwise disjoint."""
    roots = list(roots)
    if len(set(roots)) != len(roots):
        raise ValueError("roots must be distinct")
    if not roots:
        raise ValueError("at least one root needed")
    n = g.num_vertices
    k = len(roots)
    A = [[0] * n for _ in range(n)]
    for (u, v), m in g.multiplicity.items():
        A[u][v] = m
        A[v][u] = m
    owner = [-1] * n
    for j, r in enumerate(roots):
        owner[r] = j
    M = tuple(tuple(A[r][v] if owner[v] == -1 else 0 for v in range(n)) for r in roots)
    memo = {}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10 * n * n + 1000))

    def rec(owner, M):
        key = (owner, M)
        if key in memo:
            return memo[key]
        pick = None
        for w in range(n):
            if owner[w] == -1:
                for j in range(k):
                    if M[j][w]:
                        pick = (w, j)
                        break
            if pick:
                break
        if pick is None:
            res = {(0,) * k: 1}
        else:
            w, j = pick
            mult = M[j][w]
            # delete
            Md = list(M)
            Md[j] = M[j][:w] + (0,) + M[j][w + 1:]
            res = dict(rec(owner, tuple(Md)))
            # contract w into root group j; edges from other groups to w become unusable
            o2 = owner[:w] + (j,) + owner[w + 1:]
            Mc = []
            for i in range(k):
                row = list(M[i])
                row[w] = 0
                if i == j:
                    for v in range(n):
                        if o2[v] == -1:
                            row[v] += A[w][v]
                Mc.append(tuple(row))
            sub = rec(o2, tuple(Mc))
            for e, c in sub.items():
                e2 = e[:j] + (e[j] + 1,) + e[j + 1:]
                res[e2] = res.get(e2, 0) + mult * c
        if len(memo) >= budget:
            raise ResourceLimitError("forest recursion exceeded %d states" % budget)
        memo[key] = res
        return res

    return rec(tuple(owner), M)


# matrix-tree

def bareiss_det(M):
    """Exact integer determinant (fraction-free elimination)."""
    a = [list(row) for row in M]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def count_spanning_trees(g, vertices=None):
    """Matrix-tree theorem on g (or on the subgraph induced by `vertices`)."""
    vs = sorted(range(g.num_vertices) if vertices is None else vertices)
    idx = {v: i for i, v in enumerate(vs)}
    k = len(vs)
    L = [[0] * k for _ in range(k)]
    for (u, v), m in g.multiplicity.items():
        if u in idx and v in idx:
            i, j = idx[u], idx[v]
            L[i][i] += m
            L[j][j] += m
            L[i][j] -= m
            L[j][i] -= m
    return bareiss_det([row[1:] for row in L[1:]])


def connected_sets(g, max_size, root=None):
    """All connected vertex sets of size <= max_size (containing root if given), as frozensets."""
    starts = [root] if root is not None else range(g.num_vertices)
    found = set()
    for s in starts:
        layer = {frozenset([s])}
        found |= layer
        for _ in range(max_size - 1):
            nxt = set()
            for S in layer:
                for v in S:
                    for w in g.nbrs[v]:
                        if w not in S:
                            T = S | {w}
                            if T not in found:
                                nxt.add(T)
            found |= nxt
            layer = nxt
    return found


def subtree_counts_matrix_tree(g, r=None, max_size=None):
    """Oracle: c[k] summed over connected (k+1)-sets of the spanning-tree count of the induced graph."""
    n = g.num_vertices if max_size is None else max_size
    out = [0] * n
    for S in connected_sets(g, n, r):
        out[len(S) - 1] += count_spanning_trees(g, S)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


# brute force oracle

def enumerate_subtrees(g, n, root=None, cap=10 ** 6):
    """Every subtree with n vertices as (vertex frozenset, edge frozenset).

    Parallel edges are distinguished by a copy index (u, v, i) on multigraphs.
    """
    out = []
    for S in sorted(connected_sets(g, n, root), key=sorted):
        if len(S) != n:
            continue
        if n == 1:
            out.append((S, frozenset()))
            continue
        inner = []
        for (u, v), m in g.multiplicity.items():
            if u in S and v in S:
                inner.extend([(u, v)] if g.is_simple else [(u, v, i) for i in range(m)])
        for comb in itertools.combinations(inner, n - 1):
            if len(out) > cap:
                raise ResourceLimitError("more than %d subtrees" % cap)
            if _is_spanning_tree(S, comb):
                out.append((S, frozenset(comb)))
    return out


def _is_spanning_tree(S, edges):
    parent = {v: v for v in S}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = find(e[0]), find(e[1])
        if a == b:
            return False
        parent[a] = b
    return True


def enumerate_forests(g, roots):
    """Brute-force forest polynomial over all edge subsets (small graphs only)."""
    roots = list(roots)
    edges = []
    for (u, v), m in g.multiplicity.items():
        edges.extend([(u, v)] * m)
    if len(edges) > 22:
        raise ResourceLimitError("too many edges for subset enumeration")
    res = defaultdict(int)
    for mask in range(1 << len(edges)):
        chosen = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        parent = list(range(g.num_vertices))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for u, v in chosen:
            a, b = find(u), find(v)
            if a == b:
                ok = False
                break
            parent[a] = b
        if not ok:
            continue
        comp = {find(r) for r in roots}
        if len(comp) != len(roots):
            continue
        if any(find(u) not in comp for u, v in chosen):
            continue
        exps = tuple(sum(1 for u, v in chosen if find(u) == find(r)) for r in roots)
        res[exps] += 1
    return dict(res)


# samplers driven by counts

def _descend(g, r, choose, budget=DEFAULT_BUDGET):
    """Walk down the recursion from the root state, calling choose(mult, con_state, del_state)."""
    c = _counter(g, r, budget)
    c.poly()
    S, m = c.start
    alive = defaultdict(list)
    for w, mm in g.adjacency[r]:
        alive[w].extend([r] * mm)
    parent = {}
    state = (S, m)
    while True:
        ch = c._children(*state)
        if ch is None:
            break
        w, mult, con, dele = ch
        if choose(c, mult, con, dele):
            parent[w] = alive[w][choose.draws.below(len(alive[w]))]
            alive.pop(w)
            for v, mm in g.adjacency[w]:
                if not (con[0] >> v) & 1:
                    alive[v].extend([w] * mm)
            state = con
        else:
            alive.pop(w, None)
            state = dele
    return EmbeddedTree.from_parents(g, parent, r)


class _SizeChooser:
    def __init__(self, draws, k):
        self.draws = draws
        self.k = k

    def __call__(self, c, mult, con, dele):
        a = mult * c.count(con, self.k - 1)
        b = c.count(dele, self.k)
        if a == 0:
            return False
        if b == 0:
            take = True
        else:
            take = self.draws.pick([Fraction(a, a + b), Fraction(b, a + b)]) == 0
        if take:
            self.k -= 1
        return take


class _BoltzmannChooser:
    def __init__(self, draws, x):
        self.draws = draws
        self.x = x

    def prob(self, c, mult, con, dele):
        """Contraction probability mult x T(con)(x) / (that + T(dele)(x)), cached on the counter."""
        cache = c.__dict__.setdefault("boltzmann", {})
        key = (mult, con, dele, self.x)
        pr = cache.get(key)
        if pr is None:
            a = mult * self.x * evaluate(c.poly(con), self.x)
            b = evaluate(c.poly(dele), self.x)
            pr = cache[key] = Fraction(a) / (a + b)
        return pr

    def __call__(self, c, mult, con, dele):
        return self.draws.uniform() < float(self.prob(c, mult, con, dele))


def exact_sample_rooted(g, r, n, rng=None, budget=DEFAULT_BUDGET):
    """Uniform subtree with n vertices containing r."""
    p = subtree_polynomial_rooted(g, r, budget)
    if n < 1 or n - 1 >= len(p) or p[n - 1] == 0:
        raise ValueError("no subtree of size %d contains vertex %d" % (n, r))
    return _descend(g, r, _SizeChooser(as_draws(rng), n - 1), budget)


def boltzmann_sample(g, r, x, rng=None, budget=DEFAULT_BUDGET):
    """Rooted subtree with probability x^{|E(t)|} / T_r(g)(x)."""
    if x <= 0:
        raise ValueError("x must be positive")
    return _descend(g, r, _BoltzmannChooser(as_draws(rng), x), budget)


def exact_sample_unrooted(g, n, rng=None, budget=DEFAULT_BUDGET):
    """Uniform element of T(g, n): root drawn proportionally to |T_r(g, n)|, then a rooted sample."""
    d = as_draws(rng)
    total, per_root = subtree_counts(g, n, budget)
    if total == 0:
        raise ValueError("no subtree of size %d" % n)
    s = sum(per_root)
    r = d.pick([Fraction(c, s) for c in per_root])
    return exact_sample_rooted(g, r, n, d, budget).unrooted()
