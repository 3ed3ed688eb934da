"""Host graphs, generators and the mutable embedded subtree."""
from collections import deque

import numpy as np


class Graph:
    """Undirected multigraph on vertices 0..n-1 (no loops).

    :param num_vertices: number of vertices
    :param edges: iterable of (u, v) or (u, v, mult); repeated pairs add up
    :param kind: optional generator tag, e.g. ("torus", N) or ("grid", W, H)
    """

    def __init__(self, num_vertices, edges=(), kind=None):
        if num_vertices < 1:
            raise ValueError("a graph needs at least one vertex")
        self.num_vertices = int(num_vertices)
        self.kind = kind
        mult = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            m = int(e[2]) if len(e) > 2 else 1
            if u == v:
                raise ValueError("loop at vertex %d" % u)
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError("edge (%d, %d) out of range" % (u, v))
            if m < 1:
                raise ValueError("multiplicity must be >= 1")
            key = (u, v) if u < v else (v, u)
            mult[key] = mult.get(key, 0) + m
        self.multiplicity = mult
        self.edges = sorted(mult)
        self.edge_id = {e: i for i, e in enumerate(self.edges)}
        adj = [[] for _ in range(num_vertices)]
        for (u, v) in self.edges:
            m = mult[(u, v)]
            adj[u].append((v, m))
            adj[v].append((u, m))
        for a in adj:
            a.sort()
        self.adjacency = adj
        self.nbrs = [[w for w, _ in a] for a in adj]
        self.deg = [sum(m for _, m in a) for a in adj]
        self.num_edges = sum(mult.values())
        self.directed_edge_count = 2 * self.num_edges
        self.is_simple = all(m == 1 for m in mult.values())

    def __repr__(self):
        return "Graph(n=%d, |E|=%d, kind=%r)" % (self.num_vertices, self.num_edges, self.kind)

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.num_vertices == other.num_vertices
                and self.multiplicity == other.multiplicity)

    def __hash__(self):
        return hash((self.num_vertices, tuple(sorted(self.multiplicity.items()))))

    def has_edge(self, u, v):
        return ((u, v) if u < v else (v, u)) in self.multiplicity

    def is_regular(self):
        return len(set(self.deg)) == 1

    def is_connected(self):
        seen = bfs_order(self, 0)
        return len(seen) == self.num_vertices

    def require_simple(self):
        if not self.is_simple:
            raise ValueError("sampling kernels need a simple host graph (found parallel edges)")

    def oriented_edges(self):
        out = []
        for (u, v) in self.edges:
            out.append((u, v))
            out.append((v, u))
        return out

    def neighbor_array(self):
        """Padded (n, maxdeg) neighbor table plus degree vector, for compiled loops."""
        n = self.num_vertices
        dmax = max(len(a) for a in self.nbrs) if n else 0
        tab = np.full((n, max(dmax, 1)), -1, dtype=np.int64)
        for v, a in enumerate(self.nbrs):
            tab[v, :len(a)] = a
        return tab, np.array([len(a) for a in self.nbrs], dtype=np.int64)

    def coords(self, v):
        """Planar coordinates (x, y) for torus and grid hosts."""
        if self.kind is None or self.kind[0] not in ("torus", "grid"):
            raise ValueError("host has no planar embedding")
        w = self.kind[1]
        return v % w, v // w

    def vertex_at(self, x, y):
        if self.kind[0] == "torus":
            N = self.kind[1]
            return (y % N) * N + (x % N)
        return y * self.kind[1] + x

    def to_text(self):
        lines = ["graph %d" % self.num_vertices]
        for (u, v) in self.edges:
            m = self.multiplicity[(u, v)]
            lines.append("e %d %d" % (u, v) if m == 1 else "e %d %d %d" % (u, v, m))
        return "\n".join(lines) + "\n"


def bfs_order(g, s, allowed=None):
    seen = {s}
    q = deque([s])
    order = []
    while q:
        v = q.popleft()
        order.append(v)
        for w in g.nbrs[v]:
            if w not in seen and (allowed is None or w in allowed):
                seen.add(w)
                q.append(w)
    return order


# generators

def torus(N):
    """Torus(N): (Z/NZ)^2 with edges (x,y)-(x,y+1) and (x,y)-(x+1,y), row-major ids.

    N=2 gives multiplicity-2 edges, N=1 a single vertex (loops dropped).
    """
    if N < 1:
        raise ValueError("torus side must be positive")
    edges = []
    for y in range(N):
        for x in range(N):
            v = y * N + x
            for w in (((y + 1) % N) * N + x, y * N + (x + 1) % N):
                if w != v:
                    edges.append((v, w))
    return Graph(N * N, edges, kind=("torus", N))


def grid(W, H):
    if W < 1 or H < 1:
        raise ValueError("grid sides must be positive")
    edges = []
    for y in range(H):
        for x in range(W):
            v = y * W + x
            if x + 1 < W:
                edges.append((v, v + 1))
            if y + 1 < H:
                edges.append((v, v + W))
    return Graph(W * H, edges, kind=("grid", W, H))


def complete(N):
    if N < 1:
        raise ValueError("complete graph needs N >= 1")
    return Graph(N, [(i, j) for i in range(N) for j in range(i + 1, N)], kind=("complete", N))


def line(N):
    if N < 1:
        raise ValueError("line needs N >= 1")
    return Graph(N, [(i, i + 1) for i in range(N - 1)], kind=("line", N))


def cycle(N):
    if N < 3:
        raise ValueError("cycle needs N >= 3")
    return Graph(N, [(i, (i + 1) % N) for i in range(N)], kind=("cycle", N))


def ladder_line(m1, m2):
    """A path of m1 vertices whose end is attached to a ladder (scale) with m2 rungs.

    Vertices 0..m1-1 form the line; the ladder rails are m1.. and m1+m2..;
    the line's last vertex is joined to the first vertex of the lower rail.
    """
    if m1 < 1 or m2 < 1:
        raise ValueError("ladder-line parameters must be positive")
    edges = [(i, i + 1) for i in range(m1 - 1)]
    lo = [m1 + j for j in range(m2)]
    hi = [m1 + m2 + j for j in range(m2)]
    for j in range(m2):
        edges.append((lo[j], hi[j]))
        if j + 1 < m2:
            edges.append((lo[j], lo[j + 1]))
            edges.append((hi[j], hi[j + 1]))
    edges.append((m1 - 1, lo[0]))
    return Graph(m1 + 2 * m2, edges, kind=("ladderline", m1, m2))


def dary_tree(d, h):
    """Complete d-ary tree of height h, root 0, children of v are d*v+1..d*v+d."""
    if d < 1 or h < 0:
        raise ValueError("d-ary tree needs d >= 1 and h >= 0")
    n = sum(d ** k for k in range(h + 1))
    edges = [(v, (v - 1) // d) for v in range(1, n)]
    return Graph(n, edges, kind=("dary", d, h))


def generate(spec):
    """Build a graph from a generator string such as 'torus:3' or 'grid:4x3'."""
    try:
        kind, arg = spec.split(":", 1)
        if kind == "torus":
            return torus(int(arg))
        if kind == "grid":
            w, h = arg.lower().split("x")
            return grid(int(w), int(h))
        if kind == "complete":
            return complete(int(arg))
        if kind == "line":
            return line(int(arg))
        if kind == "cycle":
            return cycle(int(arg))
        if kind == "ladderline":
            a, b = arg.split(",")
            return ladder_line(int(a), int(b))
        if kind == "dary":
            a, b = arg.split(",")
            return dary_tree(int(a), int(b))
    except ValueError as err:
        raise ValueError("bad generator spec %r: %s" % (spec, err)) from None
    raise ValueError("unknown generator %r" % spec)


def spec_of(g):
    """Inverse of generate for generated hosts, None otherwise."""
    k = g.kind
    if k is None:
        return None
    if k[0] == "grid":
        return "grid:%dx%d" % (k[1], k[2])
    if k[0] in ("ladderline", "dary"):
        return "%s:%d,%d" % k
    return "%s:%d" % k


def parse_graph(text):
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0][0] != "graph" or len(lines[0]) != 2:
        raise ValueError("graph text must start with 'graph <num_vertices>'")
    n = int(lines[0][1])
    edges = []
    for parts in lines[1:]:
        if parts[0] != "e" or len(parts) not in (3, 4):
            raise ValueError("bad edge line: %s" % " ".join(parts))
        edges.append(tuple(int(p) for p in parts[1:]))
    return Graph(n, edges)


def edge_key(u, v):
    return (u, v) if u < v else (v, u)


def check_tree(host, edges, vertex=None):
    """True iff `edges` is a connected acyclic edge set of host.

    An empty edge set is a tree when a designated vertex is given.
    """
    edges = [edge_key(*e) for e in edges]
    if len(set(edges)) != len(edges):
        return False
    if not edges:
        return vertex is not None
    adj = {}
    for u, v in edges:
        if not host.has_edge(u, v):
            return False
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if vertex is not None and vertex not in adj:
        return False
    if len(adj) != len(edges) + 1:
        return False
    s = next(iter(adj))
    seen = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


class EmbeddedTree:
    """Subtree of a host graph with parent pointers and an explicit leaf set.

    Unrooted trees still keep an internal anchor so that parent pointers
    make sense; `root` is None for them.  Members sit in an array with
    swap-remove so a uniform member draw is O(1); leaves likewise.
    """

    def __init__(self, host, start, rooted=True):
        n = host.num_vertices
        self.host = host
        self.rooted = rooted
        self.anchor = start
        self.parent = [-1] * n
        self.inside = bytearray(n)
        self.nchild = [0] * n
        self.members = []
        self._pos = [-1] * n
        self.leaves = []
        self._lpos = [-1] * n
        self._insert(start)

    # construction helpers
    @classmethod
    def from_edges(cls, host, edges, root=None, vertex=None):
        """Tree from an edge list; rooted at `root` if given, else unrooted."""
        edges = [edge_key(*e) for e in edges]
        start = root if root is not None else (vertex if vertex is not None else
                                                 (min(edges[0]) if edges else None))
        if start is None:
            raise ValueError("an empty tree needs a vertex")
        if not check_tree(host, edges, start):
            raise ValueError("edges do not form a subtree containing %d" % start)
        t = cls(host, start, rooted=root is not None)
        adj = {}
        for u, v in edges:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        q = deque([start])
        while q:
            v = q.popleft()
            for w in sorted(adj.get(v, ())):
                if not t.inside[w]:
                    t.add_leaf(w, v)
                    q.append(w)
        return t

    @classmethod
    def from_parents(cls, host, parent_map, root, rooted=True):
        """parent_map: child -> parent, all oriented toward root."""
        t = cls(host, root, rooted=rooted)
        kids = {}
        for c, p in parent_map.items():
            kids.setdefault(p, []).append(c)
        q = deque([root])
        while q:
            v = q.popleft()
            for w in sorted(kids.get(v, ())):
                t.add_leaf(w, v)
                q.append(w)
        if t.size != len(parent_map) + 1:
            raise ValueError("parent map is not a tree hanging from the root")
        return t

    @property
    def root(self):
        return self.anchor if self.rooted else None

    @property
    def size(self):
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return bool(self.inside[v])

    def copy(self):
        t = EmbeddedTree.__new__(EmbeddedTree)
        t.host = self.host
        t.rooted = self.rooted
        t.anchor = self.anchor
        t.parent = self.parent[:]
        t.inside = bytearray(self.inside)
        t.nchild = self.nchild[:]
        t.members = self.members[:]
        t._pos = self._pos[:]
        t.leaves = self.leaves[:]
        t._lpos = self._lpos[:]
        return t

    def unrooted(self):
        t = self.copy()
        t.rooted = False
        t._refresh(t.anchor)
        for w in self._neighbours_in(t.anchor):
            t._refresh(w)
        return t

    def as_rooted(self, r):
        t = self.copy()
        t.rooted = True
        t.reroot(r)
        for v in self.members:
            t._refresh(v)
        return t

    # queries
    def degree(self, v):
        return self.nchild[v] + (1 if self.parent[v] != -1 else 0)

    def is_leaf(self, v):
        if not self.inside[v]:
            return False
        if self.rooted:
            return v != self.anchor and self.nchild[v] == 0
        return self.degree(v) == 1

    def has_edge(self, u, v):
        return (self.inside[u] and self.inside[v]
                and (self.parent[u] == v or self.parent[v] == u))

    def edges(self):
        return {edge_key(v, self.parent[v]) for v in self.members if self.parent[v] != -1}

    def oriented_edges(self):
        """(child, parent) pairs."""
        return [(v, self.parent[v]) for v in self.members if self.parent[v] != -1]

    def vertices(self):
        return set(self.members)

    def key(self):
        """Hashable identity (vertex set, edge set); the root is not part of it."""
        return (frozenset(self.members), frozenset(self.edges()))

    def children(self, v):
        return [w for w in self.host.nbrs[v] if self.inside[w] and self.parent[w] == v]

    def _neighbours_in(self, v):
        out = self.children(v)
        if self.parent[v] != -1:
            out.append(self.parent[v])
        return out

    def tree_neighbours(self, v):
        return self._neighbours_in(v)

    def path_to_anchor(self, v):
        path = [v]
        while self.parent[v] != -1:
            v = self.parent[v]
            path.append(v)
        return path

    def depth(self, v):
        return len(self.path_to_anchor(v)) - 1

    def subtree_vertices(self, v):
        out = [v]
        stack = [v]
        while stack:
            a = stack.pop()
            for w in self.children(a):
                out.append(w)
                stack.append(w)
        return out

    def tree_path(self, u, v):
        """Vertex path u ... v inside the tree."""
        pu = self.path_to_anchor(u)
        idx = {w: i for i, w in enumerate(pu)}
        left = []
        w = v
        while w not in idx:
            left.append(w)
            w = self.parent[w]
        return pu[:idx[w] + 1] + left[::-1]

    # mutation primitives
    def _insert(self, v):
        self.inside[v] = 1
        self._pos[v] = len(self.members)
        self.members.append(v)

    def _drop_member(self, v):
        i = self._pos[v]
        last = self.members.pop()
        if last != v:
            self.members[i] = last
            self._pos[last] = i
        self._pos[v] = -1
        self.inside[v] = 0

    def _refresh(self, v):
        want = self.is_leaf(v)
        have = self._lpos[v] != -1
        if want and not have:
            self._lpos[v] = len(self.leaves)
            self.leaves.append(v)
        elif have and not want:
            i = self._lpos[v]
            last = self.leaves.pop()
            if last != v:
                self.leaves[i] = last
                self._lpos[last] = i
            self._lpos[v] = -1

    def add_leaf(self, v, u):
        """Attach new vertex v to tree vertex u."""
        if self.inside[v] or not self.inside[u]:
            raise ValueError("add_leaf needs v outside and u inside the tree")
        self._insert(v)
        self.parent[v] = u
        self.nchild[u] += 1
        self._refresh(v)
        self._refresh(u)

    def remove_leaf(self, v):
        """Remove a degree-1 vertex (never the root of a rooted tree)."""
        if not self.is_leaf(v):
            raise ValueError("vertex %d is not a leaf" % v)
        if v == self.anchor:
            self.reroot(self.children(v)[0])
        p = self.parent[v]
        self.parent[v] = -1
        self.nchild[p] -= 1
        self._drop_member(v)
        self._refresh(v)
        self._refresh(p)

    def reroot(self, v):
        """Make v the anchor (and root, for rooted trees) by reversing its path."""
        path = self.path_to_anchor(v)
        if len(path) == 1:
            return
        old = path[-1]
        for i in range(len(path) - 1, 0, -1):
            self.parent[path[i]] = path[i - 1]
        self.parent[v] = -1
        self.nchild[v] += 1
        self.nchild[old] -= 1
        self.anchor = v
        if self.rooted:
            self._refresh(old)
            self._refresh(v)

    def cycle(self, u, v):
        """Vertex list u ... v of the tree path; with (v, u) it closes the cycle."""
        if not (self.inside[u] and self.inside[v]):
            raise ValueError("no cycle: endpoint outside the tree")
        if self.has_edge(u, v) or u == v:
            raise ValueError("no cycle: edge already in the tree")
        return self.tree_path(u, v)

    def swap(self, a, b, c, d):
        """Add edge (a, b) between two members, remove edge (c, d) of the a-b path."""
        if self.parent[c] == d:
            x = c
        elif self.parent[d] == c:
            x = d
        else:
            raise ValueError("(%d, %d) is not a tree edge" % (c, d))
        # x is the child endpoint; find which side of the cycle it hangs on
        pa = self.path_to_anchor(a)
        if x in pa:
            lo, hi = a, b
        else:
            lo, hi = b, a
        old_p = self.parent[x]
        y = lo
        prev = hi
        while True:
            nxt = self.parent[y]
            self.parent[y] = prev
            if y == x:
                break
            prev, y = y, nxt
        # child counts: lo gains one through the path (unless lo == x), x loses one
        self.nchild[old_p] -= 1
        self.nchild[hi] += 1
        if lo != x:
            self.nchild[lo] += 1
            self.nchild[x] -= 1
        for w in (lo, hi, x, old_p):
            self._refresh(w)

    def validate(self):
        """Recompute everything from scratch and compare; raises on mismatch."""
        e = self.edges()
        if len(e) != self.size - 1 or not check_tree(self.host, e, self.anchor):
            raise AssertionError("edge set is not a tree")
        if set(self.members) != {v for v in range(self.host.num_vertices) if self.inside[v]}:
            raise AssertionError("member array out of sync")
        for v in self.members:
            if self.nchild[v] != len(self.children(v)):
                raise AssertionError("child count wrong at %d" % v)
        want = {v for v in self.members if self.is_leaf(v)}
        if set(self.leaves) != want or len(self.leaves) != len(want):
            raise AssertionError("leaf set out of sync")
        if self.rooted and self.anchor in want:
            raise AssertionError("root listed as leaf")
        return True


def single_vertex(host, v, rooted=True):
    return EmbeddedTree(host, v, rooted=rooted)


def rectangle_tree(host, W, H, corner=0):
    """Comb of W*H vertices: a horizontal spine of length W with vertical teeth of height H."""
    if host.kind is None or host.kind[0] not in ("torus", "grid"):
        raise ValueError("rectangle tree needs a planar host")
    x0, y0 = host.coords(corner)
    side = host.kind[1]
    if W > side or H > (side if host.kind[0] == "torus" else host.kind[2]):
        raise ValueError("rectangle does not fit in the host")
    t = EmbeddedTree(host, corner, rooted=False)
    for x in range(1, W):
        t.add_leaf(host.vertex_at(x0 + x, y0), host.vertex_at(x0 + x - 1, y0))
    for x in range(W):
        for y in range(1, H):
            t.add_leaf(host.vertex_at(x0 + x, y0 + y), host.vertex_at(x0 + x, y0 + y - 1))
    return t


def exchange(t, e, e2):
    """Tree with edges E(t)+e-e2 when that is a subtree of the same size, else t itself."""
    s = t.copy()
    return s if exchange_inplace(s, e, e2) else t


def exchange_inplace(t, e, e2):
    """In-place version of exchange; returns True when t changed."""
    a, b = e
    c, d = e2
    if edge_key(a, b) == edge_key(c, d) or t.has_edge(a, b) or not t.has_edge(c, d):
        return False
    ina, inb = t.inside[a], t.inside[b]
    if ina and inb:
        # e2 must lie on the tree path between a and b
        path = t.tree_path(a, b)
        for i in range(len(path) - 1):
            if edge_key(path[i], path[i + 1]) == edge_key(c, d):
                t.swap(a, b, c, d)
                return True
        return False
    if not (ina or inb):
        return False
    u, new = (a, b) if ina else (b, a)
    # the dropped vertex must have degree one in t + e
    leaf = -1
    for x in (c, d):
        if x != u and t.degree(x) == 1:
            leaf = x
    if leaf == -1:
        return False
    t.add_leaf(new, u)
    if t.rooted and leaf == t.anchor:
        t.reroot(t.children(leaf)[0])
    t.remove_leaf(leaf)
    return True
