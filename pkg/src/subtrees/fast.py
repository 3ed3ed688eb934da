"""Compiled loops for the long runs: kernel C on a torus and the square DLA.

Both use a private xorshift generator seeded from numpy so that runs are
reproducible and independent of numba's global state.
"""
import numpy as np
from numba import njit

from .graph import EmbeddedTree


@njit(cache=True)
def _next(state):
    x = state[0]
    x ^= (x << np.uint64(13)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    x ^= x >> np.uint64(7)
    x ^= (x << np.uint64(17)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    state[0] = x
    return x


@njit(cache=True)
def _below(state, k):
    # top 32 bits times k, shifted: unbiased enough for k << 2^32
    return np.int64(((_next(state) >> np.uint64(32)) * np.uint64(k)) >> np.uint64(32))


def _seed_state(seed):
    s = np.random.default_rng(seed).integers(1, 2 ** 63, dtype=np.uint64)
    return np.array([s | np.uint64(1)], dtype=np.uint64)


# kernel C on a 4-regular host

@njit(cache=True)
def _add_child(v, u, parent, inside, tdeg, members, pos, size):
    parent[v] = u
    inside[v] = 1
    tdeg[v] = 1
    tdeg[u] += 1
    members[size] = v
    pos[v] = size


@njit(cache=True)
def _drop(v, inside, tdeg, members, pos, size):
    # size is the count before removal
    inside[v] = 0
    tdeg[v] = 0
    last = members[size - 1]
    members[pos[v]] = last
    pos[last] = pos[v]
    pos[v] = -1


@njit(cache=True)
def _reverse_up(x, top, parent):
    """Reverse parent pointers along x -> ... -> top; top ends pointing to parent of x's old chain."""
    prev = -1
    cur = x
    while True:
        nxt = parent[cur]
        parent[cur] = prev
        if cur == top:
            break
        prev = cur
        cur = nxt


@njit(cache=True)
def _kernel_c_loop(nbr, parent, inside, tdeg, members, pos, size, anchor,
                   steps, state, stamp, marks, including):
    """Run kernel C steps times; returns the final anchor. Arrays are modified in place."""
    deg = nbr.shape[1]
    path_u = np.empty(nbr.shape[0], dtype=np.int64)
    path_v = np.empty(nbr.shape[0], dtype=np.int64)
    for _ in range(steps):
        u = members[_below(state, size)]
        u2 = nbr[u, _below(state, deg)]
        if not inside[u2]:
            v = members[_below(state, size)]
            v2 = nbr[v, _below(state, deg)]
            # exchange((u,u2),(v,v2)): (v,v2) must be a tree edge with a droppable leaf end
            if not inside[v2] or not (parent[v] == v2 or parent[v2] == v):
                continue
            leaf = -1
            if v != u and tdeg[v] == 1:
                leaf = v
            if v2 != u and tdeg[v2] == 1:
                leaf = v2
            if leaf == -1:
                continue
            _add_child(u2, u, parent, inside, tdeg, members, pos, size)
            size += 1
            if parent[leaf] == -1:
                # leaf is the anchor: its single tree neighbour becomes the anchor
                for k in range(deg):
                    y = nbr[leaf, k]
                    if inside[y] and parent[y] == leaf:
                        parent[y] = -1
                        anchor = y
                        break
                tdeg[anchor] -= 1
            else:
                tdeg[parent[leaf]] -= 1
            parent[leaf] = -1
            _drop(leaf, inside, tdeg, members, pos, size)
            size -= 1
            continue
        if parent[u] == u2 or parent[u2] == u:
            continue
        # bidirectional climb with stamps to find the meeting vertex
        stamp[0] += 1
        s = stamp[0]
        a = u
        b = u2
        na = 0
        nb = 0
        meet = -1
        marks[a] = s
        path_u[na] = a
        na += 1
        marks[b] = -s
        path_v[nb] = b
        nb += 1
        while meet == -1:
            if parent[a] != -1:
                a = parent[a]
                path_u[na] = a
                na += 1
                if marks[a] == -s:
                    meet = a
                    break
                marks[a] = s
            if parent[b] != -1:
                b = parent[b]
                path_v[nb] = b
                nb += 1
                if marks[b] == s:
                    meet = b
                    break
                marks[b] = -s
        # trim both lists to end at meet
        while path_u[na - 1] != meet:
            na -= 1
        while path_v[nb - 1] != meet:
            nb -= 1
        L = (na - 1) + (nb - 1)  # tree path edges
        if including:
            j = _below(state, L + 1)
            if j == L:
                continue
        else:
            j = _below(state, L)
        # path edge j, ordered from u to u2
        if j < na - 1:
            c = path_u[j]          # child end, on u's side
            _reverse_up(u, c, parent)
            parent[u] = u2
        else:
            k = j - (na - 1)       # edge index from meet down to u2
            c = path_v[nb - 2 - k]
            _reverse_up(u2, c, parent)
            parent[u2] = u
        d = path_u[j + 1] if j < na - 1 else path_v[nb - 1 - (j - (na - 1))]
        tdeg[c] -= 1
        tdeg[d] -= 1
        tdeg[u] += 1
        tdeg[u2] += 1
    return anchor


class FastTree:
    """Array form of an unrooted subtree of a regular host, for the compiled kernel."""

    def __init__(self, t):
        g = t.host
        if not g.is_regular() or not g.is_simple:
            raise ValueError("the compiled kernel needs a simple regular host")
        self.host = g
        self.nbr, _ = g.neighbor_array()
        n = g.num_vertices
        self.parent = np.array(t.parent, dtype=np.int64)
        self.inside = np.frombuffer(bytes(t.inside), dtype=np.uint8).copy()
        self.tdeg = np.zeros(n, dtype=np.int64)
        for v in t.members:
            self.tdeg[v] = t.degree(v)
        self.members = np.full(n, -1, dtype=np.int64)
        self.members[:t.size] = t.members
        self.pos = np.full(n, -1, dtype=np.int64)
        self.pos[self.members[:t.size]] = np.arange(t.size)
        self.size = t.size
        self.anchor = t.anchor
        self.stamp = np.zeros(1, dtype=np.int64)
        self.marks = np.zeros(n, dtype=np.int64)

    def run_kernel_c(self, steps, state, including=True):
        self.anchor = _kernel_c_loop(self.nbr, self.parent, self.inside, self.tdeg, self.members,
                                     self.pos, self.size, self.anchor, int(steps), state,
                                     self.stamp, self.marks, including)

    def degree_counts(self, top=4):
        d = self.tdeg[self.members[:self.size]]
        return [int(np.sum(d == j)) for j in range(1, top + 1)]

    def to_tree(self):
        pm = {int(v): int(self.parent[v]) for v in self.members[:self.size] if self.parent[v] != -1}
        return EmbeddedTree.from_parents(self.host, pm, int(self.anchor), rooted=False)


def kernel_c_fast(t0, steps, seed=None, including=True, chunk=None, observer=None):
    """Kernel C for `steps` steps from t0 (unrooted, regular host); returns an EmbeddedTree.

    observer(k, fast_tree) is called every `chunk` steps when both are given.
    """
    if t0.size < 2:
        raise ValueError("kernel C needs n >= 2")
    ft = FastTree(t0.unrooted() if t0.rooted else t0)
    state = _seed_state(seed)
    steps = int(steps)
    if chunk and observer:
        done = 0
        while done < steps:
            k = min(int(chunk), steps - done)
            ft.run_kernel_c(k, state, including)
            done += k
            observer(done, ft)
    else:
        ft.run_kernel_c(steps, state, including)
    return ft.to_tree()


# square DLA with mirror reflection

@njit(cache=True)
def _square_dla_loop(W, H, root, n, state, parent, inside):
    """Grow to n vertices; parent[v] = vertex it stuck to. Returns walker count."""
    size = 1
    inside[root] = 1
    parent[root] = -1
    walkers = 0
    N = W * H
    while size < n:
        walkers += 1
        v = _below(state, N)
        if inside[v]:
            continue
        x = v % W
        y = v // W
        bits = np.uint64(0)
        nbits = 0
        while True:
            if nbits == 0:
                bits = _next(state)
                nbits = 32
            k = bits & np.uint64(3)
            bits >>= np.uint64(2)
            nbits -= 1
            nx = x
            ny = y
            if k == 0:
                nx = x + 1 if x + 1 < W else x - 1
            elif k == 1:
                nx = x - 1 if x > 0 else x + 1
            elif k == 2:
                ny = y + 1 if y + 1 < H else y - 1
            else:
                ny = y - 1 if y > 0 else y + 1
            w = ny * W + nx
            if inside[w]:
                cur = y * W + x
                parent[cur] = w
                inside[cur] = 1
                size += 1
                break
            x = nx
            y = ny
    return walkers


def square_dla_fast(W, H, n, seed=None, root=0):
    """Square DLA on the W x H grid; returns (parent array, vertex list, walker count)."""
    if not 1 <= n <= W * H:
        raise ValueError("n must lie in 1..W*H")
    if min(W, H) < 2:
        raise ValueError("the square walk needs sides >= 2")
    parent = np.full(W * H, -1, dtype=np.int64)
    inside = np.zeros(W * H, dtype=np.uint8)
    walkers = _square_dla_loop(W, H, root, n, _seed_state(seed), parent, inside)
    return parent, np.flatnonzero(inside), walkers


# exact box jumps for the square DLA walker

def box_exit_law(R):
    """Exit law of the simple walk started at the centre of the box [-R, R]^2.

    Returns (dx, dy, prob) over the boundary points, from the Green function
    of the walk killed on leaving the open box (one sparse solve).
    """
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla
    m = 2 * R - 1  # interior side
    idx = lambda x, y: (y + R - 1) * m + (x + R - 1)
    rows, cols, vals = [], [], []
    for y in range(-R + 1, R):
        for x in range(-R + 1, R):
            i = idx(x, y)
            rows.append(i)
            cols.append(i)
            vals.append(1.0)
            for ax, ay in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if max(abs(ax), abs(ay)) < R:
                    # g(y) = delta + sum_x g(x) P(x, y): row i holds -P(neighbour -> i)
                    rows.append(i)
                    cols.append(idx(ax, ay))
                    vals.append(-0.25)
    A = sp.csc_matrix((vals, (rows, cols)), shape=(m * m, m * m))
    b = np.zeros(m * m)
    b[idx(0, 0)] = 1.0
    g = spla.spsolve(A, b)
    dx, dy, pr = [], [], []
    for k in range(-R + 1, R):
        for bx, by, ix, iy in ((R, k, R - 1, k), (-R, k, -R + 1, k), (k, R, k, R - 1), (k, -R, k, -R + 1)):
            dx.append(bx)
            dy.append(by)
            pr.append(0.25 * g[idx(ix, iy)])
    pr = np.array(pr)
    return np.array(dx, dtype=np.int64), np.array(dy, dtype=np.int64), pr / pr.sum()


_TABLES = {}


def _jump_tables(K):
    """Concatenated exit laws for R = 2, 4, ..., 2^K (cached per process)."""
    if K not in _TABLES:
        dxs, dys, cums, offs = [], [], [], [0]
        for k in range(1, K + 1):
            dx, dy, pr = box_exit_law(2 ** k)
            dxs.append(dx)
            dys.append(dy)
            c = np.cumsum(pr)
            c[-1] = 1.0
            cums.append(c)
            offs.append(offs[-1] + len(dx))
        _TABLES[K] = (np.concatenate(dxs), np.concatenate(dys), np.concatenate(cums),
                      np.array(offs, dtype=np.int64))
    return _TABLES[K]


@njit(cache=True)
def _fold(z, W):
    if W == 1:
        return 0
    P = 2 * (W - 1)
    z %= P
    if z < 0:
        z += P
    return z if z < W else P - z


@njit(cache=True)
def _uniform(state):
    return (_next(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _free_level(x, y, K, occ, occ_off, occ_w, occ_h):
    """Largest k <= K whose 3x3 block neighbourhood (blocks of side 2^k) holds no cluster point."""
    for k in range(K, 0, -1):
        bx = x >> k
        by = y >> k
        w = occ_w[k]
        h = occ_h[k]
        base = occ_off[k]
        ok = True
        for j in range(max(by - 1, 0), min(by + 2, h)):
            for i in range(max(bx - 1, 0), min(bx + 2, w)):
                if occ[base + j * w + i] > 0:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return k
    return 0


@njit(cache=True)
def _square_dla_jump_loop(W, H, root, n, state, parent, inside, K,
                          jdx, jdy, jcum, joff, occ, occ_off, occ_w, occ_h):
    size = 1
    inside[root] = 1
    parent[root] = -1
    for k in range(1, K + 1):
        occ[occ_off[k] + ((root // W) >> k) * occ_w[k] + ((root % W) >> k)] += 1
    walkers = 0
    N = W * H
    while size < n:
        walkers += 1
        v = _below(state, N)
        if inside[v]:
            continue
        x = v % W
        y = v // W
        while True:
            k = _free_level(x, y, K, occ, occ_off, occ_w, occ_h)
            if k > 0:
                lo = joff[k - 1]
                hi = joff[k] - 1
                u = _uniform(state)
                # first index with cum >= u
                a = lo
                b = hi
                while a < b:
                    mid = (a + b) // 2
                    if jcum[mid] < u:
                        a = mid + 1
                    else:
                        b = mid
                x = _fold(x + jdx[a], W)
                y = _fold(y + jdy[a], H)
                continue
            c = _below(state, 4)
            nx = x
            ny = y
            if c == 0:
                nx = x + 1 if x + 1 < W else x - 1
            elif c == 1:
                nx = x - 1 if x > 0 else x + 1
            elif c == 2:
                ny = y + 1 if y + 1 < H else y - 1
            else:
                ny = y - 1 if y > 0 else y + 1
            w = ny * W + nx
            if inside[w]:
                cur = y * W + x
                parent[cur] = w
                inside[cur] = 1
                size += 1
                for kk in range(1, K + 1):
                    occ[occ_off[kk] + (y >> kk) * occ_w[kk] + (x >> kk)] += 1
                break
            x = nx
            y = ny
    return walkers


def square_dla_jump(W, H, n, seed=None, root=0, levels=7):
    """Square DLA with exact box jumps far from the cluster; same law as square_dla_fast."""
    if not 1 <= n <= W * H:
        raise ValueError("n must lie in 1..W*H")
    if min(W, H) < 2:
        raise ValueError("the square walk needs sides >= 2")
    K = int(levels)
    jdx, jdy, jcum, joff = _jump_tables(K)
    occ_w = np.zeros(K + 1, dtype=np.int64)
    occ_h = np.zeros(K + 1, dtype=np.int64)
    occ_off = np.zeros(K + 2, dtype=np.int64)
    for k in range(1, K + 1):
        occ_w[k] = (W >> k) + 1
        occ_h[k] = (H >> k) + 1
        occ_off[k + 1] = occ_off[k] + occ_w[k] * occ_h[k]
    occ = np.zeros(occ_off[K + 1], dtype=np.int64)
    parent = np.full(W * H, -1, dtype=np.int64)
    inside = np.zeros(W * H, dtype=np.uint8)
    walkers = _square_dla_jump_loop(W, H, root, n, _seed_state(seed), parent, inside, K,
                                    jdx, jdy, jcum, joff, occ, occ_off, occ_w, occ_h)
    return parent, np.flatnonzero(inside), walkers
