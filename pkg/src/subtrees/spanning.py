"""Uniform spanning tree samplers and walk-to-tree constructions."""
from .graph import EmbeddedTree
from .randomness import as_draws


def first_entrance_tree(g, path):
    """Tree rooted at path[0]; each newly visited vertex hangs from the previous walk position."""
    if len(path) == 0:
        raise ValueError("empty path")
    parent = {}
    seen = {path[0]}
    for k in range(1, len(path)):
        v = path[k]
        if v not in seen:
            seen.add(v)
            parent[v] = path[k - 1]
    return EmbeddedTree.from_parents(g, parent, path[0])


def last_exit_tree(g, path):
    """Tree rooted at the final vertex; each other vertex points to the step after its last visit."""
    if len(path) == 0:
        raise ValueError("empty path")
    end = path[-1]
    parent = {}
    for k in range(len(path) - 2, -1, -1):
        v = path[k]
        if v != end and v not in parent:
            parent[v] = path[k + 1]
    return EmbeddedTree.from_parents(g, parent, end)


def walk_step(g, v, draws, weights=None):
    """One step of the walk: uniform neighbour, or weighted by weights[v] if given."""
    nb = g.nbrs[v]
    if weights is None:
        return nb[draws.below(len(nb))]
    w = weights[v]
    s = sum(w)
    return nb[draws.pick([x / s for x in w])]


def random_walk(g, start, steps, rng=None, weights=None):
    d = as_draws(rng)
    path = [start]
    v = start
    for _ in range(steps):
        v = walk_step(g, v, d, weights)
        path.append(v)
    return path


def _cap(g, max_steps):
    return max_steps if max_steps is not None else 1000 * g.num_vertices ** 3 + 10 ** 6


def aldous_broder(g, root, rng=None, weights=None, max_steps=None):
    """Walk from the root until every vertex is seen; keep first-entrance edges."""
    g.require_simple()
    d = as_draws(rng)
    n = g.num_vertices
    parent = {}
    seen = bytearray(n)
    seen[root] = 1
    count = 1
    v = root
    cap = _cap(g, max_steps)
    steps = 0
    while count < n:
        w = walk_step(g, v, d, weights)
        if not seen[w]:
            seen[w] = 1
            parent[w] = v
            count += 1
        v = w
        steps += 1
        if steps > cap:
            raise RuntimeError("Aldous-Broder walk exceeded %d steps (disconnected host?)" % cap)
    return EmbeddedTree.from_parents(g, parent, root)


def wilson(g, root, rng=None, weights=None, max_steps=None, order=None):
    """Loop-erased walks to the growing tree, vertices taken in ascending id order."""
    g.require_simple()
    d = as_draws(rng)
    n = g.num_vertices
    in_tree = bytearray(n)
    in_tree[root] = 1
    nxt = [-1] * n
    cap = _cap(g, max_steps)
    steps = 0
    for s in (order if order is not None else range(n)):
        u = s
        while not in_tree[u]:
            nxt[u] = walk_step(g, u, d, weights)
            u = nxt[u]
            steps += 1
            if steps > cap:
                raise RuntimeError("Wilson walk exceeded %d steps (disconnected host?)" % cap)
        u = s
        while not in_tree[u]:
            in_tree[u] = 1
            u = nxt[u]
    parent = {v: nxt[v] for v in range(n) if v != root}
    return EmbeddedTree.from_parents(g, parent, root)


def _find_cycles(arrow, root):
    """Cycles of the functional graph v -> arrow[v] (root has none)."""
    n = len(arrow)
    state = [0] * n  # 0 new, 1 on stack, 2 done
    cycles = []
    for s in range(n):
        if state[s]:
            continue
        stack = []
        v = s
        while v != root and state[v] == 0:
            state[v] = 1
            stack.append(v)
            v = arrow[v]
        if v != root and state[v] == 1:
            cycles.append(stack[stack.index(v):])
        for w in stack:
            state[w] = 2
    return cycles


def cycle_popping(g, root, rng=None, weights=None, max_pops=None):
    """Give every non-root vertex a random arrow, then pop cycles (lowest vertex first) until none remain."""
    g.require_simple()
    d = as_draws(rng)
    n = g.num_vertices
    arrow = [-1] * n
    for v in range(n):
        if v != root:
            arrow[v] = walk_step(g, v, d, weights)
    cap = max_pops if max_pops is not None else _cap(g, None)
    pops = 0
    while True:
        cycles = _find_cycles(arrow, root)
        if not cycles:
            break
        cyc = min(cycles, key=min)
        for v in cyc:
            arrow[v] = walk_step(g, v, d, weights)
        pops += 1
        if pops > cap:
            raise RuntimeError("cycle popping exceeded %d pops" % cap)
    parent = {v: arrow[v] for v in range(n) if v != root}
    return EmbeddedTree.from_parents(g, parent, root)
