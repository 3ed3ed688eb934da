"""Replica batches for the long torus and square-DLA runs, written as JSON lines."""
import json
import os
import time


from .graph import torus, grid, rectangle_tree, EmbeddedTree
from .fast import FastTree, _seed_state, square_dla_jump
from .stats import measure


def _done_seeds(path):
    if not os.path.exists(path):
        return set()
    with open(path) as f:
        return {json.loads(l)["seed"] for l in f if l.strip()}


def kernel_c_batch(out, N=1000, W=40, H=25, steps=150_000_000, replicas=200, seed=0,
                   pairs=10, host=None, log=None):
    """Kernel C from the W x H rectangle tree on Torus(N); one record per replica.

    Replicas already present in `out` (by seed) are skipped, so a batch can resume.
    """
    g = host if host is not None else torus(N)
    t0 = rectangle_tree(g, W, H)
    done = _done_seeds(out)
    for i in range(replicas):
        s = seed + i
        if s in done:
            continue
        t_start = time.time()
        ft = FastTree(t0)
        ft.run_kernel_c(steps, _seed_state(s), True)
        t = ft.to_tree()
        rec = measure(t, pairs=pairs, rng=s, seed=s)
        with open(out, "a") as f:
            f.write(rec.to_json() + "\n")
        if log:
            log("replica %d done in %.1fs" % (s, time.time() - t_start))
    return out


def square_dla_batch(out, W=1000, H=1000, n=5000, replicas=2000, seed=0, pairs=10, log=None):
    """Square DLA rooted at the corner; distances from the root to `pairs` uniform nodes."""
    g = None
    done = _done_seeds(out)
    for i in range(replicas):
        s = seed + i
        if s in done:
            continue
        parent, vs, _ = square_dla_jump(W, H, n, seed=s)
        if g is None:
            g = grid(W, H)
        pm = {int(v): int(parent[v]) for v in vs if parent[v] != -1}
        t = EmbeddedTree.from_parents(g, pm, 0, rooted=True)
        rec = measure(t, pairs=pairs, rng=s, from_root=True, seed=s)
        with open(out, "a") as f:
            f.write(rec.to_json() + "\n")
        if log and i % 100 == 0:
            log("replica %d" % s)
    return out
