"""Measurements on sampled trees, exponent estimators and a uniformity test."""
import json
import math
from collections import deque
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.stats import chi2

from .graph import EmbeddedTree


@dataclass
class StatsRecord:
    size: int
    width: int = None
    height: int = None
    dists: list = field(default_factory=list)
    deg: list = field(default_factory=list)
    seed: int = None

    def to_json(self):
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None})


def _tree_nbrs(t):
    nb = {v: [] for v in t.vertices()}
    for (u, v) in t.edges():
        nb[u].append(v)
        nb[v].append(u)
    return nb


def tree_distances(t, s):
    """BFS distances inside t from s."""
    nb = _tree_nbrs(t) if isinstance(t, EmbeddedTree) else t
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        for w in nb[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def degree_counts(t, top=4):
    c = [0] * top
    if t.size < 2:
        return []
    for v in t.vertices():
        d = t.degree(v)
        if 1 <= d <= top:
            c[d - 1] += 1
    return c


def width_height(t):
    """Occupied columns and rows of a tree on a torus or grid host."""
    kind = t.host.kind
    if kind is None or kind[0] not in ("torus", "grid"):
        return None, None
    W = kind[1]
    vs = np.fromiter(t.vertices(), dtype=np.int64)
    return int(len(np.unique(vs % W))), int(len(np.unique(vs // W)))


def measure(t, pairs=10, rng=None, from_root=False, seed=None):
    """StatsRecord for t: width/height, `pairs` tree distances, degree histogram.

    Distances are between independent uniform vertex pairs, or from the root
    to uniform vertices when from_root is set.
    """
    rng = np.random.default_rng(rng)
    w, h = width_height(t)
    vs = sorted(t.vertices())
    nb = _tree_nbrs(t)
    dists = []
    if from_root:
        d0 = tree_distances(nb, t.root)
        for _ in range(pairs):
            dists.append(d0[vs[rng.integers(len(vs))]])
    else:
        for _ in range(pairs):
            a = vs[rng.integers(len(vs))]
            b = vs[rng.integers(len(vs))]
            dists.append(tree_distances(nb, a)[b])
    return StatsRecord(size=t.size, width=w, height=h, dists=dists,
                       deg=degree_counts(t), seed=seed)


def canonical_embedding(t, N=None):
    """Unwrap a torus tree into Z^2 with the root (or anchor) at the origin."""
    kind = t.host.kind
    if kind is None or kind[0] != "torus":
        raise ValueError("canonical embedding needs a torus host")
    N = kind[1] if N is None else N
    r = t.root if t.rooted else t.anchor
    nb = _tree_nbrs(t)
    if t.size > 1:
        far = max(tree_distances(nb, r).items(), key=lambda kv: kv[1])[0]
        if max(tree_distances(nb, far).values()) >= N:
            raise ValueError("tree diameter must be below the torus side")
    pos = {r: (0, 0)}
    q = deque([r])
    while q:
        v = q.popleft()
        x, y = t.host.coords(v)
        for w in nb[v]:
            if w in pos:
                continue
            a, b = t.host.coords(w)
            dx = (a - x) % N
            dy = (b - y) % N
            dx = dx - N if dx > N // 2 else dx
            dy = dy - N if dy > N // 2 else dy
            pos[w] = (pos[v][0] + dx, pos[v][1] + dy)
            q.append(w)
    return pos


# exponent estimators

def _decile(y, i):
    y = np.sort(np.asarray(y))
    k = math.ceil(len(y) * i / 10)
    return y[max(k, 1) - 1]


def deciles(y):
    return np.array([_decile(y, i) for i in range(1, 10)], dtype=float)


def median(y):
    return _decile(y, 5)


def est_exponent(sample_n, sample_m, n, m, method="mean"):
    """Exponent g with Y_n ~ n^g from samples at two sizes.

    A sample may be a sequence of values, or (for mean and median) a single
    number taken as the summary itself.
    """
    if n == m:
        raise ValueError("sizes must differ")
    if method in ("mean", "median"):
        def summary(s):
            if np.ndim(s) == 0:
                return float(s)
            if len(s) == 0:
                raise ValueError("empty sample")
            return float(np.mean(s)) if method == "mean" else float(median(s))
        a, b = summary(sample_n), summary(sample_m)
        if a <= 0 or b <= 0:
            raise ValueError("summaries must be positive")
        return math.log(a / b) / math.log(n / m)
    if method in ("decile", "best-fit-decile"):
        return decile_fit(deciles(sample_n), deciles(sample_m), n, m)
    raise ValueError("unknown method %r" % method)


def decile_fit(dn, dm, n, m, grid=512):
    """argmin over x in [1/2, 1] of sum |dn_i m^x - dm_i n^x|^2: grid, then ternary search."""
    dn = np.asarray(dn, float)
    dm = np.asarray(dm, float)
    def obj(x):
        return float(np.sum((dn * m ** x - dm * n ** x) ** 2))
    xs = np.linspace(0.5, 1.0, grid)
    vals = [obj(x) for x in xs]
    i = int(np.argmin(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid - 1)]
    for _ in range(100):
        a = lo + (hi - lo) / 3
        b = hi - (hi - lo) / 3
        if obj(a) <= obj(b):
            hi = b
        else:
            lo = a
    return (lo + hi) / 2


# uniformity

def chi_square_uniform(observed, universe=None):
    """Pearson statistic and p-value against the uniform law.

    observed: dict class -> count (with universe the list of all classes) or a
    plain count vector covering the universe.
    """
    if isinstance(observed, dict):
        if universe is None:
            raise ValueError("a dict of counts needs the universe")
        extra = set(observed) - set(universe)
        if extra:
            raise ValueError("observed class outside the universe: %r" % (next(iter(extra)),))
        counts = np.array([observed.get(c, 0) for c in universe], dtype=float)
    else:
        counts = np.asarray(observed, dtype=float)
    k = len(counts)
    total = counts.sum()
    if k < 2:
        raise ValueError("need at least two classes")
    expected = total / k
    if expected < 5:
        raise ValueError("expected count %.2f < 5 per class; draw more samples" % expected)
    stat = float(np.sum((counts - expected) ** 2) / expected)
    return stat, float(chi2.sf(stat, k - 1))


# JSON-lines aggregation

def read_records(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def aggregate(records):
    """Pooled width (width and height together), distances and mean degree proportions."""
    widths = [r[k] for r in records for k in ("width", "height") if r.get(k) is not None]
    dists = [d for r in records for d in r.get("dists", [])]
    out = {"replicas": len(records)}
    if widths:
        out.update(width_mean=float(np.mean(widths)), width_median=float(median(widths)),
                   width_sd=float(np.std(widths, ddof=1)) if len(widths) > 1 else 0.0,
                   width_n=len(widths))
    if dists:
        out.update(dist_mean=float(np.mean(dists)), dist_median=float(median(dists)),
                   dist_sd=float(np.std(dists, ddof=1)) if len(dists) > 1 else 0.0,
                   dist_n=len(dists))
    degs = [r["deg"] for r in records if r.get("deg")]
    if degs:
        q = np.array([np.array(d, float) / sum(d) for d in degs])
        out["q_mean"] = q.mean(axis=0).tolist()
        out["q_se"] = (q.std(axis=0, ddof=1) / np.sqrt(len(q))).tolist() if len(q) > 1 else [0.0] * q.shape[1]
    return out
