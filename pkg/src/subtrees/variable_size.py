"""Birth-death kernels on subtrees of all sizes and their invariant measures."""
from fractions import Fraction

from .fixed_size import BreakCycleRule
from .graph import edge_key
from .randomness import as_draws, exact_outcomes


def _num(x):
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return x


class PqrConfig:
    """Triplets (p_i, q_i, r_i) for sizes i = 1..N, with an optional size window.

    p_i: probability of trying to add, r_i: of trying to remove, q_i: hold.
    Values are kept as given (Fractions give exact invariant measures).
    """

    def __init__(self, p, r, q=None, window=None):
        N = len(p)
        if len(r) != N or (q is not None and len(q) != N):
            raise ValueError("p, q, r need the same length")
        p = [_num(x) for x in p]
        r = [_num(x) for x in r]
        q = [1 - a - b for a, b in zip(p, r)] if q is None else [_num(x) for x in q]
        for i in range(N):
            if min(p[i], q[i], r[i]) < 0:
                raise ValueError("negative probability at size %d" % (i + 1))
            if abs(p[i] + q[i] + r[i] - 1) > 1e-12:
                raise ValueError("p+q+r != 1 at size %d" % (i + 1))
        self.N = N
        self._p = [0] + p
        self._q = [0] + q
        self._r = [0] + r
        self.window = None
        if window is not None:
            n1, n2 = window
            if not 1 <= n1 <= n2 <= N:
                raise ValueError("window outside 1..N")
            self.window = (n1, n2)
            if r[n1 - 1] != 0 or p[n2 - 1] != 0:
                raise ValueError("a window needs r_{n1} = 0 and p_{n2} = 0")
            for i in range(n1, n2):
                if p[i - 1] <= 0:
                    raise ValueError("p_%d must be positive inside the window" % i)
            for i in range(n1 + 1, n2 + 1):
                if r[i - 1] <= 0:
                    raise ValueError("r_%d must be positive inside the window" % i)

    def p(self, i):
        return self._p[i]

    def q(self, i):
        return self._q[i]

    def r(self, i):
        return self._r[i]

    def triple(self, i):
        return self._p[i], self._q[i], self._r[i]

    def to_text(self):
        return "".join("%d %s %s %s\n" % (i, self._p[i], self._q[i], self._r[i])
                       for i in range(1, self.N + 1))

    def satisfies_m(self):
        """Hypothesis M: p non-decreasing on 1..N-1, r non-increasing on 2..N."""
        ok_p = all(self._p[i] <= self._p[i + 1] for i in range(1, self.N - 1))
        ok_r = all(self._r[i] >= self._r[i + 1] for i in range(2, self.N))
        return ok_p and ok_r

    @classmethod
    def constant(cls, N, p, r=None):
        """p_i = p and r_i = r (default 1 - p), with r_1 = 0 and p_N = 0 at the ends."""
        p = _num(p)
        r = 1 - p if r is None else _num(r)
        ps = [p] * N
        rs = [r] * N
        rs[0] = 0
        ps[N - 1] = 0
        return cls(ps, rs)

    @classmethod
    def geometric(cls, N, c):
        """p_i = c r_{i+1}: the unrooted weight ratio nu_{m}/nu_{m-1} is c (2c at m=2)."""
        c = _num(c)
        r = 1 / (1 + c)
        return cls.constant(N, c * r, r)

    @classmethod
    def windowed(cls, N, n1, n2, p=Fraction(1, 2)):
        p = _num(p)
        ps = [p if n1 <= i < n2 else 0 for i in range(1, N + 1)]
        rs = [(1 - p) if n1 < i <= n2 else 0 for i in range(1, N + 1)]
        return cls(ps, rs, window=(n1, n2))

    @classmethod
    def parse(cls, text, window=None):
        rows = {}
        for ln in text.splitlines():
            ln = ln.split("#")[0].strip()
            if not ln:
                continue
            parts = ln.split()
            if len(parts) != 4:
                raise ValueError("pqr lines must read 'i p q r': %r" % ln)
            rows[int(parts[0])] = tuple(Fraction(x) for x in parts[1:])
        N = max(rows)
        if sorted(rows) != list(range(1, N + 1)):
            raise ValueError("pqr file must list sizes 1..N")
        return cls([rows[i][0] for i in range(1, N + 1)], [rows[i][2] for i in range(1, N + 1)],
                   [rows[i][1] for i in range(1, N + 1)], window=window)

    @classmethod
    def preset(cls, name, N):
        """'uniform', 'const:P', 'geom:C' or 'window:N1,N2[,P]'."""
        if name == "uniform":
            return cls.constant(N, Fraction(1, 2))
        kind, _, arg = name.partition(":")
        if kind == "const":
            return cls.constant(N, arg)
        if kind == "geom":
            return cls.geometric(N, arg)
        if kind == "window":
            a = arg.split(",")
            return cls.windowed(N, int(a[0]), int(a[1]), a[2] if len(a) > 2 else Fraction(1, 2))
        raise ValueError("unknown pqr preset %r" % name)


# elementary moves

def add_edge(t, a, b, rule, draws):
    """Add e=(a,b) if adjacent to t; a created cycle is broken by `rule`."""
    ina, inb = t.inside[a], t.inside[b]
    if ina and inb:
        if t.has_edge(a, b):
            return t
        path = t.tree_path(a, b)
        j = rule.choose(len(path), draws)
        if j >= 0:
            t.swap(a, b, path[j], path[j + 1])
    elif ina:
        t.add_leaf(b, a)
    elif inb:
        t.add_leaf(a, b)
    return t


def add(t, e):
    """E(t)+e as an edge set when e touches t (possibly unicyclic), else E(t)."""
    a, b = e
    E = set(t.edges())
    if t.inside[a] or t.inside[b]:
        E.add(edge_key(a, b))
    return E


def remove_unrooted(t, e):
    """Oriented removal: a one-edge tree keeps e's first endpoint; else drop e if a tree remains."""
    v1, v2 = e
    if not t.has_edge(v1, v2):
        return t
    if t.size == 2:
        t.remove_leaf(v2)
        return t
    for x in (v1, v2):
        if t.degree(x) == 1:
            t.remove_leaf(x)
            return t
    return t


def remove_rooted(t, r, e):
    """Drop e when its endpoint away from r is a leaf; the root always stays."""
    a, b = e
    if not t.has_edge(a, b):
        return t
    child = a if t.parent[a] == b else b
    if child != r and t.is_leaf(child):
        t.remove_leaf(child)
    return t


def _act(t, c, e, rule, d, remove):
    if c == 0:
        add_edge(t, e[0], e[1], rule, d)
    elif c == 2:
        remove(t, e)
    return t


def kernel_d_step(t, cfg, rule, rng):
    """Uniform oriented host edge, then add / hold / remove with probabilities p, q, r."""
    d = as_draws(rng)
    E = t.host.edges
    k = d.below(2 * len(E))
    a, b = E[k >> 1]
    e = (a, b) if k & 1 == 0 else (b, a)
    c = d.pick(cfg.triple(t.size))
    return _act(t, c, e, rule, d, remove_unrooted)


def kernel_d_rooted_step(t, r, cfg, rule, rng):
    """Uniform unoriented host edge; removals keep the root r."""
    d = as_draws(rng)
    E = t.host.edges
    e = E[d.below(len(E))]
    c = d.pick(cfg.triple(t.size))
    return _act(t, c, e, rule, d, lambda s, x: remove_rooted(s, r, x))


def kernel_e_step(t, cfg, rule, rng):
    """Regular hosts: the oriented edge starts at a uniform tree vertex."""
    if not t.host.is_regular():
        raise ValueError("kernel E needs a regular host graph")
    d = as_draws(rng)
    u = t.members[d.below(t.size)]
    nb = t.host.nbrs[u]
    e = (u, nb[d.below(len(nb))])
    c = d.pick(cfg.triple(t.size))
    return _act(t, c, e, rule, d, remove_unrooted)


def invariant_measure(cfg, variant="unrooted", kernel=None):
    """Unnormalized per-size weights nu[1..N] (nu[0] unused, zero outside the window).

    variant: 'unrooted' (kernel D), 'rooted' (kernel D_r), 'regular' (kernel E),
    or 'windowed' (cfg.window required; kernel defaults to 'regular').
    """
    if variant == "windowed":
        if cfg.window is None:
            raise ValueError("windowed measure needs a config with a window")
        variant = kernel or "regular"
    if variant not in ("unrooted", "rooted", "regular"):
        raise ValueError("unknown variant %r" % variant)
    n1, n2 = cfg.window or (1, cfg.N)
    nu = [0] * (cfg.N + 1)
    exact = all(isinstance(cfg.p(i), Fraction) and isinstance(cfg.r(i), Fraction)
                for i in range(1, cfg.N + 1))
    nu[n1] = Fraction(1) if exact else 1.0
    for m in range(n1 + 1, n2 + 1):
        p, r = cfg.p(m - 1), cfg.r(m)
        if r == 0:
            if p == 0:
                break
            raise ValueError("r_%d = 0 inside the support makes the chain non-reversible here" % m)
        if variant == "rooted":
            ratio = p / r
        elif variant == "unrooted":
            ratio = (2 if m == 2 else 1) * p / r
        else:
            ratio = (2 if m == 2 else 1) * (p / (m - 1)) / (2 * r / m)
        nu[m] = nu[m - 1] * ratio
    return nu


def size_law(nu, counts):
    """Probability of each size: nu_n |T(G,n)| normalized; counts[n-1] = |T(G,n)|."""
    w = [nu[n] * counts[n - 1] if n - 1 < len(counts) else 0 for n in range(1, len(nu))]
    s = sum(w)
    return [0] + [x / s for x in w]


def run_variable(kernel, t0, cfg, steps, rng=None, rule=None, root=None, observers=()):
    """Run kernelD / kernelDr / kernelE for `steps` steps on a copy of t0."""
    d = as_draws(rng)
    rule = rule or BreakCycleRule()
    t0.host.require_simple()
    if cfg.N < t0.host.num_vertices:
        raise ValueError("pqr config covers sizes up to %d, host has %d vertices"
                         % (cfg.N, t0.host.num_vertices))
    if kernel == "kernelDr":
        r = t0.root if root is None else root
        if r is None or not t0.inside[r]:
            raise ValueError("rooted kernel needs a root inside the start tree")
        t = t0.as_rooted(r)
        step = lambda s: kernel_d_rooted_step(s, r, cfg, rule, d)
    elif kernel in ("kernelD", "kernelE"):
        t = t0.unrooted() if t0.rooted else t0.copy()
        if kernel == "kernelE" and not t.host.is_regular():
            raise ValueError("kernel E needs a regular host graph")
        fn = kernel_d_step if kernel == "kernelD" else kernel_e_step
        step = lambda s: fn(s, cfg, rule, d)
    else:
        raise ValueError("unknown variable-size kernel %r" % kernel)
    if cfg.window and not cfg.window[0] <= t.size <= cfg.window[1]:
        raise ValueError("start tree size %d outside the window" % t.size)
    obs = [(int(every), cb) for every, cb in observers]
    for k in range(1, int(steps) + 1):
        step(t)
        for every, cb in obs:
            if k % every == 0:
                cb(k, t)
    return t


def transition_row(kernel, t, cfg, rule=None, root=None):
    """Exact one-step law from t as {key: Fraction}."""
    rule = rule or BreakCycleRule()
    if kernel == "kernelD":
        f = lambda d: kernel_d_step(t.copy(), cfg, rule, d)
    elif kernel == "kernelDr":
        f = lambda d: kernel_d_rooted_step(t.copy(), root, cfg, rule, d)
    elif kernel == "kernelE":
        f = lambda d: kernel_e_step(t.copy(), cfg, rule, d)
    else:
        raise ValueError(kernel)
    return exact_outcomes(f, key=lambda s: s.key())
