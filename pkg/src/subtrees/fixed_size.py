"""Markov kernels on subtrees of fixed size n with uniform invariant law."""
from .graph import exchange_inplace
from .randomness import as_draws, exact_outcomes

INCLUDING = "including"
EXCLUDING = "excluding"


class BreakCycleRule:
    """Which edge of the fresh cycle to delete: uniform over the cycle with or without the new edge."""

    def __init__(self, variant=INCLUDING):
        if variant not in (INCLUDING, EXCLUDING):
            raise ValueError("unknown break-cycle variant %r" % variant)
        self.variant = variant

    def choose(self, path_len, draws):
        """Index into the path edges 0..path_len-2, or -1 for the added edge itself.

        path_len is the number of vertices of the tree path closing the cycle.
        """
        k = path_len - 1
        if self.variant == INCLUDING:
            j = draws.below(k + 1)
            return -1 if j == k else j
        return draws.below(k)

    def __repr__(self):
        return "BreakCycleRule(%r)" % self.variant


def _require(t):
    t.host.require_simple()
    if t.size < 2:
        raise ValueError("fixed-size kernels need n >= 2")


def _edge_from_member(t, d):
    g = t.host
    u = t.members[d.below(t.size)]
    nb = g.nbrs[u]
    return u, nb[d.below(len(nb))]


def kernel_a_step(t, rng):
    """Two independent uniform host edges, then exchange."""
    d = as_draws(rng)
    E = t.host.edges
    e1 = E[d.below(len(E))]
    e2 = E[d.below(len(E))]
    exchange_inplace(t, e1, e2)
    return t


def kernel_b_step(t, rng):
    """Two oriented edges with tails uniform in V(t), then exchange."""
    d = as_draws(rng)
    e1 = _edge_from_member(t, d)
    e2 = _edge_from_member(t, d)
    exchange_inplace(t, e1, e2)
    return t


def kernel_b_leaf_step(t, rng):
    """Leaf variant: only move when e1 is a tree edge ending at a leaf u' and v' is outside."""
    d = as_draws(rng)
    u, u2 = _edge_from_member(t, d)
    v, v2 = _edge_from_member(t, d)
    if t.has_edge(u, u2) and t.degree(u2) == 1 and not t.inside[v2]:
        exchange_inplace(t, (v, v2), (u, u2))
    return t


def kernel_c_step(t, rule, rng):
    """Add an oriented edge from a uniform tree vertex; fix the size through a leaf or the cycle."""
    d = as_draws(rng)
    u, u2 = _edge_from_member(t, d)
    if not t.inside[u2]:
        e2 = _edge_from_member(t, d)
        exchange_inplace(t, (u, u2), e2)
    elif not t.has_edge(u, u2):
        path = t.tree_path(u, u2)
        j = rule.choose(len(path), d)
        if j >= 0:
            t.swap(u, u2, path[j], path[j + 1])
    return t


KERNELS = {
    "kernelA": lambda t, d, rule: kernel_a_step(t, d),
    "kernelB": lambda t, d, rule: kernel_b_step(t, d),
    "kernelB-leaf": lambda t, d, rule: kernel_b_leaf_step(t, d),
    "kernelC": lambda t, d, rule: kernel_c_step(t, rule, d),
}


def run_chain(kernel, t0, steps, rng=None, observers=(), rule=None):
    """Apply `kernel` steps times to a copy of t0.

    observers: iterable of (every, callback); callback(step, tree) is called
    after each multiple of `every` steps (and at step 0).
    """
    if kernel not in KERNELS:
        raise ValueError("unknown kernel %r (choose from %s)" % (kernel, ", ".join(KERNELS)))
    _require(t0)
    t = t0.unrooted() if t0.rooted else t0.copy()
    d = as_draws(rng)
    rule = rule or BreakCycleRule()
    step = KERNELS[kernel]
    obs = [(int(every), cb) for every, cb in observers]
    for every, cb in obs:
        cb(0, t)
    for k in range(1, int(steps) + 1):
        step(t, d, rule)
        for every, cb in obs:
            if k % every == 0:
                cb(k, t)
    return t


def transition_row(kernel, t, rule=None):
    """Exact one-step law from t as {tree key: Fraction}."""
    rule = rule or BreakCycleRule()
    step = KERNELS[kernel]
    return exact_outcomes(lambda d: step(t.copy(), d, rule), key=lambda s: s.key())


def transition_matrix(kernel, trees, rule=None):
    """{key: {key: prob}} over a list of trees closed under the kernel."""
    return {t.key(): transition_row(kernel, t, rule) for t in trees}
