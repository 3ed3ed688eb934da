"""Random draws used by the samplers, plus a replaying source for exact kernels.

Every kernel asks for randomness through three calls only:
``below(k)`` (uniform integer in [0, k)), ``pick(weights)`` (index with the
given probabilities) and ``uniform()``.  The replaying source runs a kernel
once per branch of its decision tree, which gives exact transition
probabilities from the very same code path the samplers use.
"""
from collections import defaultdict
from fractions import Fraction

import numpy as np


class Draws:
    """Buffered wrapper around a numpy Generator (fast scalar draws)."""

    def __init__(self, seed=None, block=4096):
        if isinstance(seed, Draws):
            seed = seed.gen
        self.gen = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self._block = block
        self._buf = self.gen.random(block)
        self._i = 0

    def uniform(self):
        if self._i == self._block:
            self._buf = self.gen.random(self._block)
            self._i = 0
        u = self._buf[self._i]
        self._i += 1
        return float(u)

    def below(self, k):
        j = int(self.uniform() * k)
        return j if j < k else k - 1

    def pick(self, weights):
        u = self.uniform()
        acc = 0.0
        last = 0
        for i, w in enumerate(weights):
            if w <= 0:
                continue
            acc += float(w)
            last = i
            if u < acc:
                return i
        return last

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def exponential(self, rate=1.0):
        u = self.uniform()
        return -np.log1p(-u) / rate

    def spawn(self):
        return Draws(self.gen.spawn(1)[0]) if hasattr(self.gen, "spawn") else \
            Draws(np.random.default_rng(self.gen.integers(2 ** 63)))


def as_draws(rng):
    return rng if isinstance(rng, (Draws, ReplayDraws)) else Draws(rng)


class _Exhausted(Exception):
    pass


class ReplayDraws:
    """Follows a fixed prefix of choices, then takes branch 0 while recording alternatives."""

    def __init__(self, prefix):
        self.prefix = prefix
        self.trace = []  # (chosen index, tuple of (index, prob) alternatives)

    def _next(self, options):
        d = len(self.trace)
        if d < len(self.prefix):
            j = self.prefix[d]
        else:
            j = options[0][0]
        prob = dict(options)[j]
        self.trace.append((j, options))
        return j, prob

    def below(self, k):
        if k <= 0:
            raise ValueError("below(0)")
        p = Fraction(1, k)
        return self._next(tuple((i, p) for i in range(k)))[0]

    def pick(self, weights):
        opts = tuple((i, Fraction(w)) for i, w in enumerate(weights) if w != 0)
        return self._next(opts)[0]

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def uniform(self):
        raise TypeError("continuous draws cannot be enumerated exactly")


def exact_outcomes(step, key=lambda x: x, max_branches=10 ** 6):
    """Exact law of key(step(draws)) over all random choices, as {key: Fraction}.

    `step` must be a function of a draws object only and must not have side
    effects visible across calls.
    """
    law = defaultdict(Fraction)
    stack = [()]
    runs = 0
    while stack:
        prefix = stack.pop()
        d = ReplayDraws(prefix)
        out = step(d)
        runs += 1
        if runs > max_branches:
            raise RuntimeError("too many branches in exact expansion")
        prob = Fraction(1)
        for j, opts in d.trace:
            prob *= dict(opts)[j]
        law[key(out)] += prob
        chosen = [j for j, _ in d.trace]
        for depth in range(len(prefix), len(d.trace)):
            for j, _ in d.trace[depth][1][1:]:
                stack.append(tuple(chosen[:depth]) + (j,))
    return dict(law)


def stationary_distribution(K):
    """Exact stationary law of a finite chain given as {state: {state: Fraction}}.

    Solves pi K = pi, sum(pi) = 1 by Gaussian elimination over the rationals.
    """
    states = list(K)
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    # rows: equations sum_i pi_i (K_ij - delta_ij) = 0 for j < n-1, plus normalization
    A = [[Fraction(0)] * (n + 1) for _ in range(n)]
    for i, s in enumerate(states):
        for t, p in K[s].items():
            if t not in idx:
                raise ValueError("transition leaves the state list")
            A[idx[t]][i] += p
        A[i][i] -= 1
    A[n - 1] = [Fraction(1)] * n + [Fraction(1)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return {s: A[i][n] for i, s in enumerate(states)}
