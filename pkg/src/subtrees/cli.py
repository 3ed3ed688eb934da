"""Command-line entry point: subtrees sample|enumerate|evaporate|stats|render|oracle."""
import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .graph import generate, EmbeddedTree, bfs_order, rectangle_tree
from .io import serialize, read_tree
from .enumeration import ResourceLimitError

OUT_ENV = "SUBTREES_OUT"

FIXED = ("kernelA", "kernelB", "kernelB-leaf", "kernelC")
VARIABLE = ("kernelD", "kernelDr", "kernelE")
GROWTH = ("zm", "am", "sbf", "dla", "dla-square", "idla", "prim", "kruskal", "fpp", "ust-evap")
EXACT = ("exact", "boltzmann", "cftp", "ust-subtree", "pioneer", "wilson")
MODELS = FIXED + VARIABLE + GROWTH + EXACT
EVAPORATIONS = ("uniform-leaf", "smallest", "threshold", "election", "edge", "edge-threshold")


class DomainError(Exception):
    pass


def steps_arg(s):
    """Step counts such as 1000, 2e8 or 1.6G."""
    mult = {"K": 10 ** 3, "M": 10 ** 6, "G": 10 ** 9}
    s = s.strip()
    try:
        if s and s[-1].upper() in mult:
            return int(round(float(s[:-1]) * mult[s[-1].upper()]))
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError("not a step count: %r" % s) from None
    if v < 0 or v != int(v):
        raise argparse.ArgumentTypeError("step count must be a non-negative integer: %r" % s)
    return int(v)


def start_tree(g, r, n, spec=None):
    """Initial tree of size n: `rect:WxH` comb, or the first n vertices of a BFS from r."""
    if spec and spec.startswith("rect:"):
        w, h = spec[5:].lower().split("x")
        return rectangle_tree(g, int(w), int(h), corner=r)
    if not 1 <= n <= g.num_vertices:
        raise DomainError("size must lie in 1..%d" % g.num_vertices)
    order = bfs_order(g, r)[:n]
    inside = set(order)
    t = EmbeddedTree(g, r)
    for v in order[1:]:
        for w in g.nbrs[v]:
            if w in inside and t.inside[w]:
                t.add_leaf(v, w)
                break
    return t


def _pqr(a, g):
    from .variable_size import PqrConfig
    src = a.pqr or "uniform"
    N = g.num_vertices
    if os.path.exists(src):
        with open(src) as f:
            return PqrConfig.parse(f.read())
    return PqrConfig.preset(src, N)


def draw_one(a, seed, snaps=None):
    """One sample for the parsed arguments; returns (tree, labels).

    snaps, if a list, collects (step, TreeFile text) every --snapshot-every
    steps of a fixed-size kernel.
    """
    from . import growth as G
    g = generate(a.graph)
    r = a.root
    n = a.size
    rng = np.random.default_rng(seed)
    m = a.model
    if m in FIXED:
        from .fixed_size import run_chain, BreakCycleRule
        t0 = start_tree(g, r, n, a.start)
        every = getattr(a, "snapshot_every", None)
        keep = every and snaps is not None
        if m == "kernelC" and a.fast and g.is_regular():
            from .fast import kernel_c_fast
            obs = (lambda k, ft: snaps.append((k, serialize(ft.to_tree())))) if keep else None
            return kernel_c_fast(t0, a.steps, seed=seed, chunk=every, observer=obs), None
        obs = [(every, lambda k, t: snaps.append((k, serialize(t))))] if keep else ()
        return run_chain(m, t0, a.steps, rng, observers=obs, rule=BreakCycleRule(a.break_rule)), None
    if m in VARIABLE:
        from .variable_size import run_variable
        t0 = start_tree(g, r, n or 1, a.start)
        return run_variable(m, t0, _pqr(a, g), a.steps, rng, root=r), None
    if m == "exact":
        from .enumeration import exact_sample_rooted
        return exact_sample_rooted(g, r, n, rng), None
    if m == "boltzmann":
        from .enumeration import boltzmann_sample
        return boltzmann_sample(g, r, Fraction(a.x), rng), None
    if m == "cftp":
        from .evaporation import cftp_subtree
        return cftp_subtree(g, r, _pqr(a, g), rng), None
    if m == "ust-subtree":
        return G.uniform_subtree_of_ust(g, r, _pqr(a, g), rng), None
    if m == "wilson":
        from .spanning import wilson
        return wilson(g, r, rng), None
    if m == "pioneer":
        from .pioneer import pioneer_tree
        lt = pioneer_tree(g, n, rng)
        return lt.tree, lt.labels
    if m == "zm":
        return G.one_edge_per_node(g, r, rng), None
    if m == "am":
        return G.bernoulli_outgoing(g, r, a.q, rng), None
    if m == "sbf":
        return G.size_biased_component(g, r, z_bias=a.p_bias, rng=rng), None
    if m == "dla":
        return G.tdla(g, r, n, rng), None
    if m == "dla-square":
        if g.kind is None or g.kind[0] != "grid":
            raise DomainError("dla-square needs a grid host")
        from .fast import square_dla_jump
        parent, vs, _ = square_dla_jump(g.kind[1], g.kind[2], n, seed=seed, root=r)
        pm = {int(v): int(parent[v]) for v in vs if parent[v] != -1}
        return EmbeddedTree.from_parents(g, pm, r), None
    if m == "idla":
        return G.idla_tree(g, r, n, rng), None
    if m == "prim":
        return G.prim_component(g, r, n, G.assign_weights(g, a.weight_law, rng)), None
    if m == "kruskal":
        return G.kruskal_component(g, r, n, window_eps=a.window, rng=rng), None
    if m == "fpp":
        return G.fpp_tree(g, r, n, a.weight_law, rng), None
    if m == "ust-evap":
        return G.ust_edge_evaporation(g, r, n, rng), None
    raise DomainError("unknown model %r" % m)


def _emit(a, text, name):
    """Write to --out (file, or directory for replicas) or stdout."""
    out = a.out or os.environ.get(OUT_ENV)
    if out is None:
        sys.stdout.write(text)
        return None
    if os.path.isdir(out) or name is not None and not os.path.splitext(out)[1]:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, name or "out.txt")
    else:
        path = out
    with open(path, "w") as f:
        f.write(text)
    return path


def _sample_job(args):
    a, seed = args
    snaps = []
    t, labels = draw_one(a, seed, snaps)
    return seed, serialize(t, labels), snaps


def cmd_sample(a):
    if a.size is None and a.model not in ("zm", "am", "sbf", "boltzmann", "cftp", "ust-subtree",
                                          "wilson", "kernelD", "kernelE", "kernelDr"):
        raise DomainError("--size is required for model %s" % a.model)
    base = a.seed if a.seed is not None else 0
    jobs = [(a, base + i) for i in range(a.replicas)]
    if a.replicas == 1:
        results = [_sample_job(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            results = list(ex.map(_sample_job, jobs))
    for seed, text, snaps in results:
        for k, snap in snaps:
            if a.out or os.environ.get(OUT_ENV):
                _emit(a, snap, "%s_%d_step%d.tree" % (a.model, seed, k))
            else:
                sys.stdout.write("# step %d\n%s\n" % (k, snap))
        if a.format == "json":
            text = json.dumps({"seed": seed, "tree": text}) + "\n"
        out = a.out or os.environ.get(OUT_ENV)
        many = a.replicas > 1 or (out is not None and os.path.isdir(out))
        name = "%s_%d.tree" % (a.model, seed) if many else None
        if a.replicas > 1 and not (a.out or os.environ.get(OUT_ENV)):
            sys.stdout.write(text)
        else:
            _emit(a, text, name)
    return 0


def cmd_enumerate(a):
    from .enumeration import (subtree_polynomial_rooted, subtree_polynomial_unrooted,
                              format_polynomial, count_spanning_trees)
    g = generate(a.graph)
    if a.spanning:
        res = {"spanning_trees": count_spanning_trees(g)}
        text = str(res["spanning_trees"])
    else:
        coeffs = subtree_polynomial_unrooted(g) if a.unrooted else subtree_polynomial_rooted(g, a.root)
        res = {"graph": a.graph, "root": None if a.unrooted else a.root, "coefficients": coeffs}
        text = format_polynomial(coeffs)
    _emit(a, (json.dumps(res) if a.format == "json" else text) + "\n", None)
    return 0


def _load_tree(a):
    if a.tree.startswith("from-ust:"):
        from .spanning import wilson
        g = generate(a.tree[len("from-ust:"):])
        return wilson(g, a.root or 0, np.random.default_rng(a.seed))
    t, _ = read_tree(a.tree)
    return t


def cmd_evaporate(a):
    from . import evaporation as E
    T = _load_tree(a)
    r = a.root if a.root is not None else (T.root if T.rooted else T.anchor)
    rng = np.random.default_rng(a.seed)
    m = a.model
    if m in ("uniform-leaf", "edge") and a.remove is None and (m == "edge" or a.size is None):
        raise DomainError("model %s needs --remove k%s" % (m, " or --size n" if m == "uniform-leaf" else ""))
    if m in ("smallest", "election") and a.size is None:
        raise DomainError("model %s needs --size n" % m)
    if m == "uniform-leaf":
        k = a.remove if a.remove is not None else T.size - a.size
        t = E.uniform_leaf_evaporation(T, r, k, rng)
    elif m == "smallest":
        t = E.smallest_leaf_evaporation(T, r, a.size, rng=rng)
    elif m == "threshold":
        t = E.threshold_evaporation(T, r, a.w, E.tree_edge_weights(T, rng))
    elif m == "election":
        t = E.election_evaporation(T, a.size, rng)
    elif m == "edge":
        t = E.uniform_edge_removal(T, r, a.remove, rng)
    elif m == "edge-threshold":
        t = E.edge_threshold_component(T, r, a.w, E.tree_edge_weights(T, rng))
    else:
        raise DomainError("unknown evaporation %r" % m)
    if not isinstance(t, EmbeddedTree):
        t = _as_embedded(T, t, r)
    text = serialize(t)
    _emit(a, (json.dumps({"seed": a.seed, "tree": text}) + "\n") if a.format == "json" else text, None)
    return 0


def _as_embedded(T, t, r):
    # evaporation results given as vertex sets
    vs = set(t)
    pm = {v: T.parent[v] for v in vs if T.parent[v] != -1 and T.parent[v] in vs}
    root = r if r in vs else min(vs)
    return EmbeddedTree.from_parents(T.host, pm, root)


def cmd_stats(a):
    from . import stats as S
    if a.action == "measure":
        rng = np.random.default_rng(a.seed)
        lines = []
        for p in a.files:
            t, _ = read_tree(p)
            rec = S.measure(t, pairs=a.pairs, rng=rng, from_root=a.from_root, seed=a.seed)
            lines.append(rec.to_json())
        _emit(a, "\n".join(lines) + "\n", None)
    elif a.action == "aggregate":
        agg = S.aggregate(S.read_records(a.files[0]))
        if a.format == "json":
            text = json.dumps(agg) + "\n"
        else:
            text = "".join("%s\t%s\n" % (k, v) for k, v in agg.items())
        _emit(a, text, None)
    elif a.action == "estimate":
        if len(a.files) != 2 or a.n is None or a.m is None:
            raise DomainError("estimate needs two record files and --n, --m")
        field = a.field

        def values(p):
            recs = S.read_records(p)
            if field == "width":
                return [r[k] for r in recs for k in ("width", "height")]
            return [d for r in recs for d in r["dists"]]
        est = S.est_exponent(values(a.files[0]), values(a.files[1]), a.n, a.m, a.method)
        _emit(a, (json.dumps({"method": a.method, "field": field, "estimate": est})
                  if a.format == "json" else "%.6f" % est) + "\n", None)
    elif a.action == "batch":
        from .batch import kernel_c_batch, square_dla_batch
        if not a.out:
            raise DomainError("batch needs --out FILE.jsonl")
        seed = a.seed or 0
        if a.kind == "kernelc":
            kernel_c_batch(a.out, N=a.side, W=a.rect[0], H=a.rect[1], steps=a.steps,
                           replicas=a.replicas, seed=seed)
        else:
            square_dla_batch(a.out, W=a.side, H=a.side, n=a.size, replicas=a.replicas, seed=seed)
    elif a.action == "report":
        report(a.files[0], a.plots, a.format)
    return 0


def report(path, plot_dir, fmt="text"):
    """Delimited summary on stdout and figures in plot_dir."""
    from . import stats as S
    from . import plots as P
    recs = S.read_records(path)
    agg = S.aggregate(recs)
    w = csv.writer(sys.stdout, delimiter="\t", lineterminator="\n")
    w.writerow(["quantity", "value"])
    for k, v in agg.items():
        w.writerow([k, json.dumps(v) if isinstance(v, list) else v])
    if plot_dir:
        os.makedirs(plot_dir, exist_ok=True)
        stem = os.path.splitext(os.path.basename(path))[0]
        ext = "svg" if fmt != "png" else "png"
        widths = [r[k] for r in recs for k in ("width", "height") if r.get(k) is not None]
        dists = [d for r in recs for d in r.get("dists", [])]
        if widths:
            P.histogram_figure(widths, os.path.join(plot_dir, "%s_width.%s" % (stem, ext)), "width")
        if dists:
            P.histogram_figure(dists, os.path.join(plot_dir, "%s_dist.%s" % (stem, ext)), "tree distance")
        if "q_mean" in agg:
            P.degree_figure(agg["q_mean"], agg["q_se"], os.path.join(plot_dir, "%s_degrees.%s" % (stem, ext)))
    return agg


def cmd_render(a):
    from .svg import render_svg, Style
    t, _ = read_tree(a.tree)
    if a.root_marker is False:
        style = Style(scale=a.scale, root_marker=False, grid_lines=a.grid)
    else:
        style = Style(scale=a.scale, grid_lines=a.grid)
    if a.format == "png":
        from .plots import tree_figure
        if not a.out:
            raise DomainError("png output needs --out")
        tree_figure(t, a.out)
        return 0
    _emit(a, render_svg(t, style), None)
    return 0


def cmd_oracle(a):
    from . import enumeration as En
    g = generate(a.graph)
    if a.action == "spanning":
        res = {"spanning_trees": En.count_spanning_trees(g)}
    elif a.action == "count":
        trees = En.enumerate_subtrees(g, a.size, root=a.root)
        res = {"graph": a.graph, "size": a.size, "root": a.root, "count": len(trees)}
    elif a.action == "list":
        trees = En.enumerate_subtrees(g, a.size, root=a.root)
        res = {"trees": [sorted(list(e) for e in t.edges()) if hasattr(t, "edges") else sorted(t)
                         for t in trees]}
    else:
        raise DomainError("unknown oracle action %r" % a.action)
    if a.format == "json":
        text = json.dumps(res) + "\n"
    else:
        text = "".join("%s\t%s\n" % (k, v) for k, v in res.items())
    _emit(a, text, None)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (replica i uses seed+i)")
    common.add_argument("--out", default=None,
                        help="output file or directory (default: $%s, else stdout)" % OUT_ENV)
    common.add_argument("--format", choices=("text", "json", "png"), default="text")

    p = argparse.ArgumentParser(prog="subtrees", description=__doc__)
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("sample", parents=[common], help="draw random subtrees")
    s.add_argument("--model", required=True, choices=MODELS)
    s.add_argument("--graph", required=True, help="host generator, e.g. torus:3, grid:10x10")
    s.add_argument("--root", type=int, default=0)
    s.add_argument("--size", type=int, default=None)
    s.add_argument("--steps", type=steps_arg, default=1000)
    s.add_argument("--start", default=None, help="start tree: rect:WxH (default BFS ball)")
    s.add_argument("--break-rule", choices=("including", "excluding"), default="including")
    s.add_argument("--fast", action="store_true", help="compiled kernel C on regular hosts")
    s.add_argument("--pqr", default=None, help="pqr file or preset: uniform, const:P, geom:C, window:a,b")
    s.add_argument("--x", default="1/2", help="Boltzmann parameter")
    s.add_argument("--q", type=float, default=0.5, help="edge probability for model am")
    s.add_argument("--p-bias", type=float, default=None, help="walk-to-apex probability for sbf")
    s.add_argument("--window", type=float, default=None, help="kruskal size window epsilon")
    s.add_argument("--weight-law", choices=("uniform", "invexp5"), default="uniform")
    s.add_argument("--snapshot-every", type=steps_arg, default=None,
                   help="fixed-size kernels: also write the tree every m steps")
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("enumerate", parents=[common], help="subtree polynomial or spanning count")
    e.add_argument("--graph", required=True)
    e.add_argument("--root", type=int, default=0)
    e.add_argument("--unrooted", action="store_true")
    e.add_argument("--spanning", action="store_true", help="count spanning trees only")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("evaporate", parents=[common], help="shrink a tree by an evaporation model")
    v.add_argument("--model", required=True, choices=EVAPORATIONS)
    v.add_argument("--tree", required=True, help="tree file, or from-ust:<graph-spec>")
    v.add_argument("--root", type=int, default=None)
    v.add_argument("--size", type=int, default=None, help="target size (uniform-leaf, smallest, election)")
    v.add_argument("--remove", type=int, default=None, help="leaves (uniform-leaf) or edges (edge) to remove")
    v.add_argument("--w", type=float, default=0.5, help="threshold")
    v.set_defaults(func=cmd_evaporate)

    st = sub.add_parser("stats", parents=[common], help="measure, aggregate, estimate, batch, report")
    st.add_argument("action", choices=("measure", "aggregate", "estimate", "batch", "report"))
    st.add_argument("files", nargs="*")
    st.add_argument("--pairs", type=int, default=10)
    st.add_argument("--from-root", action="store_true")
    st.add_argument("--method", choices=("mean", "median", "decile"), default="mean")
    st.add_argument("--field", choices=("width", "dist"), default="width")
    st.add_argument("--n", type=float, default=None)
    st.add_argument("--m", type=float, default=None)
    st.add_argument("--kind", choices=("kernelc", "squaredla"), default="kernelc")
    st.add_argument("--side", type=int, default=1000)
    st.add_argument("--rect", type=lambda s: tuple(int(x) for x in s.lower().split("x")), default=(40, 25))
    st.add_argument("--size", type=int, default=5000)
    st.add_argument("--steps", type=steps_arg, default=150_000_000)
    st.add_argument("--replicas", type=int, default=1)
    st.add_argument("--plots", default=None, help="directory for report figures")
    st.set_defaults(func=cmd_stats)

    rd = sub.add_parser("render", parents=[common], help="SVG drawing of a tree file")
    rd.add_argument("tree")
    rd.add_argument("--scale", type=float, default=8.0)
    rd.add_argument("--no-root-marker", dest="root_marker", action="store_false")
    rd.add_argument("--grid", action="store_true")
    rd.set_defaults(func=cmd_render)

    o = sub.add_parser("oracle", parents=[common], help="brute-force counts for small hosts")
    o.add_argument("action", choices=("count", "list", "spanning"))
    o.add_argument("--graph", required=True)
    o.add_argument("--size", type=int, default=1)
    o.add_argument("--root", type=int, default=None)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)  # usage errors exit with status 2
    try:
        return a.func(a)
    except (DomainError, ValueError, ResourceLimitError, RuntimeError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
