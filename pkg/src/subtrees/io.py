"""Plain-text tree files.

    tree <root|unrooted> <host-spec>
    vertex <v>                     (only for a single-vertex unrooted tree)
    edge <parent> <child> [label]

host-spec is a generator string (torus:3, grid:4x3, ...) or `inline`, in
which case the host's own text block follows after a `host` line.
"""
from .graph import EmbeddedTree, generate, spec_of, parse_graph, edge_key


def serialize(t, labels=None):
    """TreeFile text for t; labels maps edge keys to integers (pioneer trees)."""
    if hasattr(t, "labels") and hasattr(t, "tree"):
        labels = t.labels if labels is None else labels
        t = t.tree
    spec = spec_of(t.host) or "inline"
    head = "tree %s %s" % (t.root if t.rooted else "unrooted", spec)
    lines = [head]
    if not t.rooted and t.size == 1:
        lines.append("vertex %d" % t.anchor)
    for v in _bfs(t):
        p = t.parent[v]
        if p == -1:
            continue
        line = "edge %d %d" % (p, v)
        if labels:
            line += " %d" % labels[edge_key(p, v)]
        lines.append(line)
    if spec == "inline":
        lines.append("host")
        lines.append(t.host.to_text().rstrip("\n"))
    return "\n".join(lines) + "\n"


def _bfs(t):
    out = [t.anchor]
    i = 0
    while i < len(out):
        out.extend(sorted(set(t.children(out[i]))))
        i += 1
    return out


def parse(text, host=None):
    """EmbeddedTree (and labels dict, possibly empty) from TreeFile text."""
    raw = text.splitlines()
    if "host" in (ln.strip() for ln in raw):
        k = [ln.strip() for ln in raw].index("host")
        body, host_text = raw[:k], "\n".join(raw[k + 1:])
    else:
        body, host_text = raw, None
    body = [ln.split() for ln in body if ln.strip() and not ln.lstrip().startswith("#")]
    if not body or body[0][0] != "tree" or len(body[0]) != 3:
        raise ValueError("tree file must start with 'tree <root|unrooted> <host-spec>'")
    _, rootword, spec = body[0]
    if host is None:
        if spec == "inline":
            if host_text is None:
                raise ValueError("inline host block missing")
            host = parse_graph(host_text)
        else:
            host = generate(spec)
    vertex = None
    edges = []
    labels = {}
    for parts in body[1:]:
        if parts[0] == "vertex" and len(parts) == 2:
            vertex = int(parts[1])
        elif parts[0] == "edge" and len(parts) in (3, 4):
            p, c = int(parts[1]), int(parts[2])
            edges.append((p, c))
            if len(parts) == 4:
                labels[edge_key(p, c)] = int(parts[3])
        else:
            raise ValueError("bad tree file line: %s" % " ".join(parts))
    rooted = rootword != "unrooted"
    root = int(rootword) if rooted else (edges[0][0] if edges else vertex)
    if root is None:
        raise ValueError("unrooted single-vertex tree needs a 'vertex' line")
    pm = {}
    for p, c in edges:
        if c in pm:
            raise ValueError("vertex %d has two parents" % c)
        if not host.has_edge(p, c):
            raise ValueError("edge %d-%d is not in the host" % (p, c))
        pm[c] = p
    t = EmbeddedTree.from_parents(host, pm, root, rooted=True)
    if not rooted:
        t = t.unrooted()
    return t, labels


def write_tree(path, t, labels=None):
    with open(path, "w") as f:
        f.write(serialize(t, labels))


def read_tree(path, host=None):
    with open(path) as f:
        return parse(f.read(), host)
