"""Deterministic SVG drawings of trees on torus and grid hosts."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Style:
    scale: float = 8.0
    stroke: str = "#1f3a5f"
    width: float = 1.5
    margin: float = 1.0
    root_marker: bool = True
    root_color: str = "#c0392b"
    dot_radius: float = 2.5
    grid_lines: bool = False


def _fmt(x):
    s = "%.3f" % x
    s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _segments(t):
    """Unit-spacing segments; edges across the torus seam come back as two stubs."""
    host = t.host
    kind = host.kind
    if kind is None or kind[0] not in ("torus", "grid"):
        raise ValueError("only torus and grid hosts can be drawn")
    N = kind[1]
    segs = []
    for (a, b) in sorted(t.edges()):
        x1, y1 = host.coords(a)
        x2, y2 = host.coords(b)
        if kind[0] == "torus" and (abs(x1 - x2) > 1 or abs(y1 - y2) > 1):
            # wrap-around edge: a stub from each end to the seam
            dx = x2 - x1
            dy = y2 - y1
            sx = 0 if dx == 0 else (-1 if dx > 0 else 1)
            sy = 0 if dy == 0 else (-1 if dy > 0 else 1)
            segs.append((x1, y1, x1 + 0.5 * sx, y1 + 0.5 * sy))
            segs.append((x2, y2, x2 - 0.5 * sx, y2 - 0.5 * sy))
        else:
            segs.append((x1, y1, x2, y2))
    return segs, N, (N if kind[0] == "torus" else kind[2])


def render_svg(t, style=None):
    """SVG text for tree t; equal input gives byte-identical output."""
    st = style or Style()
    segs, W, H = _segments(t)
    s = st.scale
    m = st.margin
    width = (W - 1 + 2 * m) * s
    height = (H - 1 + 2 * m) * s
    X = lambda x: (x + m) * s
    Y = lambda y: (H - 1 - y + m) * s  # y axis upwards
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<svg xmlns="http://www.w3.org/2000/svg" width="%s" height="%s" viewBox="0 0 %s %s">'
           % (_fmt(width), _fmt(height), _fmt(width), _fmt(height)),
           '<rect width="100%" height="100%" fill="white"/>']
    if st.grid_lines:
        out.append('<g stroke="#eeeeee" stroke-width="0.5">')
        for x in range(W):
            out.append('<line x1="%s" y1="%s" x2="%s" y2="%s"/>' % (_fmt(X(x)), _fmt(Y(0)), _fmt(X(x)), _fmt(Y(H - 1))))
        for y in range(H):
            out.append('<line x1="%s" y1="%s" x2="%s" y2="%s"/>' % (_fmt(X(0)), _fmt(Y(y)), _fmt(X(W - 1)), _fmt(Y(y))))
        out.append('</g>')
    out.append('<g stroke="%s" stroke-width="%s" stroke-linecap="round">' % (st.stroke, _fmt(st.width)))
    for (x1, y1, x2, y2) in segs:
        out.append('<line x1="%s" y1="%s" x2="%s" y2="%s"/>' % (_fmt(X(x1)), _fmt(Y(y1)), _fmt(X(x2)), _fmt(Y(y2))))
    out.append('</g>')
    if t.size == 1:
        x, y = t.host.coords(t.anchor)
        out.append('<circle cx="%s" cy="%s" r="%s" fill="%s"/>' % (_fmt(X(x)), _fmt(Y(y)), _fmt(st.dot_radius), st.stroke))
    if st.root_marker and t.rooted:
        x, y = t.host.coords(t.root)
        out.append('<circle cx="%s" cy="%s" r="%s" fill="%s"/>' % (_fmt(X(x)), _fmt(Y(y)), _fmt(st.dot_radius), st.root_color))
    out.append('</svg>')
    return "\n".join(out) + "\n"


def write_svg(path, t, style=None):
    with open(path, "w") as f:
        f.write(render_svg(t, style))
