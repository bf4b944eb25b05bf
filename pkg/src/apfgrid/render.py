"""Static SVG of a trace: one polyline per robot, coloured by light, plus target outlines."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

from .fileio import TraceFile
from .geometry import GridPoint
from .model import Light, same_shape

COLORS = {
    Light.OFF: "#9e9e9e",
    Light.TERMINAL1: "#ff9800",
    Light.SYMMETRIC: "#9c27b0",
    Light.DECIDER: "#3f51b5",
    Light.CALL: "#00bcd4",
    Light.LEADER1: "#e91e63",
    Light.LEADER: "#d50000",
    Light.DONE: "#2e7d32",
}

CELL = 24
MARGIN = 2


def _placed_targets(final: list, targets: list) -> list:
    """Targets shifted (and flipped if needed) onto the final positions when they match."""
    if not same_shape(final, targets):
        return list(targets)
    fx = min(p[0] for p in final)
    fy = min(p[1] for p in final)
    fset = {(p[0], p[1]) for p in final}
    for flip in (1, -1):
        img = [(x, flip * y) for x, y in targets]
        mx = min(x for x, _ in img)
        my = min(y for _, y in img)
        placed = [(x - mx + fx, y - my + fy) for x, y in img]
        if set(placed) == fset:
            return placed
    return list(targets)


def render_svg(trace: TraceFile) -> str:
    paths: dict = {r.id: [(r.pos, r.light)] for r in trace.initial.robots}
    for rec in trace.records:
        step = (rec.pos_after, rec.light_after)
        if paths[rec.robot][-1] != step:
            paths[rec.robot].append(step)
    final = [seq[-1][0] for seq in paths.values()]
    targets = _placed_targets(final, trace.targets)

    pts = [p for seq in paths.values() for p, _ in seq] + [GridPoint(*t) for t in targets]
    x0 = min(p[0] for p in pts) - MARGIN
    x1 = max(p[0] for p in pts) + MARGIN
    y0 = min(p[1] for p in pts) - MARGIN
    y1 = max(p[1] for p in pts) + MARGIN
    width = (x1 - x0) * CELL
    height = (y1 - y0) * CELL

    def sx(x):
        return (x - x0) * CELL

    def sy(y):
        return (y1 - y) * CELL

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           '<g stroke="#eeeeee" stroke-width="1">']
    for x in range(x0, x1 + 1):
        out.append(f'<line x1="{sx(x)}" y1="0" x2="{sx(x)}" y2="{height}"/>')
    for y in range(y0, y1 + 1):
        out.append(f'<line x1="0" y1="{sy(y)}" x2="{width}" y2="{sy(y)}"/>')
    out.append("</g>")

    out.append('<g fill="none" stroke="#000000" stroke-width="1.5" stroke-dasharray="3,2">')
    for x, y in targets:
        out.append(f'<rect x="{sx(x) - 8}" y="{sy(y) - 8}" width="16" height="16"/>')
    out.append("</g>")

    for rid, seq in paths.items():
        coords = " ".join(f"{sx(p[0])},{sy(p[1])}" for p, _ in seq)
        color = COLORS[seq[-1][1]]
        out.append(f'<polyline data-robot={quoteattr(str(rid))} points="{coords}" fill="none" '
                   f'stroke="{color}" stroke-width="2" stroke-opacity="0.7"/>')
        # one dot per stop, coloured by the light held there
        for p, light in seq:
            out.append(f'<circle cx="{sx(p[0])}" cy="{sy(p[1])}" r="3" fill="{COLORS[light]}"/>')
        p, light = seq[-1]
        out.append(f'<circle cx="{sx(p[0])}" cy="{sy(p[1])}" r="6" fill="{COLORS[light]}" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
