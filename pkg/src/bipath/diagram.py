"""Bipath persistence diagrams: data model, planar layout and serialization.

The layout uses one global grid.  Columns, left to right, are the lower
vertices m'..1', then 0̂, the upper vertices 1..n and 1̂.  Rows, bottom to
top, are 1̂, m'..1', 0̂, 1..n.  The four quadrants hold the L (top left),
U (top right), R (bottom right) and D (bottom left) intervals, and the
full interval sits just outside the top-left corner.  Bigger intervals
move left and up within each quadrant.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional
from xml.sax.saxutils import escape

from .poset import (
    MAX,
    MIN,
    BipathInterval,
    BipathShape,
    Vertex,
    from_display,
    lower,
    parse_vertex,
    upper,
)


class DiagramError(ValueError):
    pass


@dataclass
class BipathDiagram:
    shape: BipathShape
    points: Counter = field(default_factory=Counter)
    degree: Optional[int] = None

    def __post_init__(self) -> None:
        self.points = Counter({iv: int(c) for iv, c in self.points.items() if c})
        for iv, c in self.points.items():
            if c < 0:
                raise DiagramError(f"negative multiplicity for {iv}")
            iv.validate(self.shape)

    def sorted_points(self) -> list[tuple[BipathInterval, int]]:
        return sorted(self.points.items(), key=lambda kv: kv[0].sort_key())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipathDiagram):
            return NotImplemented
        return (self.shape, self.degree, self.points) == (other.shape, other.degree, other.points)


# --- layout -----------------------------------------------------------------


def x_axis(shape: BipathShape) -> list[Vertex]:
    return [lower(j) for j in range(shape.m, 0, -1)] + [MIN] + [upper(i) for i in range(1, shape.n + 1)] + [MAX]


def y_axis(shape: BipathShape) -> list[Vertex]:
    """Row vertices from bottom to top."""
    return [MAX] + [lower(j) for j in range(shape.m, 0, -1)] + [MIN] + [upper(i) for i in range(1, shape.n + 1)]


@dataclass(frozen=True)
class Rect:
    """Inclusive cell ranges."""

    x0: int
    x1: int
    y0: int
    y1: int

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


def quadrants(shape: BipathShape) -> dict[str, Rect]:
    n, m = shape.n, shape.m
    width = m + n + 2
    return {
        "L": Rect(0, m, m + 1, width - 1),
        "U": Rect(m + 1, width - 1, m + 1, width - 1),
        "R": Rect(m + 1, width - 1, 0, m),
        "D": Rect(0, m, 0, m),
    }


def shares_full_edge(a: Rect, b: Rect) -> bool:
    """Whether two rectangles of cells meet along one complete common side."""
    if a.x1 + 1 == b.x0 or b.x1 + 1 == a.x0:
        return (a.y0, a.y1) == (b.y0, b.y1)
    if a.y1 + 1 == b.y0 or b.y1 + 1 == a.y0:
        return (a.x0, a.x1) == (b.x0, b.x1)
    return False


@dataclass(frozen=True)
class Cell:
    interval: BipathInterval
    region: str
    x: int
    y: int
    multiplicity: int


@dataclass
class PlanarLayout:
    shape: BipathShape
    cells: list[Cell]
    quadrants: dict[str, Rect]
    xs: list[Vertex]
    ys: list[Vertex]


def position(iv: BipathInterval, shape: BipathShape) -> tuple[int, int]:
    """Grid cell of an interval: ``s`` picks the column and ``t`` the row."""
    xs, ys = x_axis(shape), y_axis(shape)
    if iv.kind == "B":
        return -1, len(ys)
    s, t = iv.display(shape)
    return xs.index(s), ys.index(t)


def layout(d: BipathDiagram) -> PlanarLayout:
    cells = []
    for iv, c in d.sorted_points():
        x, y = position(iv, d.shape)
        cells.append(Cell(iv, iv.kind, x, y, c))
    return PlanarLayout(d.shape, cells, quadrants(d.shape), x_axis(d.shape), y_axis(d.shape))


# --- serialization --------------------------------------------------------------


def _point_fields(iv: BipathInterval, shape: BipathShape) -> tuple[str, str]:
    if iv.kind == "B":
        return "", ""
    s, t = iv.display(shape)
    return str(s), str(t)


def to_json_dict(d: BipathDiagram) -> dict:
    points = []
    for iv, c in d.sorted_points():
        s, t = _point_fields(iv, d.shape)
        points.append({"region": iv.kind, "s": s, "t": t, "multiplicity": c})
    return {"shape": [d.shape.n, d.shape.m], "degree": d.degree, "points": points}


def from_json_dict(data: Mapping) -> BipathDiagram:
    try:
        shape = BipathShape(*map(int, data["shape"]))
        pts: Counter = Counter()
        for p in data.get("points", []):
            kind = p["region"]
            if kind == "B":
                iv = BipathInterval.full()
            else:
                iv = from_display(kind, parse_vertex(p["s"]), parse_vertex(p["t"]), shape)
            mult = int(p.get("multiplicity", 1))
            if mult < 1:
                raise DiagramError(f"multiplicity must be positive, got {mult}")
            pts[iv] += mult
        degree = data.get("degree")
        return BipathDiagram(shape, pts, None if degree is None else int(degree))
    except (KeyError, TypeError, ValueError) as exc:
        raise DiagramError(f"malformed diagram: {exc}") from exc


def to_json(d: BipathDiagram) -> str:
    return json.dumps(to_json_dict(d), sort_keys=True, ensure_ascii=False)


def from_json(text: str) -> BipathDiagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramError(f"invalid JSON: {exc}") from exc
    return from_json_dict(data)


def to_csv(d: BipathDiagram) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["region", "s", "t", "multiplicity"])
    for iv, c in d.sorted_points():
        w.writerow([iv.kind, *_point_fields(iv, d.shape), c])
    return buf.getvalue()


_COLORS = {"B": "#555555", "L": "#1f77b4", "U": "#2ca02c", "R": "#d62728", "D": "#9467bd"}
_TINT = {"L": "#e8f0fa", "U": "#eaf6ea", "R": "#fbe9e9", "D": "#f1ecf7"}


def to_svg(d: BipathDiagram, cell: int = 40) -> str:
    lay = layout(d)
    cols, rows = len(lay.xs), len(lay.ys)
    margin = cell * 2
    width = margin * 2 + (cols + 1) * cell
    height = margin * 2 + (rows + 1) * cell

    def cx(x: int) -> float:
        return margin + (x + 1) * cell + cell / 2

    def cy(y: int) -> float:
        # row 0 is the bottom row; one extra row on top for the B marker
        return margin + (rows - y) * cell + cell / 2

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="{cell // 3}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if d.degree is not None:
        out.append(f'<text x="{margin}" y="{margin / 2}">degree {d.degree}</text>')
    for name, r in lay.quadrants.items():
        x, y = cx(r.x0) - cell / 2, cy(r.y1) - cell / 2
        w, h = (r.x1 - r.x0 + 1) * cell, (r.y1 - r.y0 + 1) * cell
        out.append(
            f'<rect class="region" data-region="{name}" x="{x}" y="{y}" width="{w}" height="{h}" '
            f'fill="{_TINT[name]}" stroke="#333" stroke-width="1.5"/>'
        )
    for k in range(cols):
        out.append(f'<line x1="{cx(k) - cell / 2}" y1="{cy(rows - 1) - cell / 2}" x2="{cx(k) - cell / 2}" '
                   f'y2="{cy(0) + cell / 2}" stroke="#ccc" stroke-width="0.5"/>')
    for k in range(rows):
        out.append(f'<line x1="{cx(0) - cell / 2}" y1="{cy(k) + cell / 2}" x2="{cx(cols - 1) + cell / 2}" '
                   f'y2="{cy(k) + cell / 2}" stroke="#ccc" stroke-width="0.5"/>')
    # tick labels on all four sides; opposite sides match, hinting at the torus gluing
    for k, v in enumerate(lay.xs):
        label = escape(str(v))
        out.append(f'<text class="xtick" x="{cx(k)}" y="{cy(0) + cell}" text-anchor="middle">{label}</text>')
        out.append(f'<text class="xtick" x="{cx(k)}" y="{cy(rows - 1) - cell * 0.8}" text-anchor="middle">{label}</text>')
    for k, v in enumerate(lay.ys):
        label = escape(str(v))
        out.append(f'<text class="ytick" x="{cx(0) - cell * 0.9}" y="{cy(k) + 4}" text-anchor="end">{label}</text>')
        out.append(f'<text class="ytick" x="{cx(cols - 1) + cell * 0.9}" y="{cy(k) + 4}" text-anchor="start">{label}</text>')
    for c in lay.cells:
        color = _COLORS[c.region]
        title = escape(c.interval.render(d.shape))
        out.append(
            f'<g class="point" data-region="{c.region}"><title>{title} x{c.multiplicity}</title>'
            f'<circle cx="{cx(c.x)}" cy="{cy(c.y)}" r="{cell / 3}" fill="{color}" fill-opacity="0.85"/>'
            f'<text x="{cx(c.x)}" y="{cy(c.y) + 4}" text-anchor="middle" fill="white">{c.multiplicity}</text></g>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(d: BipathDiagram, fmt: str) -> bytes:
    if fmt == "json":
        return (to_json(d) + "\n").encode()
    if fmt == "csv":
        return to_csv(d).encode()
    if fmt == "svg":
        return to_svg(d).encode()
    raise DiagramError(f"unknown format {fmt!r}")
