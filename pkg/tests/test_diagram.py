import itertools
import xml.etree.ElementTree as ET
from collections import Counter

import pytest

from bipath.diagram import (
    BipathDiagram,
    DiagramError,
    from_json,
    layout,
    position,
    quadrants,
    shares_full_edge,
    to_csv,
    to_json,
    to_svg,
    x_axis,
    y_axis,
)
from bipath.poset import MAX, BipathInterval, BipathShape, enumerate_intervals, lower, upper

SH = BipathShape(3, 2)
B = BipathInterval.full()
L, R, Up, Dn = BipathInterval.left, BipathInterval.right, BipathInterval.up, BipathInterval.down
D1 = Counter([R(1, 1), R(1, 2), R(2, 3), Up(3, 3), Dn(1, 1)])


def test_layout_of_worked_degree_one():
    lay = layout(BipathDiagram(SH, D1, 1))
    xs, ys = x_axis(SH), y_axis(SH)
    cells = {c.interval: (c.region, xs[c.x], ys[c.y]) for c in lay.cells}
    assert cells[R(1, 1)] == ("R", upper(1), lower(1))
    assert cells[R(1, 2)] == ("R", upper(1), lower(2))
    assert cells[R(2, 3)] == ("R", upper(2), MAX)
    assert ys.index(MAX) == 0
    region, x, y = cells[Up(3, 3)]
    assert region == "U" and x == y == upper(3)
    region, x, y = cells[Dn(1, 1)]
    assert region == "D" and x == y == lower(1)


def test_full_interval_sits_in_the_corner():
    lay = layout(BipathDiagram(SH, Counter({B: 2})))
    (c,) = lay.cells
    assert c.multiplicity == 2
    allx = [position(iv, SH)[0] for iv in enumerate_intervals(SH)]
    ally = [position(iv, SH)[1] for iv in enumerate_intervals(SH)]
    assert c.x == min(allx) and c.y == max(ally)


@pytest.mark.parametrize("shape", [BipathShape(3, 2), BipathShape(5, 5), BipathShape(1, 4)])
def test_layout_laws(shape):
    ivs = enumerate_intervals(shape)
    pos = {iv: position(iv, shape) for iv in ivs}
    assert len(set(pos.values())) == len(ivs)
    quads = quadrants(shape)
    for iv in ivs:
        if iv.kind != "B":
            assert quads[iv.kind].contains(*pos[iv])
    for a, b in itertools.permutations(ivs, 2):
        if a.kind == b.kind and a.members(shape) > b.members(shape):
            (xa, ya), (xb, yb) = pos[a], pos[b]
            assert xa <= xb and ya >= yb and (xa, ya) != (xb, yb)
    for a, b in [("L", "U"), ("L", "D"), ("U", "R"), ("R", "D")]:
        assert shares_full_edge(quads[a], quads[b])
    assert not shares_full_edge(quads["L"], quads["R"])


def test_csv_worked_degree_zero():
    d = BipathDiagram(SH, Counter([B, L(0, 0), L(0, 1)]), 0)
    assert to_csv(d).splitlines() == ["region,s,t,multiplicity", "B,,,1", "L,0,0,1", "L,l1,0,1"]
    assert to_csv(BipathDiagram(SH)).splitlines() == ["region,s,t,multiplicity"]


def test_json_round_trip_and_canonical():
    d = BipathDiagram(SH, D1, 1)
    assert from_json(to_json(d)) == d
    shuffled = BipathDiagram(SH, Counter(dict(reversed(list(D1.items())))), 1)
    assert to_json(shuffled) == to_json(d)
    for iv in enumerate_intervals(SH):
        one = BipathDiagram(SH, Counter({iv: 3}))
        assert from_json(to_json(one)) == one


def test_json_errors():
    with pytest.raises(DiagramError):
        from_json("{")
    with pytest.raises(DiagramError):
        from_json('{"shape": [3, 2], "points": [{"region": "U", "s": "l1", "t": "l1"}]}')
    with pytest.raises(DiagramError):
        from_json('{"shape": [3, 2], "points": [{"region": "B", "s": "", "t": "", "multiplicity": 0}]}')


def test_svg_is_well_formed():
    for d in (BipathDiagram(SH), BipathDiagram(SH, D1, 1), BipathDiagram(SH, Counter({B: 1, L(3, 2): 4}))):
        root = ET.fromstring(to_svg(d))
        assert root.tag.endswith("svg")
        ns = "{http://www.w3.org/2000/svg}"
        regions = [r for r in root.iter(ns + "rect") if r.get("class") == "region"]
        assert {r.get("data-region") for r in regions} == {"L", "U", "R", "D"}
        points = [g for g in root.iter(ns + "g") if g.get("class") == "point"]
        assert len(points) == len(d.points)
        ticks = [t.text for t in root.iter(ns + "text") if t.get("class") == "xtick"]
        assert ticks[:2] == ["l2", "l2"]
