"""Combinatorics of the bipath poset B_{n,m}.

The poset has a global minimum ``0``, a global maximum ``1``, an upper path
``0 < u1 < ... < un < 1`` and a lower path ``0 < l1 < ... < lm < 1``.
Along either path a vertex is addressed by its *position*: 0 is the
minimum, ``1..len`` the inner vertices, ``len + 1`` the maximum.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple

UPPER = "U"
LOWER = "D"
PATHS = (UPPER, LOWER)


class Vertex(NamedTuple):
    kind: str  # "min", "upper", "lower", "max"
    index: int = 0

    def __str__(self) -> str:
        if self.kind == "min":
            return "0"
        if self.kind == "max":
            return "1"
        return ("u" if self.kind == "upper" else "l") + str(self.index)

    def pretty(self) -> str:
        """Unicode form used on plots: 0̂, 1̂, 3, 2′."""
        if self.kind == "min":
            return "0̂"
        if self.kind == "max":
            return "1̂"
        return str(self.index) + ("" if self.kind == "upper" else "′")


MIN = Vertex("min")
MAX = Vertex("max")


def upper(i: int) -> Vertex:
    return Vertex("upper", i)


def lower(j: int) -> Vertex:
    return Vertex("lower", j)


def parse_vertex(text: str) -> Vertex:
    text = text.strip()
    if text == "0":
        return MIN
    if text == "1":
        return MAX
    m = re.fullmatch(r"([ul])(\d+)", text)
    if not m:
        raise ValueError(f"bad vertex {text!r}")
    return Vertex("upper" if m.group(1) == "u" else "lower", int(m.group(2)))


@dataclass(frozen=True)
class BipathShape:
    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError(f"bipath lengths must be >= 1, got ({self.n}, {self.m})")

    def length(self, path: str) -> int:
        return self.n if path == UPPER else self.m

    def vertices(self) -> list[Vertex]:
        """All vertices in the order 0, u1..un, l1..lm, 1."""
        return [MIN, *map(upper, range(1, self.n + 1)), *map(lower, range(1, self.m + 1)), MAX]

    def at(self, path: str, pos: int) -> Vertex:
        """The vertex at ``pos`` along ``path``."""
        last = self.length(path) + 1
        if not 0 <= pos <= last:
            raise ValueError(f"position {pos} outside path {path} of shape {self}")
        if pos == 0:
            return MIN
        if pos == last:
            return MAX
        return upper(pos) if path == UPPER else lower(pos)

    def path(self, path: str) -> list[Vertex]:
        return [self.at(path, k) for k in range(self.length(path) + 2)]

    def arrows(self) -> list[tuple[Vertex, Vertex]]:
        """Hasse arrows: the upper path first, then the lower path."""
        out = []
        for path in PATHS:
            vs = self.path(path)
            out.extend(zip(vs, vs[1:]))
        return out

    def contains(self, v: Vertex) -> bool:
        if v.kind in ("min", "max"):
            return v.index == 0
        bound = self.n if v.kind == "upper" else self.m
        return 1 <= v.index <= bound

    def leq(self, a: Vertex, b: Vertex) -> bool:
        if a == b or a == MIN or b == MAX:
            return True
        if a == MAX or b == MIN:
            return False
        return a.kind == b.kind and a.index <= b.index

    def reflect(self, v: Vertex) -> Vertex:
        """The order-reversing involution of B_{n,m}."""
        if v == MIN:
            return MAX
        if v == MAX:
            return MIN
        bound = self.n if v.kind == "upper" else self.m
        return Vertex(v.kind, bound + 1 - v.index)

    def __str__(self) -> str:
        return f"B({self.n},{self.m})"


class PathInterval(NamedTuple):
    """Interval ``[b, d]`` of positions along one path (0 = min, len+1 = max)."""

    path: str
    b: int
    d: int

    def touches_min(self) -> bool:
        return self.b == 0

    def touches_max(self, shape: BipathShape) -> bool:
        return self.d == shape.length(self.path) + 1

    def label(self, shape: BipathShape) -> str:
        return f"[{shape.at(self.path, self.b)},{shape.at(self.path, self.d)}]"


def hom_nonzero(i: PathInterval, j: PathInterval) -> bool:
    """Whether Hom(k_i, k_j) is nonzero, i.e. ``i ⊵ j``."""
    if i.path != j.path:
        raise ValueError("intervals lie on different paths")
    a, b = i.b, i.d
    c, d = j.b, j.d
    return c <= a <= d <= b


def projective_injective_order(shape: BipathShape, path: str) -> list[PathInterval]:
    """The chain [0,0] ◁ [0,1] ◁ ... ◁ [0,1̂] ◁ [1,1̂] ◁ ... ◁ [1̂,1̂]."""
    last = shape.length(path) + 1
    left = [PathInterval(path, 0, d) for d in range(last + 1)]
    right = [PathInterval(path, b, last) for b in range(1, last + 1)]
    return left + right


def label_rank(iv: PathInterval, shape: BipathShape) -> int:
    """Position of a min- or max-touching interval in the chain above."""
    last = shape.length(iv.path) + 1
    if iv.b == 0:
        return iv.d
    if iv.d == last:
        return last + iv.b
    raise ValueError(f"{iv} touches neither endpoint")


def canonical_key(iv: PathInterval, shape: BipathShape) -> tuple:
    """Summand order: endpoint-touching intervals by the chain, then inner ones."""
    last = shape.length(iv.path) + 1
    if iv.b == 0 or iv.d == last:
        return (0, label_rank(iv, shape))
    return (1, iv.b, iv.d)


KINDS = ("B", "L", "R", "U", "D")


@dataclass(frozen=True, order=True)
class BipathInterval:
    """An interval of B_{n,m}.

    ``kind`` is one of B, L, R, U, D.  The integer fields are path positions:

    * L: ``i`` = upper reach (0..n), ``j`` = lower reach (0..m)
    * R: ``i`` = upper start (1..n+1), ``j`` = lower start (1..m+1)
    * U: ``i``..``j`` = birth..death on the upper path (1..n)
    * D: ``i``..``j`` = birth..death on the lower path (1..m)

    The display pair ``<s, t>`` follows the clockwise walk convention,
    so D intervals display as ``<death, birth>``.
    """

    kind: str
    i: int = 0
    j: int = 0

    @classmethod
    def full(cls) -> "BipathInterval":
        return cls("B")

    @classmethod
    def left(cls, upper_reach: int, lower_reach: int) -> "BipathInterval":
        return cls("L", upper_reach, lower_reach)

    @classmethod
    def right(cls, upper_start: int, lower_start: int) -> "BipathInterval":
        return cls("R", upper_start, lower_start)

    @classmethod
    def up(cls, birth: int, death: int) -> "BipathInterval":
        return cls("U", birth, death)

    @classmethod
    def down(cls, birth: int, death: int) -> "BipathInterval":
        return cls("D", birth, death)

    def validate(self, shape: BipathShape) -> None:
        n, m = shape.n, shape.m
        k, i, j = self.kind, self.i, self.j
        ok = {
            "B": i == 0 and j == 0,
            "L": 0 <= i <= n and 0 <= j <= m,
            "R": 1 <= i <= n + 1 and 1 <= j <= m + 1,
            "U": 1 <= i <= j <= n,
            "D": 1 <= i <= j <= m,
        }.get(k)
        if not ok:
            raise ValueError(f"{self!r} is not an interval of {shape}")

    def members(self, shape: BipathShape) -> frozenset[Vertex]:
        n, m = shape.n, shape.m
        if self.kind == "B":
            return frozenset(shape.vertices())
        if self.kind == "L":
            up = [shape.at(UPPER, k) for k in range(0, self.i + 1)]
            lo = [shape.at(LOWER, k) for k in range(0, self.j + 1)]
        elif self.kind == "R":
            up = [shape.at(UPPER, k) for k in range(self.i, n + 2)]
            lo = [shape.at(LOWER, k) for k in range(self.j, m + 2)]
        elif self.kind == "U":
            up, lo = [upper(k) for k in range(self.i, self.j + 1)], []
        else:
            up, lo = [], [lower(k) for k in range(self.i, self.j + 1)]
        return frozenset(up + lo)

    def display(self, shape: BipathShape) -> tuple[Vertex, Vertex] | None:
        """The ``<s, t>`` pair, or None for B."""
        if self.kind == "B":
            return None
        if self.kind == "L":
            return shape.at(LOWER, self.j), shape.at(UPPER, self.i)
        if self.kind == "R":
            return shape.at(UPPER, self.i), shape.at(LOWER, self.j)
        if self.kind == "U":
            return upper(self.i), upper(self.j)
        return lower(self.j), lower(self.i)

    def render(self, shape: BipathShape) -> str:
        if self.kind == "B":
            return "B"
        s, t = self.display(shape)
        return f"{self.kind}<{s},{t}>"

    def pretty(self, shape: BipathShape) -> str:
        if self.kind == "B":
            return f"B_{{{shape.n},{shape.m}}}"
        s, t = self.display(shape)
        return f"⟨{s.pretty()},{t.pretty()}⟩"

    def sort_key(self) -> tuple[int, int, int]:
        return (KINDS.index(self.kind), self.i, self.j)

    def reflect(self, shape: BipathShape) -> "BipathInterval":
        """Image under the order-reversing involution of the poset."""
        n, m = shape.n, shape.m
        if self.kind == "B":
            return self
        if self.kind == "L":
            return BipathInterval("R", n + 1 - self.i, m + 1 - self.j)
        if self.kind == "R":
            return BipathInterval("L", n + 1 - self.i, m + 1 - self.j)
        if self.kind == "U":
            return BipathInterval("U", n + 1 - self.j, n + 1 - self.i)
        return BipathInterval("D", m + 1 - self.j, m + 1 - self.i)


def from_display(kind: str, s: Vertex, t: Vertex, shape: BipathShape) -> BipathInterval:
    """Build an interval from its region tag and ``<s, t>`` pair."""

    def pos(v: Vertex, path: str) -> int:
        if v == MIN:
            return 0
        if v == MAX:
            return shape.length(path) + 1
        want = "upper" if path == UPPER else "lower"
        if v.kind != want:
            raise ValueError(f"{v} is not on the {want} path")
        return v.index

    if kind == "L":
        iv = BipathInterval("L", pos(t, UPPER), pos(s, LOWER))
    elif kind == "R":
        iv = BipathInterval("R", pos(s, UPPER), pos(t, LOWER))
    elif kind == "U":
        iv = BipathInterval("U", pos(s, UPPER), pos(t, UPPER))
    elif kind == "D":
        iv = BipathInterval("D", pos(t, LOWER), pos(s, LOWER))
    else:
        raise ValueError(f"unknown interval kind {kind!r}")
    iv.validate(shape)
    return iv


_INTERVAL_RE = re.compile(r"([LRUD])<([^,<>]+),([^,<>]+)>")


def parse_interval(text: str, shape: BipathShape) -> BipathInterval:
    text = text.strip()
    if text == "B":
        return BipathInterval.full()
    m = _INTERVAL_RE.fullmatch(text)
    if not m:
        raise ValueError(f"bad interval {text!r}")
    return from_display(m.group(1), parse_vertex(m.group(2)), parse_vertex(m.group(3)), shape)


def enumerate_intervals(shape: BipathShape) -> list[BipathInterval]:
    n, m = shape.n, shape.m
    out = [BipathInterval.full()]
    out += [BipathInterval.left(i, j) for i in range(n + 1) for j in range(m + 1)]
    out += [BipathInterval.right(i, j) for i in range(1, n + 2) for j in range(1, m + 2)]
    out += [BipathInterval.up(b, d) for b in range(1, n + 1) for d in range(b, n + 1)]
    out += [BipathInterval.down(b, d) for b in range(1, m + 1) for d in range(b, m + 1)]
    return out


def dim_vector(iv: BipathInterval, shape: BipathShape) -> dict[Vertex, int]:
    inside = iv.members(shape)
    return {v: int(v in inside) for v in shape.vertices()}


def iter_path_intervals(shape: BipathShape, path: str) -> Iterator[PathInterval]:
    last = shape.length(path) + 1
    for b in range(last + 1):
        for d in range(b, last + 1):
            yield PathInterval(path, b, d)


def trace(iv: BipathInterval, shape: BipathShape, path: str) -> PathInterval | None:
    """The part of ``iv`` lying on ``path`` (endpoints included), if any."""
    inside = iv.members(shape)
    pos = [k for k, v in enumerate(shape.path(path)) if v in inside]
    if not pos:
        return None
    return PathInterval(path, pos[0], pos[-1])
