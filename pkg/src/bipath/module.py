"""Bipath persistence modules as dimension data plus Hasse-arrow matrices."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from . import ff
from .poset import (
    LOWER,
    MAX,
    MIN,
    PATHS,
    UPPER,
    BipathInterval,
    BipathShape,
    Vertex,
    enumerate_intervals,
    parse_vertex,
)

Arrow = tuple[Vertex, Vertex]


class ModuleValidationError(ValueError):
    """Raised when a module violates shape constraints or commutativity."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class BipathModule:
    shape: BipathShape
    p: int
    dims: dict[Vertex, int]
    maps: dict[Arrow, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ff.FieldSpec(self.p)
        for v in self.shape.vertices():
            self.dims.setdefault(v, 0)
        for a, b in self.shape.arrows():
            if (a, b) not in self.maps:
                if self.dims[a] and self.dims[b]:
                    raise ModuleValidationError([f"missing map {a}->{b}"])
                self.maps[(a, b)] = ff.zeros(self.dims[b], self.dims[a])
            else:
                self.maps[(a, b)] = np.asarray(self.maps[(a, b)], dtype=ff.DTYPE) % self.p

    def dim(self, v: Vertex) -> int:
        return self.dims[v]

    def arrow(self, a: Vertex, b: Vertex) -> np.ndarray:
        return self.maps[(a, b)]

    def path_maps(self, path: str) -> list[np.ndarray]:
        vs = self.shape.path(path)
        return [self.maps[(a, b)] for a, b in zip(vs, vs[1:])]

    def composite(self, path: str, start: int = 0, end: Optional[int] = None) -> np.ndarray:
        """Composite along ``path`` from position ``start`` to ``end``."""
        vs = self.shape.path(path)
        end = len(vs) - 1 if end is None else end
        mats = self.path_maps(path)[start:end]
        return ff.chain_product(mats, self.p, self.dims[vs[start]])

    def total_composite(self) -> np.ndarray:
        return self.composite(UPPER)

    def dim_vector(self) -> dict[Vertex, int]:
        return dict(self.dims)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def copy(self) -> "BipathModule":
        return BipathModule(self.shape, self.p, dict(self.dims), {k: v.copy() for k, v in self.maps.items()})


@dataclass
class PathModule:
    """An equioriented path module: ``dims[k]`` and ``maps[k]: dims[k] -> dims[k+1]``."""

    path: str
    p: int
    dims: list[int]
    maps: list[np.ndarray]

    def __post_init__(self) -> None:
        if len(self.maps) != len(self.dims) - 1:
            raise ValueError("need exactly one map per consecutive pair of vertices")
        for k, mat in enumerate(self.maps):
            if mat.shape != (self.dims[k + 1], self.dims[k]):
                raise ValueError(
                    f"map {k}->{k + 1} has shape {mat.shape}, expected {(self.dims[k + 1], self.dims[k])}"
                )

    def __len__(self) -> int:
        return len(self.dims)

    def composite(self, start: int, end: int) -> np.ndarray:
        return ff.chain_product(self.maps[start:end], self.p, self.dims[start])

    def rank(self, start: int, end: int) -> int:
        if start == end:
            return self.dims[start]
        return ff.rank(self.composite(start, end), self.p)


def validate(v: BipathModule) -> list[str]:
    """Problems found in ``v``; an empty list means the module is valid."""
    problems = []
    for vert, d in v.dims.items():
        if not v.shape.contains(vert):
            problems.append(f"vertex {vert} not in {v.shape}")
        elif d < 0:
            problems.append(f"negative dimension at {vert}")
    for a, b in v.shape.arrows():
        mat = v.maps.get((a, b))
        want = (v.dims[b], v.dims[a])
        if mat is None:
            problems.append(f"missing map {a}->{b}")
        elif mat.shape != want:
            problems.append(f"map {a}->{b} has shape {mat.shape}, expected {want}")
        elif ((mat < 0) | (mat >= v.p)).any():
            problems.append(f"map {a}->{b} has entries outside [0, {v.p})")
    if problems:
        return problems
    defect = (v.composite(UPPER) - v.composite(LOWER)) % v.p
    if defect.any():
        problems.append(
            "commutativity violated: upper composite minus lower composite = "
            + json.dumps(defect.tolist())
        )
    return problems


def require_valid(v: BipathModule) -> None:
    problems = validate(v)
    if problems:
        raise ModuleValidationError(problems)


def interval_module(iv: BipathInterval, shape: BipathShape, p: int = 2) -> BipathModule:
    iv.validate(shape)
    inside = iv.members(shape)
    dims = {u: int(u in inside) for u in shape.vertices()}
    maps = {}
    for a, b in shape.arrows():
        maps[(a, b)] = ff.identity(1) if (a in inside and b in inside) else ff.zeros(dims[b], dims[a])
    return BipathModule(shape, p, dims, maps)


def zero_module(shape: BipathShape, p: int = 2) -> BipathModule:
    return BipathModule(shape, p, {})


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = ff.zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


def direct_sum(v: BipathModule, w: BipathModule) -> BipathModule:
    if v.shape != w.shape or v.p != w.p:
        raise ValueError("direct sum needs equal shapes and fields")
    dims = {u: v.dims[u] + w.dims[u] for u in v.shape.vertices()}
    maps = {arr: _block_diag(v.maps[arr], w.maps[arr]) for arr in v.shape.arrows()}
    return BipathModule(v.shape, v.p, dims, maps)


def direct_sum_of(intervals: Iterable[BipathInterval], shape: BipathShape, p: int = 2) -> BipathModule:
    out = zero_module(shape, p)
    for iv in intervals:
        out = direct_sum(out, interval_module(iv, shape, p))
    return out


def restrict(v: BipathModule, path: str) -> PathModule:
    vs = v.shape.path(path)
    return PathModule(path, v.p, [v.dims[u] for u in vs], [m.copy() for m in v.path_maps(path)])


def change_basis(v: BipathModule, bases: Mapping[Vertex, np.ndarray]) -> BipathModule:
    """Module with maps ``g_b @ M @ g_a^-1`` for invertible ``g`` per vertex."""
    inv = {u: ff.invert(g, v.p) for u, g in bases.items()}
    maps = {
        (a, b): ff.matmul(ff.matmul(bases[b], m, v.p), inv[a], v.p) for (a, b), m in v.maps.items()
    }
    return BipathModule(v.shape, v.p, dict(v.dims), maps)


def dual_module(v: BipathModule) -> BipathModule:
    """Transpose module over the reflected poset (reflection swaps 0 and 1)."""
    sh = v.shape
    dims = {sh.reflect(u): d for u, d in v.dims.items()}
    maps = {(sh.reflect(b), sh.reflect(a)): m.T.copy() for (a, b), m in v.maps.items()}
    return BipathModule(sh, v.p, dims, maps)


def as_multiset(intervals: Iterable[BipathInterval] | Mapping[BipathInterval, int]) -> Counter:
    if isinstance(intervals, Mapping):
        return Counter({k: int(c) for k, c in intervals.items() if c})
    return Counter(intervals)


def scrambled_sum(
    intervals: Iterable[BipathInterval] | Mapping[BipathInterval, int],
    shape: BipathShape,
    p: int = 2,
    seed: int | np.random.Generator | None = 0,
) -> tuple[BipathModule, Counter]:
    """Direct sum of interval modules conjugated by random isomorphisms.

    Returns the scrambled module together with its ground-truth multiset.
    """
    truth = as_multiset(intervals)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    ordered = sorted(truth.elements(), key=BipathInterval.sort_key)
    rng.shuffle(ordered)
    base = direct_sum_of(ordered, shape, p)
    bases = {u: ff.random_invertible(base.dims[u], p, rng) for u in shape.vertices()}
    return change_basis(base, bases), truth


def random_multiset(
    shape: BipathShape, max_summands: int, rng: np.random.Generator
) -> Counter:
    pool = enumerate_intervals(shape)
    k = int(rng.integers(0, max_summands + 1))
    picks = rng.integers(0, len(pool), size=k)
    return Counter(pool[int(i)] for i in picks)


@dataclass
class Instance:
    module: BipathModule
    truth: Counter
    seed: int


def random_instances(
    count: int,
    seed: int = 0,
    max_shape: tuple[int, int] = (5, 5),
    max_summands: int = 20,
    fields: tuple[int, ...] = (2, 5),
) -> list[Instance]:
    """Seeded corpus of scrambled sums with random shapes, fields and multisets."""
    out = []
    for k in range(count):
        s = seed * 1_000_003 + k
        rng = np.random.default_rng(s)
        shape = BipathShape(int(rng.integers(1, max_shape[0] + 1)), int(rng.integers(1, max_shape[1] + 1)))
        p = fields[k % len(fields)]
        truth = random_multiset(shape, max_summands, rng)
        mod, _ = scrambled_sum(truth, shape, p, rng)
        out.append(Instance(mod, truth, s))
    return out


# --- JSON ---------------------------------------------------------------


def to_json_dict(v: BipathModule) -> dict:
    maps = {}
    for a, b in v.shape.arrows():
        if v.dims[a] and v.dims[b]:
            maps[f"{a}->{b}"] = v.maps[(a, b)].tolist()
    return {
        "shape": [v.shape.n, v.shape.m],
        "p": v.p,
        "dims": {str(u): v.dims[u] for u in v.shape.vertices()},
        "maps": maps,
    }


def from_json_dict(data: dict) -> BipathModule:
    try:
        n, m = data["shape"]
        shape = BipathShape(int(n), int(m))
        p = int(data.get("p", 2))
        dims = {parse_vertex(k): int(d) for k, d in data.get("dims", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ModuleValidationError([f"malformed module header: {exc}"]) from exc
    bad = [str(u) for u in dims if not shape.contains(u)]
    if bad:
        raise ModuleValidationError([f"unknown vertices {bad}"])
    for u in shape.vertices():
        dims.setdefault(u, 0)
    arrows = set(shape.arrows())
    maps = {}
    for key, rows in data.get("maps", {}).items():
        try:
            a_txt, b_txt = key.split("->")
            arr = (parse_vertex(a_txt), parse_vertex(b_txt))
        except ValueError as exc:
            raise ModuleValidationError([f"bad arrow key {key!r}"]) from exc
        if arr not in arrows:
            raise ModuleValidationError([f"{key} is not a Hasse arrow of {shape}"])
        want = (dims[arr[1]], dims[arr[0]])
        try:
            maps[arr] = ff.as_matrix(rows, p, want)
        except (ValueError, ff.DimensionMismatch) as exc:
            raise ModuleValidationError([f"map {key}: {exc}"]) from exc
    return BipathModule(shape, p, dims, maps)


def dumps(v: BipathModule) -> str:
    return json.dumps(to_json_dict(v), sort_keys=True)


def loads(text: str) -> BipathModule:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModuleValidationError([f"invalid JSON: {exc}"]) from exc
    return from_json_dict(data)


__all__ = [
    "BipathModule",
    "PathModule",
    "ModuleValidationError",
    "validate",
    "require_valid",
    "interval_module",
    "zero_module",
    "direct_sum",
    "direct_sum_of",
    "restrict",
    "change_basis",
    "dual_module",
    "scrambled_sum",
    "random_instances",
    "MIN",
    "MAX",
    "PATHS",
]
