"""Bipath filtrations of simplicial complexes and their persistent homology.

A simplex carries two grades: the first vertex of the upper path at which
it is present and the same for the lower path.  Grade 0 means present in
the shared bottom complex, grade ``len + 1`` means present only at the top.
"""

from __future__ import annotations

import itertools
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import ff
from .matrix_method import BlockProblem, glue, normalize
from .module import BipathModule
from .poset import (
    LOWER,
    MAX,
    MIN,
    UPPER,
    BipathShape,
    PathInterval,
    Vertex,
    canonical_key,
    parse_vertex,
)


class FiltrationError(ValueError):
    pass


@dataclass(frozen=True)
class Simplex:
    id: str
    verts: tuple[str, ...]
    u: int
    l: int

    @property
    def dim(self) -> int:
        return len(self.verts) - 1

    def grade(self, path: str) -> int:
        return self.u if path == UPPER else self.l


@dataclass
class BipathFiltration:
    shape: BipathShape
    simplices: list[Simplex] = field(default_factory=list)

    def __post_init__(self) -> None:
        problems = check_filtration(self.shape, self.simplices)
        if problems:
            raise FiltrationError("; ".join(problems))

    def of_dim(self, q: int) -> list[Simplex]:
        return [s for s in self.simplices if s.dim == q]

    def path_order(self, path: str) -> list[Simplex]:
        """Filtration order along one path: grade, then dimension, then id."""
        return sorted(self.simplices, key=lambda s: (s.grade(path), s.dim, s.id))

    def at(self, v: Vertex) -> list[Simplex]:
        """Simplices of the complex sitting at vertex ``v``."""
        if v == MIN:
            return [s for s in self.simplices if s.u == 0]
        if v == MAX:
            return list(self.simplices)
        if v.kind == "upper":
            return [s for s in self.simplices if s.u <= v.index]
        return [s for s in self.simplices if s.l <= v.index]

    def max_dim(self) -> int:
        return max((s.dim for s in self.simplices), default=-1)


def check_filtration(shape: BipathShape, simplices: Sequence[Simplex]) -> list[str]:
    problems = []
    by_verts: dict[tuple[str, ...], Simplex] = {}
    ids = set()
    for s in simplices:
        if s.id in ids:
            problems.append(f"duplicate simplex id {s.id!r}")
        ids.add(s.id)
        if len(set(s.verts)) != len(s.verts) or not s.verts:
            problems.append(f"simplex {s.id!r} has an empty or repeated vertex list")
        if s.verts in by_verts:
            problems.append(f"simplex {s.id!r} duplicates {by_verts[s.verts].id!r}")
        by_verts[s.verts] = s
        if not (0 <= s.u <= shape.n + 1 and 0 <= s.l <= shape.m + 1):
            problems.append(f"simplex {s.id!r} has grades ({s.u},{s.l}) outside {shape}")
        if (s.u == 0) != (s.l == 0):
            problems.append(f"simplex {s.id!r}: grade 0 must hold on both paths or neither")
    for s in simplices:
        if len(s.verts) < 2:
            continue
        for face in itertools.combinations(s.verts, len(s.verts) - 1):
            f = by_verts.get(face)
            if f is None:
                problems.append(f"simplex {s.id!r} is missing its face {{{','.join(face)}}}")
            elif f.u > s.u or f.l > s.l:
                problems.append(f"simplex {s.id!r} enters before its face {f.id!r}")
    return problems


# --- text format -----------------------------------------------------------

_LINE = re.compile(r"simplex\s+(\S+)\s+v=(\S+)\s+u=(\d+)\s+l=(\d+)")


def parse_filtration(text: str) -> BipathFiltration:
    shape = None
    simplices = []
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if shape is None:
            m = re.fullmatch(r"bipath\s+(\d+)\s+(\d+)", line)
            if not m:
                raise FiltrationError(f"line {lineno}: expected header 'bipath <n> <m>'")
            try:
                shape = BipathShape(int(m.group(1)), int(m.group(2)))
            except ValueError as exc:
                raise FiltrationError(f"line {lineno}: {exc}") from exc
            continue
        m = _LINE.fullmatch(line)
        if not m:
            raise FiltrationError(f"line {lineno}: cannot parse {line!r}")
        sid, verts, u, l = m.group(1), m.group(2), int(m.group(3)), int(m.group(4))
        s = Simplex(sid, tuple(sorted(verts.split(","))), u, l)
        where.setdefault(sid, lineno)
        simplices.append(s)
    if shape is None:
        raise FiltrationError("missing header 'bipath <n> <m>'")
    problems = check_filtration(shape, simplices)
    if problems:
        # point at the first offending simplex where possible
        tagged = []
        for msg in problems:
            hit = re.search(r"simplex '([^']+)'|id '([^']+)'", msg)
            sid = hit and (hit.group(1) or hit.group(2))
            tagged.append(f"line {where[sid]}: {msg}" if sid in where else msg)
        raise FiltrationError("; ".join(tagged))
    return BipathFiltration(shape, simplices)


def format_filtration(f: BipathFiltration) -> str:
    lines = [f"bipath {f.shape.n} {f.shape.m}"]
    for s in sorted(f.simplices, key=lambda s: (s.dim, s.u, s.l, s.id)):
        lines.append(f"simplex {s.id} v={','.join(s.verts)} u={s.u} l={s.l}")
    return "\n".join(lines) + "\n"


# --- chain complexes ---------------------------------------------------------


def boundary_matrix(rows: Sequence[Simplex], cols: Sequence[Simplex], p: int) -> np.ndarray:
    """Oriented boundary from ``cols`` (dimension q+1) into ``rows`` (dimension q)."""
    index = {s.verts: k for k, s in enumerate(rows)}
    out = ff.zeros(len(rows), len(cols))
    for j, s in enumerate(cols):
        if s.dim == 0:
            continue
        for k in range(len(s.verts)):
            face = s.verts[:k] + s.verts[k + 1 :]
            out[index[face], j] = (-1) ** k % p
    return out


def _reduce(d: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, dict[int, int]]:
    """Standard left-to-right column reduction R = D V; returns R, V, low -> column."""
    r = d.copy() % p
    v = ff.identity(d.shape[1])
    owner: dict[int, int] = {}
    for j in range(d.shape[1]):
        while True:
            nz = np.nonzero(r[:, j])[0]
            if nz.size == 0:
                break
            low = int(nz[-1])
            k = owner.get(low)
            if k is None:
                owner[low] = j
                break
            c = (r[low, j] * ff.inverse(int(r[low, k]), p)) % p
            r[:, j] = (r[:, j] - c * r[:, k]) % p
            v[:, j] = (v[:, j] - c * v[:, k]) % p
    return r, v, owner


@dataclass
class PathReduction:
    """Persistence of one path of a filtration in a fixed degree.

    Cycles and boundaries are chains over ``chain_basis`` (the degree-q
    simplices of the filtration, in its own order), so reductions of the two
    paths can be compared directly.
    """

    path: str
    q: int
    p: int
    npos: int
    chain_basis: list[Simplex]
    intervals: list[PathInterval]
    cycles: np.ndarray
    boundaries: np.ndarray
    boundary_grades: list[int]

    @property
    def last(self) -> int:
        return self.npos - 1

    def barcode(self) -> Counter:
        return Counter(self.intervals)

    def boundary_basis(self, k: int) -> np.ndarray:
        keep = [c for c, g in enumerate(self.boundary_grades) if g <= k]
        return self.boundaries[:, keep]

    def order(self) -> list[int]:
        """Bar indices in canonical summand order (ties by index)."""
        shape = BipathShape(self.npos - 2, self.npos - 2)
        return sorted(range(len(self.intervals)), key=lambda k: (canonical_key(self.intervals[k], shape), k))


def reduce_path(f: BipathFiltration, path: str, q: int, p: int = 2) -> PathReduction:
    order = f.path_order(path)
    lo = [s for s in order if s.dim == q - 1]
    mid = [s for s in order if s.dim == q]
    hi = [s for s in order if s.dim == q + 1]
    basis = f.of_dim(q)
    to_global = {s.verts: k for k, s in enumerate(basis)}
    embed = ff.zeros(len(basis), len(mid))
    for k, s in enumerate(mid):
        embed[to_global[s.verts], k] = 1

    if q == 0 or not lo:
        positive = list(range(len(mid)))
        v_mid = ff.identity(len(mid))
    else:
        r_mid, v_mid, _ = _reduce(boundary_matrix(lo, mid, p), p)
        positive = [j for j in range(len(mid)) if not r_mid[:, j].any()]
    r_hi, _, owner = _reduce(boundary_matrix(mid, hi, p), p)

    g = path
    intervals, cycles = [], []
    for i in positive:
        birth = mid[i].grade(g)
        j = owner.get(i)
        if j is None:
            intervals.append(PathInterval(path, birth, f.shape.length(path) + 1))
            cycles.append(v_mid[:, i])
        else:
            death = hi[j].grade(g)
            if death > birth:
                intervals.append(PathInterval(path, birth, death - 1))
                cycles.append(r_hi[:, j])
    cyc = np.stack(cycles, axis=1) if cycles else ff.zeros(len(mid), 0)
    bcols = [j for j in range(len(hi)) if r_hi[:, j].any()]
    bnd = r_hi[:, bcols] if bcols else ff.zeros(len(mid), 0)
    return PathReduction(
        path=path,
        q=q,
        p=p,
        npos=f.shape.length(path) + 2,
        chain_basis=basis,
        intervals=intervals,
        cycles=ff.matmul(embed, cyc, p),
        boundaries=ff.matmul(embed, bnd, p),
        boundary_grades=[hi[j].grade(g) for j in bcols],
    )


def is_cycle(f: BipathFiltration, q: int, chain: np.ndarray, p: int) -> bool:
    if q == 0:
        return True
    d = boundary_matrix(f.of_dim(q - 1), f.of_dim(q), p)
    return not ff.matmul(d, chain.reshape(-1, 1), p).any()


@dataclass
class FaceMatrices:
    """Change-of-basis matrices at 0̂ and 1̂ with their labels."""

    lam: np.ndarray
    gam: np.ndarray
    lam_cols: list[PathInterval]
    lam_rows: list[PathInterval]
    gam_cols: list[PathInterval]
    gam_rows: list[PathInterval]
    last_u: int
    last_l: int


def _coords(target: np.ndarray, bnd: np.ndarray, vecs: np.ndarray, p: int) -> np.ndarray:
    """Coordinates of ``vecs`` in the classes ``target`` modulo ``bnd``."""
    a = np.concatenate([target, bnd], axis=1)
    x = ff.solve_matrix(a, vecs, p)
    if x is None:
        raise RuntimeError("representative cycles do not span the homology classes")
    return x[: target.shape[1]]


def lambda_gamma(
    up: PathReduction,
    low: PathReduction,
    f: BipathFiltration,
    q: int,
    overrides: Optional[Mapping[tuple[str, int], np.ndarray]] = None,
) -> FaceMatrices:
    """Express upper cycle classes in lower cycle classes at 0̂ and at 1̂.

    ``overrides`` maps ``(path, bar index)`` to a replacement representative
    cycle, which lets callers reproduce matrices for other cycle choices.
    """
    p = up.p
    cyc = {UPPER: up.cycles.copy(), LOWER: low.cycles.copy()}
    for (path, k), chain in (overrides or {}).items():
        chain = np.asarray(chain, dtype=ff.DTYPE) % p
        if not is_cycle(f, q, chain, p):
            raise ValueError(f"override for bar {k} on {path} is not a cycle")
        cyc[path][:, k] = chain

    uo, lo_ = up.order(), low.order()
    u0 = [k for k in uo if up.intervals[k].b == 0]
    l0 = [k for k in lo_ if low.intervals[k].b == 0]
    u1 = [k for k in uo if up.intervals[k].d == up.last]
    l1 = [k for k in lo_ if low.intervals[k].d == low.last]

    lam = _coords(cyc[LOWER][:, l0], low.boundary_basis(0), cyc[UPPER][:, u0], p)
    gam = _coords(cyc[LOWER][:, l1], low.boundary_basis(low.last), cyc[UPPER][:, u1], p)
    out = FaceMatrices(
        lam,
        gam,
        [up.intervals[k] for k in u0],
        [low.intervals[k] for k in l0],
        [up.intervals[k] for k in u1],
        [low.intervals[k] for k in l1],
        up.last,
        low.last,
    )
    if not check_square(out, p):
        raise RuntimeError("change-of-basis matrices do not commute with the endpoint maps")
    return out


def _endpoint_map(src: list[PathInterval], dst: list[PathInterval], last: int) -> np.ndarray:
    """0/1 matrix of the interval sum from 0̂ to 1̂: identity on full bars."""
    out = ff.zeros(len(dst), len(src))
    full_src = [c for c, iv in enumerate(src) if iv.d == last]
    full_dst = [r for r, iv in enumerate(dst) if iv.b == 0]
    for c, r in zip(full_src, full_dst):
        out[r, c] = 1
    return out


def check_square(fm: FaceMatrices, p: int) -> bool:
    """Whether gam @ X(0̂->1̂) == Y(0̂->1̂) @ lam."""
    x = _endpoint_map(fm.lam_cols, fm.gam_cols, fm.last_u)
    y = _endpoint_map(fm.lam_rows, fm.gam_rows, fm.last_l)
    return bool(np.array_equal(ff.matmul(fm.gam, x, p), ff.matmul(y, fm.lam, p)))


@dataclass
class DegreeResult:
    q: int
    upper: PathReduction
    lower: PathReduction
    faces: FaceMatrices
    problem: BlockProblem
    intervals: Counter


def run_degree(f: BipathFiltration, q: int, p: int = 2) -> DegreeResult:
    up = reduce_path(f, UPPER, q, p)
    low = reduce_path(f, LOWER, q, p)
    fm = lambda_gamma(up, low, f, q)
    bp = BlockProblem(
        shape=f.shape,
        p=p,
        lam=fm.lam,
        gam=fm.gam,
        lam_cols=fm.lam_cols,
        lam_rows=fm.lam_rows,
        gam_cols=fm.gam_cols,
        gam_rows=fm.gam_rows,
    )
    nf = normalize(bp)
    return DegreeResult(q, up, low, fm, bp, glue(nf, up, low))


def bipath_pd(f: BipathFiltration, q: int, p: int = 2) -> Counter:
    """Bipath persistence diagram of ``f`` in degree ``q``."""
    ff.FieldSpec(p)
    if q < 0:
        raise ValueError("homology degree must be >= 0")
    if q > f.max_dim():
        return Counter()
    return run_degree(f, q, p).intervals


# --- brute-force homology ----------------------------------------------------


def _homology_basis(f: BipathFiltration, present: set, q: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Cycles spanning H_q of a subcomplex, and a basis of its boundaries."""
    basis = f.of_dim(q)
    nq = len(basis)
    mask_q = [k for k, s in enumerate(basis) if s.id in present]
    if q > 0:
        d = boundary_matrix(f.of_dim(q - 1), [basis[k] for k in mask_q], p)
        ker = ff.kernel_basis(d, p)
    else:
        ker = ff.identity(len(mask_q))
    z = ff.zeros(nq, ker.shape[1])
    z[mask_q] = ker
    hi = [s for s in f.of_dim(q + 1) if s.id in present]
    b = ff.column_space(boundary_matrix(basis, hi, p), p) if hi else ff.zeros(nq, 0)
    both = np.concatenate([b, z], axis=1)
    if both.shape[1] == 0:
        return ff.zeros(nq, 0), b
    _, piv = ff.rref(both, p)
    extra = [c for c in piv if c >= b.shape[1]]
    return both[:, extra], b


def homology_module(f: BipathFiltration, q: int, p: int = 2) -> BipathModule:
    """H_q of every complex with maps induced by inclusion, via kernels and images."""
    bases = {}
    for v in f.shape.vertices():
        present = {s.id for s in f.at(v)}
        bases[v] = _homology_basis(f, present, q, p)
    dims = {v: h.shape[1] for v, (h, _) in bases.items()}
    maps = {}
    for a, b in f.shape.arrows():
        ha = bases[a][0]
        hb, bb = bases[b]
        maps[(a, b)] = _coords(hb, bb, ha, p) if ha.shape[1] else ff.zeros(hb.shape[1], 0)
    return BipathModule(f.shape, p, dims, maps)


# --- random filtrations -----------------------------------------------------


def random_filtration(
    shape: BipathShape, rng: np.random.Generator, max_simplices: int = 40, n_vertices: int = 7
) -> BipathFiltration:
    """A random closed complex on a few vertices with random consistent grades."""
    names = [f"v{k}" for k in range(n_vertices)]
    cand = [tuple(c) for d in (1, 2, 3) for c in itertools.combinations(names, d)]
    picked = {c for c in cand if len(c) == 1}
    for c in rng.permutation(len(cand)):
        c = cand[int(c)]
        if len(picked) >= max_simplices:
            break
        if len(c) > 1 and all(face in picked for face in itertools.combinations(c, len(c) - 1)):
            if rng.random() < 0.75:
                picked.add(c)
    grades: dict[tuple[str, ...], tuple[int, int]] = {}
    for c in sorted(picked, key=len):
        faces = list(itertools.combinations(c, len(c) - 1)) if len(c) > 1 else []
        u = max([int(rng.integers(0, shape.n + 2))] + [grades[x][0] for x in faces])
        l = max([int(rng.integers(0, shape.m + 2))] + [grades[x][1] for x in faces])
        if (u == 0) != (l == 0):
            if u == 0:
                u = int(rng.integers(1, shape.n + 2))
            else:
                l = int(rng.integers(1, shape.m + 2))
        grades[c] = (u, l)
    simplices = [Simplex("".join(c), c, *grades[c]) for c in sorted(picked, key=lambda c: (len(c), c))]
    return BipathFiltration(shape, simplices)


# --- restriction of a grid filtration ------------------------------------------


def _leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def restrict_grid(
    grid: Iterable[tuple[str, Sequence[str], Sequence[int]]],
    embedding: Mapping[Vertex, Sequence[int]],
    shape: BipathShape,
) -> BipathFiltration:
    """Pull a one-critical multiparameter filtration back along an embedding.

    ``grid`` yields ``(id, vertices, grade)``; ``embedding`` sends every
    vertex of the bipath poset to a grid point.  Simplices whose grade is
    not below the image of 1̂ are absent from every complex and dropped.
    """
    verts = shape.vertices()
    missing = [str(v) for v in verts if v not in embedding]
    if missing:
        raise FiltrationError(f"embedding misses vertices {missing}")
    for a in verts:
        for b in verts:
            if shape.leq(a, b) != _leq(embedding[a], embedding[b]):
                raise FiltrationError(f"not an order embedding at {a}, {b}")
            if a != b and tuple(embedding[a]) == tuple(embedding[b]):
                raise FiltrationError(f"{a} and {b} share a grid point")
    top = embedding[MAX]

    def first(path: str, g: Sequence[int]) -> int:
        for k, v in enumerate(shape.path(path)):
            if _leq(g, embedding[v]):
                return k
        raise AssertionError("1̂ dominates every kept grade")

    simplices = []
    for sid, vs, g in grid:
        if not _leq(g, top):
            continue
        simplices.append(Simplex(str(sid), tuple(sorted(map(str, vs))), first(UPPER, g), first(LOWER, g)))
    return BipathFiltration(shape, simplices)


def parse_grid(text: str) -> list[tuple[str, tuple[str, ...], tuple[int, ...]]]:
    """Grid JSON: ``{"simplices": [{"id": .., "v": [..], "grade": [x, y]}, ..]}``."""
    try:
        data = json.loads(text)
        out = []
        for s in data["simplices"]:
            out.append((str(s["id"]), tuple(map(str, s["v"])), tuple(int(x) for x in s["grade"])))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FiltrationError(f"malformed grid: {exc}") from exc
    return out


def parse_embedding(text: str) -> tuple[BipathShape, dict[Vertex, tuple[int, ...]]]:
    """Embedding JSON: ``{"shape": [n, m], "points": {"0": [x, y], "u1": .., "1": ..}}``."""
    try:
        data = json.loads(text)
        shape = BipathShape(*map(int, data["shape"]))
        pts = {parse_vertex(k): tuple(int(x) for x in v) for k, v in data["points"].items()}
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FiltrationError(f"malformed embedding: {exc}") from exc
    return shape, pts
