"""Interval decomposition of equioriented path modules with explicit bases."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import ff
from .module import PathModule
from .poset import BipathShape, PathInterval, canonical_key


@dataclass
class PathDecomposition:
    """Barcode of a path module together with the isomorphism onto it.

    ``intervals`` lists one entry per summand in canonical order.
    ``alive[k]`` gives the summands (indices into ``intervals``) supported
    at position ``k``, in canonical order; ``bases[k]`` is the matrix of the
    isomorphism at ``k``, mapping ``V(k)`` onto coordinates indexed by
    ``alive[k]``.
    """

    path: str
    p: int
    intervals: list[PathInterval]
    alive: list[list[int]]
    bases: list[np.ndarray]

    @property
    def last(self) -> int:
        return len(self.alive) - 1

    def barcode(self) -> Counter:
        return Counter(self.intervals)

    def labels_at(self, k: int) -> list[PathInterval]:
        return [self.intervals[s] for s in self.alive[k]]

    def staircase(self, k: int) -> np.ndarray:
        """The 0/1 matrix of the interval sum on the arrow ``k -> k+1``."""
        src, dst = self.alive[k], self.alive[k + 1]
        out = ff.zeros(len(dst), len(src))
        where = {s: r for r, s in enumerate(dst)}
        for c, s in enumerate(src):
            if s in where:
                out[where[s], c] = 1
        return out


class _Bar:
    __slots__ = ("birth", "death", "vecs")

    def __init__(self, birth: int, vec: np.ndarray):
        self.birth = birth
        self.death: int | None = None
        self.vecs = {birth: vec}


def decompose_path(pm: PathModule) -> PathDecomposition:
    """Left-to-right sweep with the elder rule.

    Each bar keeps its basis vector at every vertex it lives on.  When the
    images of live bars become dependent, the youngest bar in the relation
    is replaced by the relation itself (adding older bars, which live on
    its whole support), so it maps to zero and dies.
    """
    p = pm.p
    npos = len(pm.dims)
    # only the path length matters for canonical ordering
    shape = BipathShape(npos - 2, npos - 2)
    bars: list[_Bar] = []
    alive: list[_Bar] = []
    for e in ff.identity(pm.dims[0]).T:
        bar = _Bar(0, e.copy())
        bars.append(bar)
        alive.append(bar)

    for k in range(1, npos):
        mat = pm.maps[k - 1]
        alive.sort(key=lambda b: b.birth)  # stable: oldest first
        if alive:
            images = np.stack([ff.matmul(mat, b.vecs[k - 1].reshape(-1, 1), p)[:, 0] for b in alive], axis=1)
        else:
            images = ff.zeros(pm.dims[k], 0)
        if images.shape[0] and images.shape[1]:
            red, piv = ff.rref(images, p)
        else:
            red, piv = images, []
        piv_set = set(piv)
        survivors = []
        for c, bar in enumerate(alive):
            if c in piv_set:
                survivors.append((bar, images[:, c]))
                continue
            # column c = sum of earlier pivot columns with coefficients red[:, c]
            for r, pc in enumerate(piv):
                if pc >= c:
                    break
                coef = int(red[r, c])
                if coef:
                    elder = alive[pc]
                    for t in range(bar.birth, k):
                        bar.vecs[t] = (bar.vecs[t] - coef * elder.vecs[t]) % p
            bar.death = k - 1
        alive = []
        for bar, img in survivors:
            bar.vecs[k] = img % p
            alive.append(bar)
        kept = np.stack([img for _, img in survivors], axis=1) if survivors else ff.zeros(pm.dims[k], 0)
        for e in ff.complete_basis(kept, p).T:
            bar = _Bar(k, e.copy())
            bars.append(bar)
            alive.append(bar)
    for bar in alive:
        bar.death = npos - 1

    order = sorted(
        range(len(bars)),
        key=lambda s: canonical_key(PathInterval(pm.path, bars[s].birth, bars[s].death), shape),
    )
    ordered = [bars[s] for s in order]
    intervals = [PathInterval(pm.path, b.birth, b.death) for b in ordered]
    alive_at: list[list[int]] = [[] for _ in range(npos)]
    for idx, b in enumerate(ordered):
        for t in range(b.birth, b.death + 1):
            alive_at[t].append(idx)
    bases = []
    for t in range(npos):
        if alive_at[t]:
            cols = np.stack([ordered[idx].vecs[t] for idx in alive_at[t]], axis=1)
        else:
            cols = ff.zeros(pm.dims[t], 0)
        bases.append(ff.invert(cols % p, p))
    return PathDecomposition(pm.path, p, intervals, alive_at, bases)


def barcode_by_ranks(pm: PathModule) -> Counter:
    """Barcode from ranks of composites by inclusion-exclusion."""
    npos = len(pm.dims)
    ranks = {}

    def r(x: int, y: int) -> int:
        if x < 0 or y >= npos:
            return 0
        if (x, y) not in ranks:
            ranks[(x, y)] = pm.rank(x, y)
        return ranks[(x, y)]

    out: Counter = Counter()
    for b in range(npos):
        for d in range(b, npos):
            mult = r(b, d) - r(b - 1, d) - r(b, d + 1) + r(b - 1, d + 1)
            if mult:
                out[PathInterval(pm.path, b, d)] = mult
    return out


def check_bases(pm: PathModule, dec: PathDecomposition) -> bool:
    """Entrywise check that the bases conjugate ``pm`` onto the staircase sum."""
    p = pm.p
    for k, mat in enumerate(pm.maps):
        conj = ff.matmul(ff.matmul(dec.bases[k + 1], mat, p), ff.invert(dec.bases[k], p), p)
        if not np.array_equal(conj, dec.staircase(k)):
            return False
    return True
