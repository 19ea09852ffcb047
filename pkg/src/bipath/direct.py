"""Decomposition by successively splitting off submodules.

First the copies of the full interval (the image of the total composite),
then the submodule generated at the minimum (intervals containing 0̂ only),
then dually the intervals containing 1̂ only.  What remains vanishes at
both endpoints and splits into its two path restrictions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import ff
from .module import BipathModule, dual_module, require_valid, restrict
from .paths import barcode_by_ranks
from .poset import LOWER, MAX, MIN, UPPER, BipathInterval, Vertex


class PreconditionError(ValueError):
    pass


@dataclass
class SplitResult:
    summands: Counter
    remainder: BipathModule


def _sweep_order(v: BipathModule) -> list[tuple[Vertex, Vertex]]:
    """Arrows to clean, each fix changing the basis at the arrow's source.

    Going backwards along a path means a fix only disturbs arrows that are
    handled later.  The arrow leaving 0̂ on the lower path is skipped because
    the basis at 0̂ is already settled; commutativity forces it clean.
    """
    up = v.shape.path(UPPER)
    low = v.shape.path(LOWER)
    arrows = list(zip(up, up[1:]))[::-1]
    arrows += list(zip(low[1:], low[2:]))[::-1]
    return arrows


def split_submodule(v: BipathModule, sub: dict[Vertex, np.ndarray]) -> BipathModule:
    """Split off a submodule and return a complement.

    ``sub[a]`` holds a basis of the submodule at ``a``; every arrow must map
    ``sub[a]`` onto the span of ``sub[b]``.  Complements are first chosen
    greedily, then corrected arrow by arrow until all maps are block
    diagonal.
    """
    p = v.p
    comp = {a: ff.complete_basis(s, p) for a, s in sub.items()}

    def coords(a: Vertex, b: Vertex) -> np.ndarray:
        basis_a = np.concatenate([sub[a], comp[a]], axis=1)
        basis_b = np.concatenate([sub[b], comp[b]], axis=1)
        return ff.matmul(ff.invert(basis_b, p), ff.matmul(v.maps[(a, b)], basis_a, p), p)

    for a, b in _sweep_order(v):
        ra, rb = sub[a].shape[1], sub[b].shape[1]
        c = coords(a, b)
        g = c[:rb, ra:]
        if not g.any():
            continue
        lam = ff.solve_matrix(c[:rb, :ra], (-g) % p, p)
        if lam is None:
            raise RuntimeError(f"submodule is not mapped onto itself along {a}->{b}")
        comp[a] = (comp[a] + ff.matmul(sub[a], lam, p)) % p

    dims = {a: comp[a].shape[1] for a in v.shape.vertices()}
    maps = {}
    for a, b in v.shape.arrows():
        ra, rb = sub[a].shape[1], sub[b].shape[1]
        c = coords(a, b)
        if c[:rb, ra:].any():
            raise RuntimeError(f"off-diagonal block survived on {a}->{b}")
        maps[(a, b)] = c[rb:, ra:].copy()
    return BipathModule(v.shape, p, dims, maps)


def _from_min(v: BipathModule, a: Vertex, x: np.ndarray) -> np.ndarray:
    """Image of the columns ``x`` of V(0̂) at vertex ``a``."""
    if a == MIN:
        return x % v.p
    path = LOWER if a.kind == "lower" else UPPER
    pos = v.shape.path(path).index(a)
    return ff.matmul(v.composite(path, 0, pos), x, v.p)


def split_full(v: BipathModule) -> SplitResult:
    require_valid(v)
    p = v.p
    total = v.total_composite()
    _, piv = ff.rref(total, p) if total.size else (None, [])
    section = ff.identity(v.dims[MIN])[:, piv]
    sub = {a: _from_min(v, a, section) for a in v.shape.vertices()}
    rest = split_submodule(v, sub)
    found = Counter({BipathInterval.full(): len(piv)}) if piv else Counter()
    return SplitResult(found, rest)


def _kernel(v: BipathModule, path: str, pos: int) -> np.ndarray:
    """Kernel of V(0̂ -> pos) along ``path``; past the last vertex it is everything."""
    d0 = v.dims[MIN]
    if pos > v.shape.length(path) + 1:
        return ff.identity(d0)
    return ff.kernel_basis(v.composite(path, 0, pos), v.p)


def left_multiplicities(w: BipathModule) -> Counter:
    """Multiplicities of intervals containing 0̂ but not 1̂, from two kernel flags."""
    p = w.p
    n, m = w.shape.n, w.shape.m
    ku = [_kernel(w, UPPER, t) for t in range(n + 3)]
    kd = [_kernel(w, LOWER, s) for s in range(m + 3)]

    def dim(t: int, s: int) -> int:
        return ff.intersect_columnspaces(ku[t], kd[s], p).shape[1]

    out: Counter = Counter()
    for t in range(n + 1):
        for s in range(m + 1):
            mult = dim(t + 1, s + 1) - dim(t, s + 1) - dim(t + 1, s) + dim(t, s)
            if mult:
                out[BipathInterval.left(t, s)] = mult
    return out


def split_left(w: BipathModule) -> SplitResult:
    require_valid(w)
    if w.total_composite().any():
        raise PreconditionError("split_left needs a zero composite from 0̂ to 1̂")
    if not w.dims[MIN]:
        return SplitResult(Counter(), w.copy())
    p = w.p
    d0 = ff.identity(w.dims[MIN])
    sub = {a: ff.column_space(_from_min(w, a, d0), p) for a in w.shape.vertices()}
    rest = split_submodule(w, sub)
    return SplitResult(left_multiplicities(w), rest)


def split_right(x: BipathModule) -> SplitResult:
    """Dual of :func:`split_left`, splitting off what is cogenerated at 1̂."""
    require_valid(x)
    if x.dims[MIN]:
        raise PreconditionError("split_right needs a module vanishing at 0̂")
    res = split_left(dual_module(x))
    found = Counter({iv.reflect(x.shape): c for iv, c in res.summands.items()})
    return SplitResult(found, dual_module(res.remainder))


def split_rest(z: BipathModule) -> Counter:
    if z.dims[MIN] or z.dims[MAX]:
        raise PreconditionError("split_rest needs a module vanishing at 0̂ and 1̂")
    out: Counter = Counter()
    for iv, c in barcode_by_ranks(restrict(z, UPPER)).items():
        out[BipathInterval.up(iv.b, iv.d)] += c
    for iv, c in barcode_by_ranks(restrict(z, LOWER)).items():
        out[BipathInterval.down(iv.b, iv.d)] += c
    return out


def decompose_direct(v: BipathModule) -> Counter:
    full = split_full(v)
    left = split_left(full.remainder)
    right = split_right(left.remainder)
    return full.summands + left.summands + right.summands + split_rest(right.remainder)
