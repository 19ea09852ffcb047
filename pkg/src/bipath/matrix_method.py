"""Interval decomposition through the block matrix problem at 0̂ and 1̂.

Both path restrictions are decomposed independently.  The change-of-basis
matrices between the two decompositions at the minimum (``lam``) and the
maximum (``gam``) form a labelled block matrix that is reduced with
permissible operations only.  Matched labels are then glued into bipath
intervals.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ff
from .ff import Op, OpTranscript
from .module import BipathModule, require_valid, restrict
from .paths import PathDecomposition, decompose_path
from .poset import (
    LOWER,
    UPPER,
    BipathInterval,
    BipathShape,
    PathInterval,
    hom_nonzero,
    label_rank,
)


class StructuralError(RuntimeError):
    """The structural zeros forced by commutativity do not hold."""


@dataclass
class BlockProblem:
    """Labelled block matrix problem.

    ``lam`` maps upper coordinates at 0̂ (columns, ``lam_cols``) to lower
    coordinates at 0̂ (rows, ``lam_rows``); ``gam`` does the same at 1̂.
    Labels are sorted along the projective/injective chain.  ``upper_inner``
    and ``lower_inner`` hold the path summands missing both endpoints.
    """

    shape: BipathShape
    p: int
    lam: np.ndarray
    gam: np.ndarray
    lam_cols: list[PathInterval]
    lam_rows: list[PathInterval]
    gam_cols: list[PathInterval]
    gam_rows: list[PathInterval]
    upper_inner: list[PathInterval] = field(default_factory=list)
    lower_inner: list[PathInterval] = field(default_factory=list)
    transcript: Optional[OpTranscript] = None

    def _split(self, labels: list[PathInterval]) -> tuple[int, int]:
        """Counts of (left-only, central) labels in a list at 0̂."""
        central = sum(1 for iv in labels if iv.b == 0 and iv.touches_max(self.shape))
        return len(labels) - central, central

    @property
    def sizes(self) -> dict[str, int]:
        lx, cx = self._split(self.lam_cols)
        ly, cy = self._split(self.lam_rows)
        return {
            "lx": lx,
            "cx": cx,
            "rx": len(self.gam_cols) - cx,
            "ly": ly,
            "cy": cy,
            "ry": len(self.gam_rows) - cy,
        }

    def merged(self) -> tuple[np.ndarray, np.ndarray, list[PathInterval], list[PathInterval]]:
        """The single block matrix, its strongly-zero mask, row and column labels."""
        s = self.sizes
        lx, cx, rx, ly, cy, ry = s["lx"], s["cx"], s["rx"], s["ly"], s["cy"], s["ry"]
        mat = ff.zeros(ly + cy + ry, lx + cx + rx)
        mat[: ly + cy, : lx + cx] = self.lam
        mat[ly:, lx:] = self.gam
        mask = np.zeros(mat.shape, dtype=bool)
        mask[:ly, lx + cx :] = True
        mask[ly + cy :, :lx] = True
        rows = self.lam_rows + self.gam_rows[cy:]
        cols = self.lam_cols + self.gam_cols[cx:]
        return mat, mask, rows, cols

    def check_structure(self) -> None:
        s = self.sizes
        lx, cx, ly, cy = s["lx"], s["cx"], s["ly"], s["cy"]
        if cx != cy:
            raise StructuralError(f"central block is {cy}x{cx}, not square")
        for name, labels in (
            ("lam_cols", self.lam_cols),
            ("lam_rows", self.lam_rows),
            ("gam_cols", self.gam_cols),
            ("gam_rows", self.gam_rows),
        ):
            ranks = [label_rank(iv, self.shape) for iv in labels]
            if ranks != sorted(ranks):
                raise StructuralError(f"{name} not sorted along the chain")
        if self.lam[ly:, :lx].any():
            raise StructuralError("central rows of lam are nonzero on left-only columns")
        if self.gam[cy:, :cx].any():
            raise StructuralError("right-only rows of gam are nonzero on central columns")
        if not np.array_equal(self.lam[ly:, lx:], self.gam[:cy, :cx]):
            raise StructuralError("central blocks of lam and gam differ")


@dataclass
class NormalForm:
    """Result of reducing a block problem.

    ``p_left[i, j] == 1`` matches lower label ``left_rows[i]`` with upper
    label ``left_cols[j]``; ``p_right`` likewise for labels at 1̂.
    """

    p_left: np.ndarray
    p_right: np.ndarray
    central_size: int
    left_rows: list[PathInterval]
    left_cols: list[PathInterval]
    right_rows: list[PathInterval]
    right_cols: list[PathInterval]
    matrix: np.ndarray
    transcript: OpTranscript
    row_labels: list[PathInterval] = field(default_factory=list)
    col_labels: list[PathInterval] = field(default_factory=list)

    def audit(self) -> list[str]:
        return audit_transcript(self.transcript, self.row_labels, self.col_labels)


def _central_count(dec: PathDecomposition, shape: BipathShape) -> int:
    return sum(1 for iv in dec.intervals if iv.b == 0 and iv.touches_max(shape))


def build_problem(v: BipathModule, up: PathDecomposition, low: PathDecomposition) -> BlockProblem:
    p = v.p
    lam = ff.matmul(low.bases[0], ff.invert(up.bases[0], p), p)
    gam = ff.matmul(low.bases[-1], ff.invert(up.bases[-1], p), p)
    sh = v.shape
    bp = BlockProblem(
        shape=sh,
        p=p,
        lam=lam,
        gam=gam,
        lam_cols=up.labels_at(0),
        lam_rows=low.labels_at(0),
        gam_cols=up.labels_at(len(up.bases) - 1),
        gam_rows=low.labels_at(len(low.bases) - 1),
        upper_inner=_inner(up),
        lower_inner=_inner(low),
    )
    bp.check_structure()
    return bp


def one_way_reduce(a: np.ndarray, p: int) -> tuple[np.ndarray, OpTranscript]:
    """Reduce an invertible matrix to a permutation matrix.

    Only scalings, additions of a row to a row above it and additions of a
    column to a column to its right are used.  The pivot of each column is
    its lowest nonzero entry.
    """
    a = np.array(a, dtype=ff.DTYPE) % p
    d = a.shape[0]
    if a.shape != (d, d) or ff.rank(a, p) != d:
        raise ff.SingularMatrixError("one_way_reduce needs an invertible square matrix")
    tr = OpTranscript(p, source=a.copy())
    for col in range(d):
        row = int(np.nonzero(a[:, col])[0].max())
        piv = int(a[row, col])
        if piv != 1:
            tr.record(Op("scale", "row", row, row, ff.inverse(piv, p)), a)
        for c in range(col + 1, d):
            if a[row, c]:
                tr.record(Op("add", "col", col, c, (-int(a[row, c])) % p), a)
        for r in range(row):
            if a[r, col]:
                tr.record(Op("add", "row", row, r, (-int(a[r, col])) % p), a)
    tr.result = a.copy()
    return a, tr


def audit_transcript(
    tr: OpTranscript, row_labels: list[PathInterval], col_labels: list[PathInterval]
) -> list[str]:
    """Operations in ``tr`` that are not permissible for the given labels."""
    bad = []
    for k, op in enumerate(tr.ops):
        labels = row_labels if op.axis == "row" else col_labels
        src, dst = labels[op.src], labels[op.dst]
        if op.kind == "scale":
            if op.c % tr.p == 0:
                bad.append(f"#{k}: scaling by zero")
            continue
        if src == dst:
            continue
        if op.kind == "swap":
            bad.append(f"#{k}: swap across labels {src} / {dst}")
        elif op.axis == "col" and not hom_nonzero(dst, src):
            bad.append(f"#{k}: column add {src} -> {dst} against the order")
        elif op.axis == "row" and not hom_nonzero(src, dst):
            bad.append(f"#{k}: row add {src} -> {dst} against the order")
    return bad


def audit_one_way(tr: OpTranscript) -> list[str]:
    """Direction audit for a plain OneWayReduce transcript."""
    bad = []
    for k, op in enumerate(tr.ops):
        if op.kind == "swap":
            bad.append(f"#{k}: swap")
        elif op.kind == "add" and op.axis == "row" and not op.src > op.dst:
            bad.append(f"#{k}: row {op.src} added to row {op.dst} below it")
        elif op.kind == "add" and op.axis == "col" and not op.src < op.dst:
            bad.append(f"#{k}: column {op.src} added to column {op.dst} left of it")
    return bad


def _reduce_central(mat: np.ndarray, tr: OpTranscript, rows: range, cols: range) -> None:
    """Gauss-Jordan on the central block using row operations inside it."""
    p = tr.p
    r0, c0 = rows.start, cols.start
    size = len(rows)
    for k in range(size):
        col = c0 + k
        cand = [r for r in range(r0 + k, r0 + size) if mat[r, col]]
        if not cand:
            raise StructuralError("central block is singular")
        piv = cand[0]
        if piv != r0 + k:
            tr.record(Op("swap", "row", piv, r0 + k), mat)
        row = r0 + k
        if mat[row, col] != 1:
            tr.record(Op("scale", "row", row, row, ff.inverse(int(mat[row, col]), p)), mat)
        for r in rows:
            if r != row and mat[r, col]:
                tr.record(Op("add", "row", row, r, (-int(mat[r, col])) % p), mat)


def normalize(bp: BlockProblem) -> NormalForm:
    bp.check_structure()
    p = bp.p
    s = bp.sizes
    lx, cx, rx, ly, cy, ry = s["lx"], s["cx"], s["rx"], s["ly"], s["cy"], s["ry"]
    mat, mask, row_labels, col_labels = bp.merged()
    tr = OpTranscript(p, source=mat.copy(), mask=mask)

    # central block to E
    _reduce_central(mat, tr, range(ly, ly + cy), range(lx, lx + cx))
    # clear right of E with column additions, above E with row additions
    for k in range(cx):
        r, c = ly + k, lx + k
        for j in range(lx + cx, lx + cx + rx):
            if mat[r, j]:
                tr.record(Op("add", "col", c, j, (-int(mat[r, j])) % p), mat)
        for i in range(ly):
            if mat[i, c]:
                tr.record(Op("add", "row", r, i, (-int(mat[i, c])) % p), mat)

    # independent one-way reductions of the two corner subproblems
    p_left, sub_left = one_way_reduce(mat[:ly, :lx], p) if lx or ly else (ff.zeros(0, 0), OpTranscript(p))
    for op in sub_left.ops:
        tr.record(op, mat)
    p_right, sub_right = (
        one_way_reduce(mat[ly + cy :, lx + cx :], p) if rx or ry else (ff.zeros(0, 0), OpTranscript(p))
    )
    off_r, off_c = ly + cy, lx + cx
    for op in sub_right.ops:
        shift = off_r if op.axis == "row" else off_c
        tr.record(Op(op.kind, op.axis, op.src + shift, op.dst + shift, op.c), mat)
    tr.result = mat.copy()
    bp.transcript = tr

    if not np.array_equal(mat[ly : ly + cy, lx : lx + cx], ff.identity(cx)):
        raise StructuralError("central block did not reduce to the identity")
    if mat[ly : ly + cy, :lx].any() or mat[ly : ly + cy, lx + cx :].any():
        raise StructuralError("central rows not cleared")
    if mat[:ly, lx : lx + cx].any() or mat[ly + cy :, lx : lx + cx].any():
        raise StructuralError("central columns not cleared")

    return NormalForm(
        p_left=mat[:ly, :lx].copy(),
        p_right=mat[ly + cy :, lx + cx :].copy(),
        central_size=cx,
        left_rows=row_labels[:ly],
        left_cols=col_labels[:lx],
        right_rows=row_labels[ly + cy :],
        right_cols=col_labels[lx + cx :],
        matrix=mat,
        transcript=tr,
        row_labels=row_labels,
        col_labels=col_labels,
    )


def _inner(dec) -> list[PathInterval]:
    """Summands touching neither endpoint; ``dec`` needs ``intervals`` and ``last``."""
    return [iv for iv in dec.intervals if iv.b != 0 and iv.d != dec.last]


def glue(nf: NormalForm, up: PathDecomposition, low: PathDecomposition) -> Counter:
    """Intervals of the bipath poset read off from matched labels."""
    out: Counter = Counter()
    if nf.central_size:
        out[BipathInterval.full()] += nf.central_size
    for i, j in zip(*np.nonzero(nf.p_left)):
        upper_iv, lower_iv = nf.left_cols[j], nf.left_rows[i]
        out[BipathInterval.left(upper_iv.d, lower_iv.d)] += 1
    for i, j in zip(*np.nonzero(nf.p_right)):
        upper_iv, lower_iv = nf.right_cols[j], nf.right_rows[i]
        out[BipathInterval.right(upper_iv.b, lower_iv.b)] += 1
    for iv in _inner(up):
        out[BipathInterval.up(iv.b, iv.d)] += 1
    for iv in _inner(low):
        out[BipathInterval.down(iv.b, iv.d)] += 1
    return out


@dataclass
class MatrixMethodRun:
    """Everything produced by one run, kept for inspection and audits."""

    upper: PathDecomposition
    lower: PathDecomposition
    problem: BlockProblem
    normal_form: NormalForm
    intervals: Counter


def run_matrix_method(v: BipathModule) -> MatrixMethodRun:
    require_valid(v)
    up = decompose_path(restrict(v, UPPER))
    low = decompose_path(restrict(v, LOWER))
    bp = build_problem(v, up, low)
    nf = normalize(bp)
    return MatrixMethodRun(up, low, bp, nf, glue(nf, up, low))


def decompose_bipath(v: BipathModule) -> Counter:
    """Interval decomposition multiset of a bipath module."""
    return run_matrix_method(v).intervals
