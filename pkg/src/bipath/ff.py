"""Exact dense linear algebra over a prime field F_p.

Matrices are plain ``numpy`` integer arrays with entries reduced into
``[0, p)``.  Zero-row and zero-column matrices are valid everywhere.
Every routine takes the characteristic ``p`` explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

DTYPE = np.int64


class DimensionMismatch(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The coefficient field F_p."""

    p: int = 2

    def __post_init__(self) -> None:
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"field characteristic must be prime, got {self.p!r}")

    def inv(self, a: int) -> int:
        return inverse(a, self.p)


def inverse(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return pow(a, -1, p)


def as_matrix(data, p: int, shape: Optional[tuple[int, int]] = None) -> np.ndarray:
    """Coerce nested lists / arrays into a reduced 2-d matrix over F_p."""
    if shape is not None and (data is None or np.size(data) == 0):
        return np.zeros(shape, dtype=DTYPE)
    a = np.array(data, dtype=DTYPE)
    if a.ndim == 1 and shape is not None:
        a = a.reshape(shape)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    if shape is not None and a.shape != tuple(shape):
        raise DimensionMismatch(f"expected shape {tuple(shape)}, got {a.shape}")
    return a % p


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=DTYPE)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=DTYPE)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    # entries < p and inner dimension is small, so int64 cannot overflow
    return (a @ b) % p


def chain_product(mats: Sequence[np.ndarray], p: int, dim: int) -> np.ndarray:
    """Composite ``mats[-1] @ ... @ mats[0]``; identity of size ``dim`` when empty."""
    out = identity(dim)
    for m in mats:
        out = matmul(m, out, p)
    return out


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with lowest-index pivots.

    Returns the reduced matrix and the list of pivot columns.
    """
    r = np.array(a, dtype=DTYPE) % p
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = (r[row] * inverse(r[row, col], p)) % p
        col_vals = r[:, col].copy()
        col_vals[row] = 0
        hit = np.nonzero(col_vals)[0]
        if hit.size:
            r[hit] = (r[hit] - np.outer(col_vals[hit], r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def column_space(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of the column space: the leftmost independent columns of ``a``."""
    if a.shape[1] == 0:
        return zeros(a.shape[0], 0)
    _, piv = rref(a, p)
    return a[:, piv] % p


def solve(a: np.ndarray, b, p: int) -> Optional[np.ndarray]:
    """A vector ``x`` with ``a @ x == b`` over F_p, or ``None`` if b is not in im(a)."""
    b = np.asarray(b, dtype=DTYPE).reshape(-1) % p
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"matrix has {a.shape[0]} rows, vector has {b.shape[0]}")
    n = a.shape[1]
    if n == 0:
        return np.zeros(0, dtype=DTYPE) if not b.any() else None
    aug = np.concatenate([a % p, b.reshape(-1, 1)], axis=1)
    r, piv = rref(aug, p)
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=DTYPE)
    for i, c in enumerate(piv):
        x[c] = r[i, n]
    return x


def solve_matrix(a: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Columnwise :func:`solve` for a matrix right-hand side."""
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    n, k = a.shape[1], b.shape[1]
    if k == 0:
        return zeros(n, 0)
    aug = np.concatenate([a % p, b % p], axis=1)
    r, piv = rref(aug, p)
    if any(c >= n for c in piv):
        return None
    x = zeros(n, k)
    for i, c in enumerate(piv):
        x[c] = r[i, n:]
    return x


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning ker(m); their number is cols(m) - rank(m)."""
    rows, cols = m.shape
    if rows == 0:
        return identity(cols)
    r, piv = rref(m, p)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = zeros(cols, len(free))
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, c in enumerate(piv):
            basis[c, k] = (-r[i, f]) % p
    return basis


def invert(m: np.ndarray, p: int) -> np.ndarray:
    n, k = m.shape
    if n != k:
        raise SingularMatrixError(f"non-square matrix {m.shape}")
    if n == 0:
        return zeros(0, 0)
    r, piv = rref(np.concatenate([m % p, identity(n)], axis=1), p)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise SingularMatrixError("matrix is singular")
    return r[:, n:].copy()


def intersect_columnspaces(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Basis of im(a) ∩ im(b) via the kernel of ``[a | -b]``."""
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    a = column_space(a, p)
    b = column_space(b, p)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return zeros(a.shape[0], 0)
    ker = kernel_basis(np.concatenate([a, (-b) % p], axis=1), p)
    return column_space(matmul(a, ker[: a.shape[1]], p), p)


def complete_basis(a: np.ndarray, p: int) -> np.ndarray:
    """Standard basis vectors extending the independent columns of ``a`` to a basis.

    Greedy: lowest-index unit vectors first.
    """
    n = a.shape[0]
    r = a.shape[1]
    _, piv = rref(np.concatenate([a % p, identity(n)], axis=1), p)
    extra = [c - r for c in piv if c >= r]
    out = zeros(n, len(extra))
    for k, i in enumerate(extra):
        out[i, k] = 1
    return out


def random_matrix(rows: int, cols: int, p: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, p, size=(rows, cols), dtype=DTYPE)


def random_invertible(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random element of GL_n(F_p), by rejection on the rank."""
    while True:
        m = random_matrix(n, n, p, rng)
        if rank(m, p) == n:
            return m


def is_permutation(m: np.ndarray) -> bool:
    if m.shape[0] != m.shape[1]:
        return False
    if not np.isin(m, (0, 1)).all():
        return False
    return bool((m.sum(axis=0) == 1).all() and (m.sum(axis=1) == 1).all())


# --- elementary operation transcripts -------------------------------------


@dataclass(frozen=True)
class Op:
    """One elementary operation.

    ``kind`` is ``swap``, ``scale`` or ``add``; ``axis`` is ``row`` or ``col``.
    ``add`` means line ``dst`` += ``c`` * line ``src``; ``scale`` multiplies
    line ``dst`` by ``c``; ``swap`` exchanges ``src`` and ``dst``.
    """

    kind: str
    axis: str
    src: int
    dst: int
    c: int = 1

    def apply(self, m: np.ndarray, p: int) -> None:
        view = m if self.axis == "row" else m.T
        if self.kind == "swap":
            view[[self.src, self.dst]] = view[[self.dst, self.src]]
        elif self.kind == "scale":
            view[self.dst] = (view[self.dst] * self.c) % p
        elif self.kind == "add":
            view[self.dst] = (view[self.dst] + self.c * view[self.src]) % p
        else:
            raise ValueError(f"unknown operation {self.kind!r}")


@dataclass
class OpTranscript:
    """Ordered record of elementary operations applied to a matrix.

    ``mask`` marks entries that are structurally zero; they are re-zeroed
    after each operation so replays agree with masked computations.
    """

    p: int
    ops: list[Op] = field(default_factory=list)
    source: Optional[np.ndarray] = None
    result: Optional[np.ndarray] = None
    mask: Optional[np.ndarray] = None

    def record(self, op: Op, m: Optional[np.ndarray] = None) -> None:
        self.ops.append(op)
        if m is not None:
            op.apply(m, self.p)
            if self.mask is not None:
                m[self.mask] = 0

    def extend(self, ops: Iterable[Op]) -> None:
        self.ops.extend(ops)

    def replay(self, m: np.ndarray) -> np.ndarray:
        out = np.array(m, dtype=DTYPE) % self.p
        for op in self.ops:
            op.apply(out, self.p)
            if self.mask is not None:
                out[self.mask] = 0
        return out

    def verify(self) -> bool:
        if self.source is None or self.result is None:
            raise ValueError("transcript has no recorded source/result")
        return bool(np.array_equal(self.replay(self.source), self.result))

    def __len__(self) -> int:
        return len(self.ops)
