"""Bit-packed GF(2) matrices.

Rows are stored as little-endian ``uint64`` limbs so that column ``c`` is bit
``c % 64`` of limb ``c // 64``.  The same convention maps a row to a Python int
(bit ``c`` of the int is column ``c``), which is how vectors cross the API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np


def _nwords(cols: int) -> int:
    return max(1, (cols + 63) // 64)


def int_to_limbs(v: int, nwords: int) -> np.ndarray:
    return np.frombuffer(v.to_bytes(8 * nwords, "little"), dtype="<u8").copy()


def limbs_to_int(row: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(row, dtype="<u8").tobytes(), "little")


def _eliminate(a: np.ndarray, pivot_cols: int) -> List[int]:
    """In-place reduced row echelon form over the first ``pivot_cols`` columns.

    Returns the pivot columns; row ``i`` of the result holds pivot ``pivots[i]``.
    """
    rows = a.shape[0]
    pivots: List[int] = []
    r = 0
    for c in range(pivot_cols):
        if r == rows:
            break
        w, b = divmod(c, 64)
        bit = np.uint64(1 << b)
        col = (a[r:, w] & bit) != 0
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        hit = np.flatnonzero((a[:, w] & bit) != 0)
        hit = hit[hit != r]
        if hit.size:
            # columns left of limb w are already cleared in the pivot row
            a[hit, w:] ^= a[r, w:]
        pivots.append(c)
        r += 1
    return pivots


@dataclass
class Gf2Matrix:
    """Dense binary matrix with packed rows."""

    data: np.ndarray
    cols: int

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.uint64)
        if self.data.ndim != 2 or self.data.shape[1] != _nwords(self.cols):
            raise ValueError("packed data does not match column count")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(np.zeros((rows, _nwords(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        m = cls.zeros(n, n)
        idx = np.arange(n)
        m.data[idx, idx // 64] = np.left_shift(np.uint64(1), (idx % 64).astype(np.uint64))
        return m

    @classmethod
    def from_ints(cls, rows: Iterable[int], cols: int) -> "Gf2Matrix":
        nw = _nwords(cols)
        buf = b"".join(int(v).to_bytes(8 * nw, "little") for v in rows)
        data = np.frombuffer(buf, dtype="<u8").reshape(-1, nw)
        return cls(data.copy(), cols)

    @classmethod
    def from_dense(cls, dense) -> "Gf2Matrix":
        d = np.asarray(dense, dtype=np.uint8) & 1
        rows, cols = d.shape
        nw = _nwords(cols)
        padded = np.zeros((rows, 64 * nw), dtype=np.uint8)
        padded[:, :cols] = d
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(packed.view("<u8").reshape(rows, nw), cols)

    def to_dense(self) -> np.ndarray:
        bits = np.unpackbits(self.data.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.cols].astype(np.uint8)

    def row_int(self, i: int) -> int:
        return limbs_to_int(self.data[i])

    def row_ints(self) -> List[int]:
        return [self.row_int(i) for i in range(self.rows)]

    def copy(self) -> "Gf2Matrix":
        return Gf2Matrix(self.data.copy(), self.cols)

    def transpose(self) -> "Gf2Matrix":
        return Gf2Matrix.from_dense(self.to_dense().T)

    def hstack(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if other.rows != self.rows:
            raise ValueError("row counts differ")
        return Gf2Matrix.from_dense(np.hstack([self.to_dense(), other.to_dense()]))

    def matvec(self, v: int) -> int:
        """``M v`` with ``v`` an int over columns; result is an int over rows."""
        vl = int_to_limbs(v, self.data.shape[1])
        prod = self.data & vl
        bits = np.bitwise_count(prod).sum(axis=1) & 1
        out = 0
        for i in np.flatnonzero(bits):
            out |= 1 << int(i)
        return out

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        a = self.to_dense().astype(np.int64)
        b = other.to_dense().astype(np.int64)
        return Gf2Matrix.from_dense((a @ b) & 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Gf2Matrix)
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    # elimination

    def rref(self) -> Tuple["Gf2Matrix", List[int]]:
        a = self.data.copy()
        pivots = _eliminate(a, self.cols)
        return Gf2Matrix(a[: len(pivots)], self.cols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace_basis(self) -> List[int]:
        """Basis of ``{v : M v = 0}`` as ints over the columns."""
        red, pivots = self.rref()
        free = sorted(set(range(self.cols)) - set(pivots))
        if not free:
            return []
        dense = red.to_dense()
        out = []
        free_cols = dense[:, free] if pivots else np.zeros((0, len(free)), dtype=np.uint8)
        for j, f in enumerate(free):
            v = 1 << f
            for i in np.flatnonzero(free_cols[:, j]):
                v |= 1 << pivots[int(i)]
            out.append(v)
        return out

    def left_nullspace_basis(self) -> List[int]:
        """Basis of ``{y : y M = 0}`` as ints over the rows."""
        rows = self.rows
        aug = np.hstack([self.data, Gf2Matrix.identity(rows).data]) if rows else self.data
        # the identity block starts on a limb boundary, so split bookkeeping by limb
        nw = self.data.shape[1]
        a = aug.copy()
        pivots = _eliminate(a, nw * 64)
        out = []
        for i in range(len(pivots), rows):
            out.append(limbs_to_int(a[i, nw:]))
        return out

    def solve(self, b: int) -> Optional[int]:
        """Some ``x`` with ``M x = b`` (``b`` an int over rows), or ``None``."""
        rows = self.rows
        nw = self.data.shape[1]
        bcol = np.zeros((rows, 1), dtype=np.uint64)
        for i in range(rows):
            if (b >> i) & 1:
                bcol[i, 0] = 1
        if b >> rows:
            raise ValueError("right-hand side longer than the row count")
        a = np.hstack([self.data, bcol])
        pivots = _eliminate(a, nw * 64)
        r = len(pivots)
        if np.any(a[r:, nw] & np.uint64(1)):
            return None
        x = 0
        for i, c in enumerate(pivots):
            if a[i, nw] & np.uint64(1):
                x |= 1 << c
        return x


class RowSpace:
    """Span of a set of bit vectors, with fast membership by single-pass reduction."""

    def __init__(self, vectors: Sequence[int], cols: int):
        self.cols = cols
        vecs = [v for v in vectors]
        if vecs:
            red, pivots = Gf2Matrix.from_ints(vecs, cols).rref()
            self._basis = list(zip(pivots, red.row_ints()))
        else:
            self._basis = []

    @property
    def rank(self) -> int:
        return len(self._basis)

    @property
    def basis(self) -> List[int]:
        return [row for _, row in self._basis]

    @property
    def pivots(self) -> List[int]:
        return [p for p, _ in self._basis]

    def reduce(self, v: int) -> int:
        # fully reduced echelon rows: each pivot bit lives in exactly one row
        for p, row in self._basis:
            if (v >> p) & 1:
                v ^= row
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    __contains__ = contains

    def extended(self, vectors: Sequence[int]) -> "RowSpace":
        return RowSpace(self.basis + list(vectors), self.cols)


def rank_of(vectors: Sequence[int], cols: int) -> int:
    if not vectors:
        return 0
    return Gf2Matrix.from_ints(vectors, cols).rank()
