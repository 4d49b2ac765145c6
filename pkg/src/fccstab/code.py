"""Stabilizer-group structure on the periodic lattice.

Counts logical qubits, computes the space of generator dependencies and checks
that no product of generators equals ``-I``.  A dependency is a bit vector ``t``
over generator indices (odd sites) with ``prod_u S_u^{t_u}`` proportional to ``I``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .gf2 import Gf2Matrix, RowSpace
from .lattice import LatticeSpec, add, parity
from .pauli import PauliWord, generator

LETTER_AXES = (((-1, 0, 0), (1, 0, 0)), ((0, -1, 0), (0, 1, 0)), ((0, 0, -1), (0, 0, 1)))


def generator_words(spec: LatticeSpec) -> List[PauliWord]:
    return [generator(spec, spec.generator_site(v)) for v in range(spec.n)]


def generator_matrix(spec: LatticeSpec) -> Gf2Matrix:
    """Rows are the symplectic vectors ``x | z << n`` of ``S_u`` in generator order."""
    return Gf2Matrix.from_ints((w.symplectic for w in generator_words(spec)), 2 * spec.n)


def stabilizer_space(spec: LatticeSpec) -> RowSpace:
    return RowSpace([w.symplectic for w in generator_words(spec)], 2 * spec.n)


@dataclass(frozen=True)
class Theorem1Report:
    spec: LatticeSpec
    n: int
    rank: int
    k: int
    expected_k: int

    @property
    def ok(self) -> bool:
        return self.k == self.expected_k


def logical_count(spec: LatticeSpec) -> Theorem1Report:
    r = generator_matrix(spec).rank()
    return Theorem1Report(spec, spec.n, r, spec.n - r, 4 * spec.g)


# dependency space


def sublattice_indicator(spec: LatticeSpec, abc: Sequence[int]) -> int:
    """Bit vector of the odd sites congruent to ``abc`` modulo 2."""
    v = 0
    for idx in range(spec.n):
        u = spec.generator_site(idx)
        if all((c - a) % 2 == 0 for c, a in zip(u, abc)):
            v |= 1 << idx
    return v


def _bit(t: int, idx: int) -> int:
    return (t >> idx) & 1


def passes_parity_checks(spec: LatticeSpec, t: int) -> bool:
    """Three four-site checks at every even site (pairs of axes)."""
    for u in spec.even_sites():
        pair = []
        for lo, hi in LETTER_AXES:
            a = _bit(t, spec.generator_index(add(u, lo)))
            b = _bit(t, spec.generator_index(add(u, hi)))
            pair.append(a ^ b)
        if pair[0] ^ pair[1] or pair[0] ^ pair[2] or pair[1] ^ pair[2]:
            return False
    return True


def passes_periodicity(spec: LatticeSpec, t: int) -> bool:
    """``t_u = t_{u + 2g e_a}`` for every odd ``u`` and axis ``a``."""
    s = 2 * spec.g
    for idx in range(spec.n):
        u = spec.generator_site(idx)
        b = _bit(t, idx)
        for e in ((s, 0, 0), (0, s, 0), (0, 0, s)):
            if _bit(t, spec.generator_index(add(u, e))) != b:
                return False
    return True


def fold(spec: LatticeSpec, t: int) -> int:
    """Restrict a ``2g``-periodic ``t`` to the ``(g,g,g)`` torus."""
    small = LatticeSpec(spec.g, spec.g, spec.g)
    out = 0
    for idx in range(small.n):
        u = small.generator_site(idx)
        if _bit(t, spec.generator_index(u)):
            out |= 1 << idx
    return out


def f_parity(spec: LatticeSpec, t: int) -> int:
    """Closed-form sign bit of ``prod_u S_u^{t_u}`` for a dependency ``t``."""
    f = 0
    for idx in range(spec.n):
        if not _bit(t, idx):
            continue
        u = spec.generator_site(idx)
        if u[0] % 2 != 0:
            continue  # only the sublattices 001 and 010
        f ^= _bit(t, spec.generator_index(add(u, (2, 0, 0))))
        f ^= _bit(t, spec.generator_index(add(u, (0, 2, 0))))
    return f


def product_of(spec: LatticeSpec, t: int, words: Optional[List[PauliWord]] = None) -> PauliWord:
    """Phase-tracked ``prod S_u^{t_u}`` in ascending generator order."""
    words = words if words is not None else generator_words(spec)
    out = PauliWord(spec)
    idx = 0
    while t:
        if t & 1:
            out = out * words[idx]
        t >>= 1
        idx += 1
    return out


@dataclass
class DependencySpace:
    spec: LatticeSpec
    basis: List[int]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def random_element(self, rng: random.Random) -> int:
        v = 0
        for b in self.basis:
            if rng.getrandbits(1):
                v ^= b
        return v

    def contains(self, t: int) -> bool:
        return RowSpace(self.basis, self.spec.n).contains(t)


def dependency_space(spec: LatticeSpec) -> DependencySpace:
    return DependencySpace(spec, generator_matrix(spec).left_nullspace_basis())


@dataclass
class MinusIdentityReport:
    spec: LatticeSpec
    checked: int
    violations: List[int] = field(default_factory=list)
    f_mismatches: List[int] = field(default_factory=list)

    @property
    def minus_identity_found(self) -> bool:
        return bool(self.violations)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.f_mismatches


def check_no_minus_identity(
    spec: LatticeSpec,
    random_samples: int = 0,
    seed: int = 0,
    space: Optional[DependencySpace] = None,
) -> MinusIdentityReport:
    """Each dependency product must be exactly ``+I`` and agree with :func:`f_parity`.

    The basis is checked first, then ``random_samples`` random elements of the
    dependency space (these exercise the homomorphism property).
    """
    space = space or dependency_space(spec)
    words = generator_words(spec)
    rng = random.Random(seed)
    samples = list(space.basis) + [space.random_element(rng) for _ in range(random_samples)]
    report = MinusIdentityReport(spec, len(samples))
    for t in samples:
        p = product_of(spec, t, words)
        if not p.is_trivial() or p.phase != 0:
            report.violations.append(t)
        sign_bit = 0 if p.phase == 0 else 1
        if p.is_trivial() and f_parity(spec, t) != sign_bit:
            report.f_mismatches.append(t)
    return report


# two-dimensional reduction


def c2_check_matrix(g: int) -> Gf2Matrix:
    """Checks ``t_{i+1,j} + t_{i-1,j} + t_{i,j+1} + t_{i,j-1}`` on the ``2g x 2g`` torus.

    Columns are odd sites of the torus in row-major order, rows are even sites.
    """
    m = 2 * g
    odd = [(i, j) for i in range(m) for j in range(m) if (i + j) & 1]
    col = {u: c for c, u in enumerate(odd)}
    rows = []
    for i in range(m):
        for j in range(m):
            if (i + j) & 1:
                continue
            v = 0
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                v ^= 1 << col[((i + di) % m, (j + dj) % m)]
            rows.append(v)
    return Gf2Matrix.from_ints(rows, len(odd))


def dim_c2(g: int) -> int:
    if g < 1:
        raise ValueError("g must be positive")
    m = c2_check_matrix(g)
    return m.cols - m.rank()


def c2_sites(g: int) -> list:
    m = 2 * g
    return [(i, j) for i in range(m) for j in range(m) if (i + j) & 1]


def c2_extend(g: int, row0: int, row1: int) -> Optional[int]:
    """Fill a ``C(g,g)`` vector from its two first rows; ``None`` if it fails to close.

    ``row0`` and ``row1`` are ``g``-bit ints indexing the odd cells of rows 0 and 1
    in ascending ``j``.
    """
    m = 2 * g
    grid = np.zeros((m, m), dtype=np.uint8)
    for r, bits in ((0, row0), (1, row1)):
        js = [j for j in range(m) if (r + j) & 1]
        for b, j in enumerate(js):
            grid[r, j] = (bits >> b) & 1
    for i in range(1, m - 1):
        for j in range(m):
            if (i + j) & 1:
                continue
            grid[i + 1, j] = grid[i, (j + 1) % m] ^ grid[i, (j - 1) % m] ^ grid[i - 1, j]
    col = {u: c for c, u in enumerate(c2_sites(g))}
    v = 0
    for (i, j), c in col.items():
        if grid[i, j]:
            v |= 1 << c
    if c2_check_matrix(g).matvec(v):
        return None
    return v
