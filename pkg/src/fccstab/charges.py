"""Syndromes, topological charges and sector bookkeeping.

A syndrome is the set of odd sites whose generator anticommutes with an operator.
In a window the syndrome also covers halo sites just outside the box: generators
there touch window qubits, and for operators supported in the window their bits
are exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import MonopoleSectorError, PreconditionError
from .gf2 import Gf2Matrix
from .lattice import (
    BODY_DIAGONALS,
    NEIGHBOR_OFFSETS,
    Context,
    Site,
    Window,
    add,
    diag_label,
    dot,
    face_diagonal_orthogonal_to,
    parity,
)
from .operators import TetrahedronSpec, dipole_sites, membrane_sites, quadrupole_sites, tetrahedron
from .pauli import PauliWord, truncated_generator
from .search import PauliSearch

_ANTI = {  # (operator letter, generator letter) -> anticommute
    (a, b): int(a != "I" and b != "I" and a != b) for a in "IXYZ" for b in "IXYZ"
}


@dataclass(frozen=True)
class Syndrome:
    ctx: Context
    support: FrozenSet[Site]

    @classmethod
    def of(cls, ctx: Context, sites: Iterable[Sequence[int]]) -> "Syndrome":
        out: set = set()
        for u in sites:
            if not parity(u):
                raise PreconditionError(f"syndrome sites must be odd, {tuple(u)} is even")
            out ^= {ctx.reduce(u)}
        return cls(ctx, frozenset(out))

    def __xor__(self, other: "Syndrome") -> "Syndrome":
        return Syndrome(self.ctx, self.support ^ other.support)

    def __len__(self) -> int:
        return len(self.support)

    @property
    def bulk_valid(self) -> bool:
        if self.ctx.periodic:
            return True
        return all(self.ctx.is_bulk(u) for u in self.support)

    def to_json(self) -> dict:
        return {
            "context": self.ctx.spec_string,
            "sites": [list(u) for u in sorted(self.support)],
            "bulk_valid": self.bulk_valid,
        }

    @classmethod
    def from_json(cls, data: dict, ctx: Optional[Context] = None) -> "Syndrome":
        from .lattice import parse_context

        ctx = ctx or parse_context(data["context"])
        return cls.of(ctx, (tuple(u) for u in data["sites"]))


def syndrome_of(P: PauliWord) -> Syndrome:
    """Generators anticommuting with ``P``.

    Each qubit of ``P`` flips the generators it meets with a different letter; a
    generator that meets the same qubit twice (side length 2) accumulates both.
    """
    ctx = P.ctx
    flips: Dict[Site, int] = {}
    for site, letter in P.letters().items():
        for off, gl in NEIGHBOR_OFFSETS:
            if _ANTI[(letter, gl)]:
                u = ctx.reduce(add(site, off, -1))
                flips[u] = flips.get(u, 0) ^ 1
    return Syndrome(ctx, frozenset(u for u, b in flips.items() if b))


# charges


@dataclass(frozen=True)
class ChargeTable:
    """Nonzero ``theta[t, alpha]`` entries over the odd plane labels of a context."""

    ctx: Context
    entries: FrozenSet[Tuple[Site, int]]
    labels: Tuple[int, ...]
    support_size: int

    def __getitem__(self, key: Tuple[Sequence[int], int]) -> int:
        t, a = key
        if self.ctx.periodic:
            a %= 2 * self.ctx.g
        return int((tuple(t), a) in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def row(self, t: Sequence[int]) -> List[int]:
        return sorted(a for tt, a in self.entries if tt == tuple(t))

    def to_json(self) -> dict:
        return {
            "context": self.ctx.spec_string,
            "labels": list(self.labels),
            "nonzero": {diag_label(t): self.row(t) for t in BODY_DIAGONALS},
        }

    def parity_identities(self) -> Dict[str, bool]:
        """Row sums equal the support parity; dots at 1 and at -1 mod 4 come in pairs."""
        out = {}
        par = self.support_size & 1
        out["row_parity"] = all(len(self.row(t)) % 2 == par for t in BODY_DIAGONALS)
        if not self.ctx.periodic or (2 * self.ctx.g) % 4 == 0:
            for r in (1, 3):
                n = sum(1 for _, a in self.entries if a % 4 == r)
                out[f"mod4_{r}"] = n % 2 == 0
        return out

    def diagram(self) -> str:
        """Rows are body-diagonals, columns ascending plane labels, ``o`` marks a nonzero charge."""
        head = "t \\ alpha " + " ".join(f"{a:>3d}" for a in self.labels)
        lines = [head]
        for t in BODY_DIAGONALS:
            cells = " ".join(("  o" if (t, a) in self.entries else "  .") for a in self.labels)
            lines.append(f"{diag_label(t):<10}{cells}")
        return "\n".join(lines)


def odd_labels(ctx: Context) -> Tuple[int, ...]:
    if ctx.periodic:
        return tuple(range(1, 2 * ctx.g, 2))
    labs = set()
    for t in BODY_DIAGONALS:
        labs.update(a for a in _window_label_range(ctx, t) if a & 1)
    return tuple(sorted(labs))


def _window_label_range(w: Window, t) -> range:
    # halo sites extend one step beyond the box
    lo = tuple(c - 1 for c in w.lo)
    hi = tuple(c + 1 for c in w.hi)
    vals = [dot(t, (a, b, c)) for a in (lo[0], hi[0]) for b in (lo[1], hi[1]) for c in (lo[2], hi[2])]
    return range(min(vals), max(vals) + 1)


def theta(s: Syndrome, t: Sequence[int], alpha: int) -> int:
    t = tuple(t)
    if s.ctx.periodic:
        m = 2 * s.ctx.g
        return sum(1 for u in s.support if dot(t, u) % m == alpha % m) & 1
    return sum(1 for u in s.support if dot(t, u) == alpha) & 1


def charge_table(s: Syndrome) -> ChargeTable:
    ctx = s.ctx
    counts: Dict[Tuple[Site, int], int] = {}
    for u in s.support:
        for t in BODY_DIAGONALS:
            a = ctx.plane_label(t, u)
            counts[(t, a)] = counts.get((t, a), 0) ^ 1
    entries = frozenset(k for k, v in counts.items() if v)
    labels = odd_labels(ctx)
    if not ctx.periodic and entries:
        labels = tuple(sorted(set(labels) | {a for _, a in entries}))
    return ChargeTable(ctx, entries, labels, len(s.support))


def sectors_equal(s1: Syndrome, s2: Syndrome) -> bool:
    if s1.ctx != s2.ctx:
        raise PreconditionError("syndromes live in different contexts")
    return charge_table(s1).entries == charge_table(s2).entries


# particle content


@dataclass(frozen=True)
class Dipole:
    h: Site
    anchor: Site

    def sites(self) -> List[Site]:
        return dipole_sites(self.anchor, self.h)

    def to_json(self) -> dict:
        return {"type": diag_label(self.h), "anchor": list(self.anchor)}


@dataclass(frozen=True)
class Quadrupole:
    """Quadrupole of type ``t`` in the bilayer between planes ``bilayer -+ 1``."""

    t: Site
    bilayer: int

    @property
    def anchor(self) -> Site:
        return ((self.bilayer - 1) * self.t[0], 0, 0)

    def sites(self) -> List[Site]:
        return quadrupole_sites(self.anchor, self.t, 1)

    def charges(self) -> set:
        return {(self.t, self.bilayer - 2), (self.t, self.bilayer + 2)}

    def to_json(self) -> dict:
        return {"type": diag_label(self.t), "bilayer": self.bilayer, "anchor": list(self.anchor)}


def dipole_charges(h: Sequence[int], anchor: Sequence[int] = (0, 0, 0)) -> set:
    out: set = set()
    for u in dipole_sites(anchor, h):
        for t in BODY_DIAGONALS:
            out ^= {(t, dot(t, u))}
    return out


@dataclass
class ParticleDecomposition:
    dipoles: List[Dipole] = field(default_factory=list)
    quadrupoles: List[Quadrupole] = field(default_factory=list)

    def charges(self) -> set:
        out: set = set()
        for q in self.quadrupoles:
            out ^= q.charges()
        for d in self.dipoles:
            out ^= dipole_charges(d.h, d.anchor)
        return out

    def sites(self) -> frozenset:
        out: set = set()
        for p in list(self.dipoles) + list(self.quadrupoles):
            for u in p.sites():
                out ^= {u}
        return frozenset(out)

    def to_json(self) -> dict:
        return {
            "dipoles": [d.to_json() for d in self.dipoles],
            "quadrupoles": [q.to_json() for q in self.quadrupoles],
        }


def decompose_table(table: ChargeTable) -> ParticleDecomposition:
    """Greedy reduction of a window charge table to quadrupoles plus at most two dipoles."""
    if table.ctx.periodic:
        raise PreconditionError("decomposition is defined for window (infinite-lattice) syndromes")
    if table.support_size % 2:
        raise MonopoleSectorError("odd number of excitations: the syndrome carries a monopole")
    dec = ParticleDecomposition()
    dots = set(table.entries)
    for t in BODY_DIAGONALS:
        while True:
            row = [a for tt, a in dots if tt == t and abs(a) > 1]
            if not row:
                break
            a = max(row, key=lambda v: (abs(v), v))
            q = Quadrupole(t, a - 2 if a > 0 else a + 2)
            dots ^= q.charges()
            dec.quadrupoles.append(q)
    charged = []
    for t in BODY_DIAGONALS:
        top, bot = (t, 1) in dots, (t, -1) in dots
        if top != bot:
            raise AssertionError(f"unbalanced columns for {t}: row parity violated")
        if top:
            charged.append(t)
    if len(charged) == 2:
        dec.dipoles.append(Dipole(face_diagonal_orthogonal_to(*charged), (0, 0, 0)))
    elif len(charged) == 4:
        dec.dipoles.append(Dipole((1, 1, 0), (0, 0, 0)))
        dec.dipoles.append(Dipole((1, -1, 0), (0, 0, 0)))
    elif charged:
        raise AssertionError(f"odd number of charged body-diagonals: {charged}")
    if dec.charges() != table.entries:
        raise AssertionError("decomposition does not reproduce the charge table")
    return dec


def decompose(s: Syndrome) -> ParticleDecomposition:
    return decompose_table(charge_table(s))


# solving syndromes inside a window


@dataclass
class SolveResult:
    status: str  # "solved", "charged", "inconclusive"
    operator: Optional[PauliWord] = None
    certificate: List[Tuple[Site, int]] = field(default_factory=list)
    reason: str = ""

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.operator is not None:
            out["operator"] = self.operator.to_json()
        if self.certificate:
            out["certificate"] = [{"t": diag_label(t), "alpha": a} for t, a in self.certificate]
        if self.reason:
            out["reason"] = self.reason
        return out


class WindowSyndromeMap:
    """Linear map from window Paulis (x and z bits per qubit) to touching-site syndromes."""

    def __init__(self, w: Window):
        self.window = w
        self.rows = w.touching_odd_sites()
        self.row_index = {u: i for i, u in enumerate(self.rows)}
        n = w.n
        vecs = []
        for u in self.rows:
            g = truncated_generator(w, u)
            # X_q flips the row iff the generator has a Z component at q, and vice versa
            vecs.append(g.z | (g.x << n))
        self.matrix = Gf2Matrix.from_ints(vecs, 2 * n)

    def syndrome_vector(self, s: Syndrome) -> Optional[int]:
        v = 0
        for u in s.support:
            i = self.row_index.get(u)
            if i is None:
                return None
            v |= 1 << i
        return v

    def solve(self, s: Syndrome) -> SolveResult:
        w = self.window
        v = self.syndrome_vector(s)
        if v is None:
            return SolveResult("inconclusive", reason="syndrome leaves the window halo")
        x = self.matrix.solve(v)
        if x is not None:
            return SolveResult("solved", PauliWord.from_symplectic(w, x))
        cert = sorted(charge_table(s).entries)
        if cert:
            return SolveResult("charged", certificate=cert)
        return SolveResult("inconclusive", reason="no solution supported in the window; enlarge it")


def solve_syndrome(w: Window, s: Syndrome, smap: Optional[WindowSyndromeMap] = None) -> SolveResult:
    if s.ctx != w:
        raise PreconditionError("syndrome context differs from the window")
    if not s.support:
        return SolveResult("solved", PauliWord(w))
    return (smap or WindowSyndromeMap(w)).solve(s)


def zero_charge_basis(w: Window, region: Iterable[Site]) -> List[Tuple[Site, ...]]:
    """Basis of syndromes on ``region`` (odd sites) whose charges all vanish."""
    sites = sorted(u for u in region if parity(u))
    labels: Dict[Tuple[Site, int], int] = {}
    cols = []
    for u in sites:
        col = 0
        for t in BODY_DIAGONALS:
            key = (t, dot(t, u))
            r = labels.setdefault(key, len(labels))
            col |= 1 << r
        cols.append(col)
    # charge map: rows = (t, alpha), columns = sites; its nullspace is what we want
    rows = [0] * len(labels)
    for c, col in enumerate(cols):
        r = 0
        while col:
            if col & 1:
                rows[r] |= 1 << c
            col >>= 1
            r += 1
    null = Gf2Matrix.from_ints(rows, len(sites)).nullspace_basis()
    return [tuple(sites[i] for i in range(len(sites)) if (v >> i) & 1) for v in null]


def random_zero_charge_syndrome(w: Window, basis: Sequence[Tuple[Site, ...]], rng: random.Random) -> Syndrome:
    out: set = set()
    for b in basis:
        if rng.getrandbits(1):
            out ^= set(b)
    return Syndrome(w, frozenset(out))


# monopole weight scan


@dataclass
class MonopoleScanEntry:
    R: int
    lower: int
    upper: int
    exact: bool
    witness: Optional[PauliWord] = None
    membrane_weight: int = 0
    tetra_lower: int = 0
    nodes: int = 0

    def to_json(self) -> dict:
        out = {
            "R": self.R,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "membrane_weight": self.membrane_weight,
            "tetrahedron_lower": self.tetra_lower,
            "nodes": self.nodes,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _chebyshev(u: Sequence[int], v: Sequence[int]) -> int:
    return max(abs(a - b) for a, b in zip(u, v))


def _tetrahedron_lower_bound(ctx: Context, u: Site, ball: set) -> int:
    """``ceil(m / c)`` over tetrahedra whose interior lies in ``ball`` and contains ``u``.

    An operator whose in-ball syndrome is exactly ``{u}`` anticommutes with each
    such ``W(T)``, so it meets every one of their supports.
    """
    supports = []
    rmax = max(1, max(_chebyshev(u, v) for v in ball) + 1)
    for r in range(1, rmax + 1):
        s = 2 * r
        for mirrored in (False, True):
            for dx in range(-s, 1):
                for dy in range(-s, 1):
                    for dz in range(-s, 1):
                        c = (u[0] + dx, u[1] + dy, u[2] + dz)
                        if parity(c):
                            continue
                        spec = TetrahedronSpec(c, r, mirrored)
                        inner = spec.interior_odd_sites()
                        if u in inner and all(v in ball for v in inner):
                            supports.append(tetrahedron(ctx, spec).support)
    if not supports:
        return 1
    load: Dict[int, int] = {}
    for sup in supports:
        for q in _bit_positions(sup):
            load[q] = load.get(q, 0) + 1
    c = max(load.values())
    return max(1, -(-len(supports) // c))


def _bit_positions(v: int) -> List[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def monopole_weight_scan(
    radii: Iterable[int] = (0, 1, 2),
    cap: int = 5,
    center: Sequence[int] = (1, 0, 0),
    max_nodes: int = 2_000_000,
) -> List[MonopoleScanEntry]:
    """Minimum weight of a Pauli whose syndrome within radius ``R`` of ``center`` is one monopole.

    The search is exhaustive up to ``cap``; if nothing is found the entry
    carries the certified lower bound ``cap + 1`` and the membrane upper bound.
    """
    center = tuple(center)
    if not parity(center):
        raise PreconditionError("monopole centre must be an odd site")
    out = []
    for R in radii:
        w = Window.cube(R + 3, center=center, margin=1)
        ball = {v for v in w.generator_sites() if _chebyshev(v, center) <= R}
        rows = {}
        for v in ball:
            g = truncated_generator(w, v)
            rows[v] = {w.qubit_index(s): l for s, l in g.letters().items()}
        # a membrane with a corner at the centre keeps its other corners at distance R' + 1
        Rm = R + (R % 2)
        mem = membrane_weight(Rm)
        tl = _tetrahedron_lower_bound(w, center, ball)
        res = PauliSearch(w, rows, target={center}, max_nodes=max_nodes).run(cap)
        if res.word is not None:
            wt = res.word.weight
            out.append(MonopoleScanEntry(R, wt, wt, True, res.word, mem, tl, res.nodes))
        else:
            lower = max(tl, res.weight_exhausted + 1)
            out.append(MonopoleScanEntry(R, lower, mem, False, None, mem, tl, res.nodes))
    return out


def membrane_weight(R: int) -> int:
    return len(membrane_sites(R))
