"""Coordinates, parities and plane bookkeeping for the cubic lattice.

Two kinds of geometry context are supported:

* :class:`LatticeSpec` -- the periodic torus ``Z_{2px} x Z_{2py} x Z_{2pz}``.
* :class:`Window` -- a finite box of ``Z^3`` standing in for the infinite lattice.

Qubits live on even sites (``i+j+k`` even), six-body generators are centred on odd
sites.  Both contexts expose the same small protocol (``qubit_index``,
``qubit_site``, ``num_qubits``, ``neighbors``, ``odd_sites``, ...), which is all the
operator and charge code relies on.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence, Tuple, Union

from .errors import BoundsError, LatticeError, ParityError

Site = Tuple[int, int, int]

XHAT: Site = (1, 0, 0)
YHAT: Site = (0, 1, 0)
ZHAT: Site = (0, 0, 1)
AXES = {"x": XHAT, "y": YHAT, "z": ZHAT}
AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

FACE_DIAGONALS: Tuple[Site, ...] = (
    (1, 1, 0),
    (1, -1, 0),
    (1, 0, 1),
    (1, 0, -1),
    (0, 1, 1),
    (0, 1, -1),
)
BODY_DIAGONALS: Tuple[Site, ...] = (
    (1, 1, 1),
    (1, -1, -1),
    (-1, 1, -1),
    (-1, -1, 1),
)

# neighbour offsets in generator order: X at -x,+x; Y at -y,+y; Z at -z,+z
NEIGHBOR_OFFSETS: Tuple[Tuple[Site, str], ...] = (
    ((-1, 0, 0), "X"),
    ((1, 0, 0), "X"),
    ((0, -1, 0), "Y"),
    ((0, 1, 0), "Y"),
    ((0, 0, -1), "Z"),
    ((0, 0, 1), "Z"),
)


def add(u: Sequence[int], v: Sequence[int], scale: int = 1) -> Site:
    return (u[0] + scale * v[0], u[1] + scale * v[1], u[2] + scale * v[2])


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def parity(u: Sequence[int]) -> int:
    return (u[0] + u[1] + u[2]) & 1


def diag_label(v: Sequence[int]) -> str:
    """Bracket notation of a direction: ``(1,-1,0)`` -> ``"[1-10]"``."""
    return "[" + "".join(str(c) for c in v) + "]"


def parse_direction(text: Union[str, Sequence[int]]) -> Site:
    """Accept ``"1,-1,0"``, ``"[1-10]"`` or a 3-sequence."""
    if not isinstance(text, str):
        vec = tuple(int(c) for c in text)
    else:
        s = text.strip().strip("[]")
        if "," in s:
            vec = tuple(int(c) for c in s.split(","))
        else:
            vec = tuple(int(c) for c in re.findall(r"-?\d", s))
    if len(vec) != 3:
        raise LatticeError(f"direction needs three components, got {text!r}")
    return vec  # type: ignore[return-value]


def string_letter(h: Sequence[int]) -> str:
    """Pauli letter carried by a rigid string of face-diagonal type ``h``."""
    if h[2] == 0:
        return "Z"
    if h[1] == 0:
        return "Y"
    if h[0] == 0:
        return "X"
    raise LatticeError(f"{tuple(h)} is not a face-diagonal")


def orthogonal_body_diagonals(h: Sequence[int]) -> Tuple[Site, Site]:
    ts = tuple(t for t in BODY_DIAGONALS if dot(t, h) == 0)
    assert len(ts) == 2
    return ts  # type: ignore[return-value]


def face_diagonal_orthogonal_to(t1: Sequence[int], t2: Sequence[int]) -> Site:
    for h in FACE_DIAGONALS:
        if dot(h, t1) == 0 and dot(h, t2) == 0:
            return h
    raise LatticeError(f"no face-diagonal orthogonal to {tuple(t1)} and {tuple(t2)}")


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic lattice with even side lengths ``L = 2p`` along each axis."""

    px: int
    py: int
    pz: int

    def __post_init__(self):
        for p in (self.px, self.py, self.pz):
            if not isinstance(p, int) or p < 1:
                raise LatticeError(f"half-dimensions must be positive integers, got {self.p}")

    periodic = True

    @property
    def p(self) -> Tuple[int, int, int]:
        return (self.px, self.py, self.pz)

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (2 * self.px, 2 * self.py, 2 * self.pz)

    @property
    def n(self) -> int:
        return 4 * self.px * self.py * self.pz

    num_qubits = n

    @property
    def num_generators(self) -> int:
        return self.n

    @property
    def g(self) -> int:
        return math.gcd(self.px, math.gcd(self.py, self.pz))

    @property
    def spec_string(self) -> str:
        return f"{self.px},{self.py},{self.pz}"

    def reduce(self, u: Sequence[int]) -> Site:
        lx, ly, lz = self.dims
        return (u[0] % lx, u[1] % ly, u[2] % lz)

    def contains(self, u: Sequence[int]) -> bool:
        return True

    def _linear(self, u: Site) -> int:
        _, ly, lz = self.dims
        return (u[0] * ly + u[1]) * lz + u[2]

    def qubit_index(self, u: Sequence[int]) -> int:
        r = self.reduce(u)
        if parity(r):
            raise ParityError(f"qubits live on even sites, {tuple(u)} is odd")
        return self._linear(r) >> 1

    def generator_index(self, u: Sequence[int]) -> int:
        r = self.reduce(u)
        if not parity(r):
            raise ParityError(f"generators live on odd sites, {tuple(u)} is even")
        return self._linear(r) >> 1

    def _site_from(self, idx: int, par: int) -> Site:
        _, ly, lz = self.dims
        lin = 2 * idx
        k = lin % lz
        ij = lin // lz
        i, j = divmod(ij, ly)
        if (i + j + k) & 1 != par:
            k += 1
        return (i, j, k)

    def qubit_site(self, q: int) -> Site:
        if not 0 <= q < self.n:
            raise BoundsError(f"qubit index {q} out of range")
        return self._site_from(q, 0)

    def generator_site(self, idx: int) -> Site:
        if not 0 <= idx < self.n:
            raise BoundsError(f"generator index {idx} out of range")
        return self._site_from(idx, 1)

    def even_sites(self) -> Iterator[Site]:
        return (self.qubit_site(q) for q in range(self.n))

    def odd_sites(self) -> Iterator[Site]:
        return (self.generator_site(v) for v in range(self.n))

    def neighbors(self, u: Sequence[int]) -> Tuple[Site, ...]:
        """The six sites ``u -+ x, u -+ y, u -+ z`` (reduced, duplicates kept)."""
        return tuple(self.reduce(add(u, off)) for off, _ in NEIGHBOR_OFFSETS)

    def plane_label(self, t: Sequence[int], u: Sequence[int]) -> int:
        """``t . u`` modulo ``2g``; the only well-defined part on the torus."""
        return dot(t, self.reduce(u)) % (2 * self.g)

    def plane_labels(self, t: Sequence[int]) -> range:
        return range(2 * self.g)

    def plane_sites(self, t: Sequence[int], alpha: int) -> list:
        a = alpha % (2 * self.g)
        sites = self.odd_sites() if a & 1 else self.even_sites()
        return [u for u in sites if self.plane_label(t, u) == a]

    def __str__(self) -> str:
        return self.spec_string


@dataclass(frozen=True)
class Window:
    """Finite box ``[lo, hi]`` (inclusive) of the infinite lattice."""

    lo: Tuple[int, int, int]
    hi: Tuple[int, int, int]
    margin: int = 3

    periodic = False

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(int(c) for c in self.lo))
        object.__setattr__(self, "hi", tuple(int(c) for c in self.hi))
        if len(self.lo) != 3 or len(self.hi) != 3:
            raise LatticeError("window bounds need three coordinates")
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise LatticeError(f"empty window {self.lo}..{self.hi}")
        if self.margin < 0 or any(2 * self.margin > e for e in self.extent):
            raise LatticeError(f"margin {self.margin} exceeds half the window extent {self.extent}")

    @classmethod
    def cube(cls, radius: int, center: Sequence[int] = (0, 0, 0), margin: int = 3) -> "Window":
        return cls(
            tuple(c - radius for c in center), tuple(c + radius for c in center), margin
        )

    @property
    def extent(self) -> Tuple[int, int, int]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))  # type: ignore[return-value]

    @property
    def spec_string(self) -> str:
        body = ",".join(f"{l}..{h}" for l, h in zip(self.lo, self.hi))
        s = f"window:{body}"
        if self.margin != 3:
            s += f",margin={self.margin}"
        return s

    def reduce(self, u: Sequence[int]) -> Site:
        return (u[0], u[1], u[2])

    def contains(self, u: Sequence[int]) -> bool:
        return all(l <= c <= h for c, l, h in zip(u, self.lo, self.hi))

    def depth(self, u: Sequence[int]) -> int:
        """Layer count from the outside: boundary sites have depth 1, outside sites <= 0."""
        return min(min(c - l, h - c) for c, l, h in zip(u, self.lo, self.hi)) + 1

    def is_bulk(self, u: Sequence[int]) -> bool:
        return self.depth(u) >= self.margin

    def _sites(self, par: int) -> list:
        ranges = [range(l, h + 1) for l, h in zip(self.lo, self.hi)]
        return [u for u in itertools.product(*ranges) if parity(u) == par]

    @cached_property
    def _even(self) -> list:
        return self._sites(0)

    @cached_property
    def _odd(self) -> list:
        return self._sites(1)

    @cached_property
    def _even_index(self) -> dict:
        return {u: q for q, u in enumerate(self._even)}

    @cached_property
    def _odd_index(self) -> dict:
        return {u: q for q, u in enumerate(self._odd)}

    @property
    def n(self) -> int:
        return len(self._even)

    num_qubits = n

    @property
    def num_generators(self) -> int:
        return len(self._odd)

    def qubit_index(self, u: Sequence[int]) -> int:
        u = tuple(u)
        if parity(u):
            raise ParityError(f"qubits live on even sites, {u} is odd")
        try:
            return self._even_index[u]
        except KeyError:
            raise BoundsError(f"site {u} outside {self.spec_string}") from None

    def generator_index(self, u: Sequence[int]) -> int:
        u = tuple(u)
        if not parity(u):
            raise ParityError(f"generators live on odd sites, {u} is even")
        try:
            return self._odd_index[u]
        except KeyError:
            raise BoundsError(f"site {u} outside {self.spec_string}") from None

    def qubit_site(self, q: int) -> Site:
        return self._even[q]

    def generator_site(self, idx: int) -> Site:
        return self._odd[idx]

    def even_sites(self) -> Iterator[Site]:
        return iter(self._even)

    def odd_sites(self) -> Iterator[Site]:
        return iter(self._odd)

    def halo_odd_sites(self) -> list:
        """Odd sites outside the box that still touch a qubit inside it."""
        out = set()
        for u in self._even:
            for off, _ in NEIGHBOR_OFFSETS:
                v = add(u, off)
                if not self.contains(v):
                    out.add(v)
        return sorted(out)

    def touching_odd_sites(self) -> list:
        """Every odd site whose generator acts on at least one qubit of the box."""
        return list(self._odd) + self.halo_odd_sites()

    def neighbors(self, u: Sequence[int]) -> Tuple[Optional[Site], ...]:
        """The six neighbours in generator order; sites outside the box are ``None``."""
        out = []
        for off, _ in NEIGHBOR_OFFSETS:
            v = add(u, off)
            out.append(v if self.contains(v) else None)
        return tuple(out)

    def has_generator(self, u: Sequence[int]) -> bool:
        return parity(u) == 1 and all(v is not None for v in self.neighbors(u))

    def generator_sites(self) -> list:
        return [u for u in self._odd if self.has_generator(u)]

    def plane_label(self, t: Sequence[int], u: Sequence[int]) -> int:
        return dot(t, u)

    def plane_labels(self, t: Sequence[int]) -> range:
        corners = itertools.product(*zip(self.lo, self.hi))
        vals = [dot(t, c) for c in corners]
        return range(min(vals), max(vals) + 1)

    def plane_sites(self, t: Sequence[int], alpha: int) -> list:
        sites = self._odd if alpha & 1 else self._even
        return [u for u in sites if dot(t, u) == alpha]

    def __str__(self) -> str:
        return self.spec_string


Context = Union[LatticeSpec, Window]

_WINDOW_RE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_context(text: str) -> Context:
    """Parse ``"px,py,pz"`` or ``"window:i0..i1,j0..j1,k0..k1[,margin=m]"``."""
    s = text.strip()
    if s.startswith("window:"):
        parts = [p.strip() for p in s[len("window:"):].split(",")]
        margin = 3
        if parts and parts[-1].startswith("margin="):
            margin = int(parts.pop()[len("margin="):])
        if len(parts) != 3:
            raise LatticeError(f"window needs three ranges: {text!r}")
        lo, hi = [], []
        for p in parts:
            m = _WINDOW_RE.match(p)
            if not m:
                raise LatticeError(f"bad range {p!r} in {text!r}")
            lo.append(int(m.group(1)))
            hi.append(int(m.group(2)))
        return Window(tuple(lo), tuple(hi), margin)
    try:
        px, py, pz = (int(c) for c in s.split(","))
    except ValueError:
        raise LatticeError(f"lattice spec must be 'px,py,pz' or 'window:...', got {text!r}") from None
    return LatticeSpec(px, py, pz)
