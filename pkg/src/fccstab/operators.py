"""Constructors for string, membrane and logical operators.

Every constructor returns a :class:`~fccstab.pauli.PauliWord`; phases of composite
products are exact and left unnormalized.  Sites are given in unreduced integer
coordinates; periodic contexts reduce them on lookup.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ConfigError, ParityError, PreconditionError
from .lattice import (
    AXIS_INDEX,
    BODY_DIAGONALS,
    FACE_DIAGONALS,
    Context,
    LatticeSpec,
    Site,
    add,
    dot,
    parity,
    string_letter,
)
from .pauli import PauliWord, generator

AXIS_NAMES = ("x", "y", "z")
LETTER_OF_AXIS = {"x": "X", "y": "Y", "z": "Z"}


def _unit(a: int, s: int = 1) -> Site:
    v = [0, 0, 0]
    v[a] = s
    return tuple(v)  # type: ignore[return-value]


def _check_even(u: Sequence[int]) -> None:
    if parity(u):
        raise ParityError(f"string sites must be even, {tuple(u)} is odd")


# rigid strings


@dataclass(frozen=True)
class RigidStringSpec:
    start: Site
    h: Site
    m: int

    def __post_init__(self):
        if tuple(self.h) not in FACE_DIAGONALS and tuple(-c for c in self.h) not in FACE_DIAGONALS:
            raise PreconditionError(f"{self.h} is not a face-diagonal")
        if self.m < 0:
            raise PreconditionError("string length must be non-negative")
        _check_even(self.start)

    @property
    def letter(self) -> str:
        return string_letter(self.h)

    def sites(self) -> List[Site]:
        return [add(self.start, self.h, i) for i in range(self.m + 1)]

    @property
    def end(self) -> Site:
        return add(self.start, self.h, self.m)


def rigid_string(ctx: Context, spec: RigidStringSpec) -> PauliWord:
    """Product of one letter over the distinct sites the string visits."""
    seen = {}
    for u in spec.sites():
        seen.setdefault(ctx.reduce(u), u)
    return PauliWord.from_letters(ctx, ((u, spec.letter) for u in seen.values()))


def dipole_sites(u0: Sequence[int], h: Sequence[int], end: bool = False) -> List[Site]:
    """Two excitations at the start (or, with ``end``, the far end) of a type-``h`` string."""
    s = 1 if end else -1
    out = []
    for a in range(3):
        if h[a]:
            out.append(add(u0, _unit(a, s * h[a])))
    return out


def rigid_endpoint_sites(spec: RigidStringSpec) -> List[Site]:
    return dipole_sites(spec.start, spec.h) + dipole_sites(spec.end, spec.h, end=True)


def closed_rigid_length(spec: LatticeSpec, h: Sequence[int]) -> int:
    """Smallest ``m > 0`` with ``m h = 0`` on the torus."""
    m = 1
    for a, L in enumerate(spec.dims):
        if h[a]:
            m = m * L // math.gcd(m, L)
    return m


# flexible strings


def lam(t: Sequence[int], axis: str) -> Site:
    """Step vector for an ``axis``-link of a ``[t]``-bilayer."""
    a = AXIS_INDEX[axis]
    v = list(t)
    v[a] = 0
    return tuple(v)  # type: ignore[return-value]


@dataclass(frozen=True)
class FlexibleStringSpec:
    start: Site
    t: Site
    eps: int
    steps: str

    def __post_init__(self):
        if tuple(self.t) not in BODY_DIAGONALS:
            raise PreconditionError(f"{self.t} is not a body-diagonal")
        if self.eps not in (1, -1):
            raise PreconditionError("eps must be +1 or -1")
        if any(c not in "xyz" for c in self.steps):
            raise PreconditionError(f"steps must use letters x, y, z: {self.steps!r}")
        _check_even(self.start)

    @property
    def m(self) -> int:
        return len(self.steps)

    def path(self) -> List[Site]:
        u = tuple(self.start)
        out = [u]
        for j, a in enumerate(self.steps):
            u = add(u, lam(self.t, a), self.eps * (-1) ** j)
            out.append(u)
        return out

    @property
    def end(self) -> Site:
        return self.path()[-1]

    @property
    def end_sign(self) -> int:
        """Sign of the step that would continue the string past its end."""
        return self.eps * (-1) ** self.m

    def displacement(self) -> Site:
        return add(self.end, self.start, -1)


def flexible_string(ctx: Context, spec: FlexibleStringSpec) -> PauliWord:
    path = spec.path()
    items = []
    for j, a in enumerate(spec.steps):
        L = LETTER_OF_AXIS[a]
        items.append((path[j], L))
        items.append((path[j + 1], L))
    return PauliWord.from_letters(ctx, items)


def quadrupole_sites(u: Sequence[int], t: Sequence[int], eps: int) -> List[Site]:
    """Excitations left at a string end ``u`` whose outgoing step has sign ``eps``."""
    out = [add(u, _unit(a, t[a]), -eps) for a in range(3)]
    out.append(add(u, t, eps))
    return out


def lemma_endpoint_sites(spec: FlexibleStringSpec) -> List[Site]:
    """Eight-site endpoint list in its commonly quoted form.

    The far-end half uses ``+eps(-1)^m`` on the axis offsets and ``-eps(-1)^m`` on
    the body-diagonal offset.  Direct computation disagrees with this far-end half
    (see :func:`flexible_endpoint_sites`); it is kept for comparison.
    """
    t, e = spec.t, spec.eps
    near = quadrupole_sites(spec.start, t, e)
    s = e * (-1) ** spec.m
    far = [add(spec.end, _unit(a, t[a]), s) for a in range(3)] + [add(spec.end, t, -s)]
    return near + far


def flexible_endpoint_sites(spec: FlexibleStringSpec) -> List[Site]:
    """Start quadrupole and the mirrored end quadrupole, before cancellation."""
    return quadrupole_sites(spec.start, spec.t, spec.eps) + quadrupole_sites(
        spec.end, spec.t, spec.end_sign
    )


def flexible_syndrome_sites(ctx: Context, spec: FlexibleStringSpec) -> frozenset:
    """Reduced symmetric difference of the two endpoint quadrupoles."""
    out = set()
    for v in flexible_endpoint_sites(spec):
        out ^= {ctx.reduce(v)}
    return frozenset(out)


def link_axis(t: Sequence[int], u: Sequence[int], v: Sequence[int]) -> Tuple[str, int]:
    """Axis and sign with ``v = u + sign * lam(t, axis)``."""
    d = add(v, u, -1)
    for a in AXIS_NAMES:
        l = lam(t, a)
        if d == l:
            return a, 1
        if d == tuple(-c for c in l):
            return a, -1
    raise PreconditionError(f"{tuple(u)} and {tuple(v)} are not linked in a {tuple(t)}-bilayer")


def link_operator(ctx: Context, t: Sequence[int], u: Sequence[int], v: Sequence[int]) -> PauliWord:
    """``K_e = sigma^a_u sigma^a_v`` for the ``a``-link ``e = (u, v)``."""
    a, _ = link_axis(t, u, v)
    L = LETTER_OF_AXIS[a]
    return PauliWord.from_letters(ctx, [(u, L), (v, L)])


def hexagon_links(t: Sequence[int], c: Sequence[int]) -> List[Tuple[Site, Site]]:
    """Six links bounding the hexagon centred at odd site ``c``."""
    if not parity(c):
        raise ParityError(f"hexagon centres are odd sites, {tuple(c)} is even")
    out = []
    for a in range(3):
        for b in range(a + 1, 3):
            for s in (1, -1):
                sb = -s * t[a] * t[b]
                out.append((add(c, _unit(a, s)), add(c, _unit(b, sb))))
    return out


def hexagon_loop(t: Sequence[int], c: Sequence[int]) -> FlexibleStringSpec:
    """Closed string around the hexagon centred at ``c``, starting on its lower layer."""
    return _trace_cycle(t, hexagon_links(t, c), start=add(c, _unit(0, -t[0])))


def plaquette(ctx: Context, t: Sequence[int], c: Sequence[int]) -> PauliWord:
    out = PauliWord(ctx)
    for u, v in hexagon_links(t, c):
        out = out * link_operator(ctx, t, u, v)
    return out


def star_links(t: Sequence[int], w: Sequence[int], side: int) -> List[Tuple[Site, Site]]:
    """Three links at ``w``; ``side`` is the sign of the steps leaving ``w``."""
    return [(tuple(w), add(w, lam(t, a), side)) for a in AXIS_NAMES]


def star(ctx: Context, t: Sequence[int], w: Sequence[int], side: int) -> PauliWord:
    """``A_w = i prod_{e in star(w)} K_e``; trivial on ``w`` itself."""
    out = PauliWord(ctx, 1)
    for u, v in star_links(t, w, side):
        out = out * link_operator(ctx, t, u, v)
    return out


def _trace_cycle(t, links, start=None) -> FlexibleStringSpec:
    adj: Dict[Site, List[Site]] = {}
    for u, v in links:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if any(len(n) != 2 for n in adj.values()):
        raise PreconditionError("link set is not a single simple cycle")
    if start is None:
        # start on a site whose outgoing steps are positive
        start = min(u for u in adj if link_axis(t, u, adj[u][0])[1] == 1)
    prev, cur = None, start
    steps = []
    eps = None
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        a, s = link_axis(t, cur, nxt)
        if eps is None:
            eps = s
        steps.append(a)
        prev, cur = cur, nxt
        if cur == start:
            break
    if len(steps) != len(links):
        raise PreconditionError("link set is not a single simple cycle")
    spec = FlexibleStringSpec(start, tuple(t), eps, "".join(steps))
    return spec


def region_boundary_loop(t: Sequence[int], centres: Iterable[Sequence[int]]) -> FlexibleStringSpec:
    """Closed string along the boundary of a set of hexagons in one plane."""
    count: Dict[frozenset, Tuple[Site, Site]] = {}
    for c in centres:
        for u, v in hexagon_links(t, c):
            key = frozenset((u, v))
            if key in count:
                del count[key]
            else:
                count[key] = (u, v)
    return _trace_cycle(t, list(count.values()))


# tetrahedra


@dataclass(frozen=True)
class TetrahedronSpec:
    corner: Site
    r: int
    mirrored: bool = False

    def __post_init__(self):
        _check_even(self.corner)
        if self.r < 1:
            raise PreconditionError("tetrahedron size r must be at least 1")

    def vertices(self) -> List[Site]:
        s = 2 * self.r
        if self.mirrored:
            rel = [(s, 0, 0), (0, s, 0), (0, 0, s), (s, s, s)]
        else:
            rel = [(0, 0, 0), (s, s, 0), (0, s, s), (s, 0, s)]
        return [add(self.corner, v) for v in rel]

    def edges(self) -> List[RigidStringSpec]:
        vs = self.vertices()
        out = []
        for i in range(4):
            for j in range(i + 1, 4):
                d = add(vs[j], vs[i], -1)
                h = tuple(c // (2 * self.r) for c in d)
                out.append(RigidStringSpec(vs[i], h, 2 * self.r))
        return out

    def contains(self, u: Sequence[int]) -> bool:
        """Closed-tetrahedron membership by the four face half-spaces."""
        vs = self.vertices()
        for drop in range(4):
            face = [vs[i] for i in range(4) if i != drop]
            a, b, c = face
            ab, ac = add(b, a, -1), add(c, a, -1)
            nrm = (
                ab[1] * ac[2] - ab[2] * ac[1],
                ab[2] * ac[0] - ab[0] * ac[2],
                ab[0] * ac[1] - ab[1] * ac[0],
            )
            ref = dot(nrm, add(vs[drop], a, -1))
            val = dot(nrm, add(u, a, -1))
            if val * ref < 0:
                return False
        return True

    def interior_odd_sites(self) -> List[Site]:
        c = self.corner
        s = 2 * self.r
        out = []
        for i in range(c[0], c[0] + s + 1):
            for j in range(c[1], c[1] + s + 1):
                for k in range(c[2], c[2] + s + 1):
                    u = (i, j, k)
                    if parity(u) and self.contains(u):
                        out.append(u)
        return out


def tetrahedron(ctx: Context, spec: TetrahedronSpec) -> PauliWord:
    out = PauliWord(ctx)
    for e in spec.edges():
        out = out * PauliWord.from_letters(ctx, ((u, e.letter) for u in e.sites()))
    return out


def tetrahedron_interior_product(ctx: Context, spec: TetrahedronSpec) -> PauliWord:
    out = PauliWord(ctx)
    for v in spec.interior_odd_sites():
        out = out * generator(ctx, v)
    return out


# membranes


def permute_letters(items: Dict[Site, str], perm: Sequence[int]) -> Dict[Site, str]:
    """Relabel axes: old axis ``a`` becomes axis ``perm[a]``, letters follow their axes.

    Generators are invariant under such relabelings, so this maps operators to
    operators with the same commutation pattern.
    """
    letter_map = {"I": "I"}
    for a, name in enumerate(AXIS_NAMES):
        letter_map[LETTER_OF_AXIS[name]] = LETTER_OF_AXIS[AXIS_NAMES[perm[a]]]
    out = {}
    for u, l in items.items():
        v = [0, 0, 0]
        for a in range(3):
            v[perm[a]] = u[a]
        out[tuple(v)] = letter_map[l]
    return out


_TO_NORMAL = {"z": (0, 1, 2), "x": (1, 2, 0), "y": (2, 0, 1)}


def membrane_sites(R: int, center: Sequence[int] = (0, 0, 0), normal: str = "z") -> List[Site]:
    base = [
        (i, j, 0)
        for i in range(-R, R + 1)
        for j in range(-R, R + 1)
        if abs(i) + abs(j) <= R and (i + j) % 2 == 0
    ]
    moved = permute_letters({u: "Z" for u in base}, _TO_NORMAL[normal])
    return [add(center, u) for u in sorted(moved)]


def membrane(ctx: Context, R: int, center: Sequence[int] = (0, 0, 0), normal: str = "z") -> PauliWord:
    """Diamond of one letter in a coordinate plane; creates four corner monopoles."""
    if R < 0 or R % 2:
        raise PreconditionError(f"membrane radius must be even and non-negative, got {R}")
    if normal not in _TO_NORMAL:
        raise PreconditionError(f"normal must be x, y or z, got {normal!r}")
    _check_even(center)
    letter = LETTER_OF_AXIS[normal]
    return PauliWord.from_letters(ctx, ((u, letter) for u in membrane_sites(R, center, normal)))


def membrane_monopoles(R: int, center: Sequence[int] = (0, 0, 0), normal: str = "z") -> List[Site]:
    base = {(R + 1, 0, 0): "Z", (-R - 1, 0, 0): "Z", (0, R + 1, 0): "Z", (0, -R - 1, 0): "Z"}
    moved = permute_letters(base, _TO_NORMAL[normal])
    return sorted(add(center, u) for u in moved)


# half-filled membranes and logical operators

PARITY_LABELS = ("000", "011", "101", "110")


@dataclass(frozen=True)
class HalfMembraneSpec:
    axis: str
    abc: str
    offset: int = 0

    def __post_init__(self):
        if self.axis not in AXIS_NAMES:
            raise PreconditionError(f"axis must be x, y or z, got {self.axis!r}")
        if len(self.abc) != 3 or any(c not in "01" for c in self.abc):
            raise PreconditionError(f"parity label must be three bits, got {self.abc!r}")
        if sum(int(c) for c in self.abc) % 2:
            raise PreconditionError(f"parity label {self.abc} has odd weight")


def half_membrane_sites(spec: LatticeSpec, hm: HalfMembraneSpec) -> List[Site]:
    a = AXIS_INDEX[hm.axis]
    bits = [int(c) for c in hm.abc]
    ranges = []
    for ax in range(3):
        if ax == a:
            ranges.append([bits[ax] + 2 * hm.offset])
        else:
            ranges.append(range(bits[ax], spec.dims[ax], 2))
    return [(i, j, k) for i in ranges[0] for j in ranges[1] for k in ranges[2]]


def half_membrane(spec: LatticeSpec, hm: HalfMembraneSpec) -> PauliWord:
    letter = LETTER_OF_AXIS[hm.axis]
    return PauliWord.from_letters(spec, ((u, letter) for u in half_membrane_sites(spec, hm)))


def sigma_bar(spec: LatticeSpec, axis: str, abc: str, offset: int = 0) -> PauliWord:
    return half_membrane(spec, HalfMembraneSpec(axis, abc, offset))


def check_logical_preconditions(spec: LatticeSpec) -> None:
    ps = spec.p
    if any(p % 2 == 0 for p in ps):
        raise ConfigError(f"half-dimensions must all be odd, got {ps}")
    for i in range(3):
        for j in range(i + 1, 3):
            if math.gcd(ps[i], ps[j]) != 1:
                raise ConfigError(f"half-dimensions must be pairwise coprime, got {ps}")


def _prod(spec: LatticeSpec, words: Iterable[PauliWord]) -> PauliWord:
    out = PauliWord(spec)
    for w in words:
        out = out * w
    return out


def logical_set(spec: LatticeSpec) -> Dict[str, PauliWord]:
    """Four logical qubit pairs built from half-filled membranes."""
    check_logical_preconditions(spec)

    def sb(axis, *labels):
        return _prod(spec, (sigma_bar(spec, axis, l) for l in labels))

    return {
        "X1": sb("z", "000", "011", "110"),
        "Z1": sb("x", "000", "011", "101", "110"),
        "X2": sb("x", "101"),
        "Z2": sb("z", "000", "011", "101", "110"),
        "X3": sb("x", "000", "011"),
        "Z3": sb("z", "000", "110"),
        "X4": sb("x", "000", "110"),
        "Z4": sb("z", "000", "011"),
    }


@dataclass
class GaugeGroups:
    """Generators beyond the stabilizer group for the three gauge groups."""

    flexible: List[PauliWord]  # closed flexible strings: <S, Z1, Z2>
    rigid: List[PauliWord]  # closed rigid strings: six membrane pairs
    subsystem: List[PauliWord]  # <S, Z1, Z2, X1, X2>


def gauge_groups(spec: LatticeSpec) -> GaugeGroups:
    lg = logical_set(spec)

    def pair(axis, a, b):
        return sigma_bar(spec, axis, a) * sigma_bar(spec, axis, b)

    rigid = [
        pair("z", "000", "110"),
        pair("z", "101", "011"),
        pair("y", "000", "101"),
        pair("y", "011", "110"),
        pair("x", "000", "011"),
        pair("x", "110", "101"),
    ]
    return GaugeGroups(
        flexible=[lg["Z1"], lg["Z2"]],
        rigid=rigid,
        subsystem=[lg["Z1"], lg["Z2"], lg["X1"], lg["X2"]],
    )


# dislocations and string-nets

DISLOCATION_SITES: Tuple[Site, ...] = ((-1, 2, 0), (0, 1, 0), (1, 0, 0), (2, -1, 0))


def dislocation_strings(m1: int, m2: int) -> Tuple[RigidStringSpec, RigidStringSpec]:
    """Two shifted ``[110]`` strings meeting at a dislocation near the origin.

    The first ends at ``(-1,1,0)``, the second starts at ``(2,0,0)``.
    """
    h = (1, 1, 0)
    g1 = RigidStringSpec((-1 - m1, 1 - m1, 0), h, m1)
    g2 = RigidStringSpec((2, 0, 0), h, m2)
    return g1, g2


def dislocation_pair(ctx: Context, m1: int = 4, m2: int = 4) -> PauliWord:
    g1, g2 = dislocation_strings(m1, m2)
    return rigid_string(ctx, g1) * rigid_string(ctx, g2)


def _xor_sites(groups: Iterable[Iterable[Site]], ctx: Optional[Context] = None) -> frozenset:
    out: set = set()
    for g in groups:
        for v in g:
            out ^= {ctx.reduce(v) if ctx is not None else tuple(v)}
    return frozenset(out)


def quadrupole_cover(
    target: Iterable[Site], types: Sequence[Site], radius: int = 2
) -> List[Tuple[Tuple[Site, Site, int], ...]]:
    """Pairs of same-type quadrupoles (one pair per type) whose sum is ``target``.

    Returns every solution found with anchors in a cube of the given radius, each
    as a tuple of ``(t, anchor, eps)`` triples grouped by type.  Meet-in-the-middle
    over the two types; exactly two types are supported.
    """
    if len(types) != 2:
        raise PreconditionError("quadrupole_cover pairs up exactly two types")
    tgt = frozenset(tuple(v) for v in target)
    anchors = [
        (i, j, k)
        for i in range(-radius, radius + 1)
        for j in range(-radius, radius + 1)
        for k in range(-radius, radius + 1)
        if (i + j + k) % 2 == 0
    ]

    def pairs(t):
        qs = [((t, u, e), frozenset(quadrupole_sites(u, t, e))) for u in anchors for e in (1, -1)]
        out: Dict[frozenset, list] = {}
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                key = qs[i][1] ^ qs[j][1]
                out.setdefault(key, []).append((qs[i][0], qs[j][0]))
        return out

    pa = pairs(tuple(types[0]))
    pb = pairs(tuple(types[1]))
    sols = []
    for ka, la in pa.items():
        lb = pb.get(tgt ^ ka)
        if lb:
            for x in la:
                for y in lb:
                    sols.append(x + y)
    return sols


def flexible_path_between(
    spec: LatticeSpec, t: Sequence[int], a: Site, ea: int, b: Site, eb: int
) -> Optional[FlexibleStringSpec]:
    """Shortest flexible string from state ``(a, ea)`` to ``(b, eb)`` on the torus.

    A state is a site with the sign of the next step; each step flips the sign.
    """
    start = (spec.reduce(a), ea)
    goal = (spec.reduce(b), eb)
    prev = {start: None}
    dq = deque([start])
    while dq:
        cur = dq.popleft()
        if cur == goal:
            break
        u, s = cur
        for ax in AXIS_NAMES:
            nxt = (spec.reduce(add(u, lam(t, ax), s)), -s)
            if nxt not in prev:
                prev[nxt] = (cur, ax)
                dq.append(nxt)
    if goal not in prev:
        return None
    steps = []
    cur = goal
    while prev[cur] is not None:
        cur, ax = prev[cur]
        steps.append(ax)
    return FlexibleStringSpec(tuple(a), tuple(t), ea, "".join(reversed(steps)))


@dataclass
class StringNet:
    rigid: RigidStringSpec
    flexible: List[FlexibleStringSpec]
    word: PauliWord


def string_net(spec: LatticeSpec) -> StringNet:
    """Closed string-net built from one dislocated ``[110]`` line and two flexible strings.

    Requires ``p_y = p_x + 2`` (so ``L_y = L_x + 4``).  The rigid line starts at
    ``(0,2,0)`` and ends one step short of closing, at a site congruent to
    ``(1,-1,0)``; its four excitations form the dislocation pattern, which splits
    into two quadrupole pairs annihilated by flexible strings.
    """
    if spec.py != spec.px + 2:
        raise ConfigError(f"string-net construction needs p_y = p_x + 2, got {spec.p}")
    lx, ly, _ = spec.dims
    m = next(
        k for k in range(1, lx * ly + 1) if k % lx == 1 % lx and (2 + k) % ly == (-1) % ly
    )
    rig = RigidStringSpec((0, 2, 0), (1, 1, 0), m)
    word = rigid_string(spec, rig)
    leftover = _xor_sites([rigid_endpoint_sites(rig)], spec)
    target = [u for u in DISLOCATION_SITES if spec.reduce(u) in leftover]
    assert len(target) == 4 and len(leftover) == 4
    types = [(1, -1, -1), (-1, 1, -1)]
    best = None
    for sol in quadrupole_cover(DISLOCATION_SITES, types):
        strings = []
        for (t, a, ea), (_, b, eb) in (sol[0:2], sol[2:4]):
            fs = flexible_path_between(spec, t, a, ea, b, eb)
            if fs is None:
                break
            strings.append(fs)
        else:
            cost = sum(s.m for s in strings)
            if best is None or cost < best[0]:
                best = (cost, strings)
    if best is None:
        raise ConfigError("no flexible strings close the dislocation on this lattice")
    for fs in best[1]:
        word = word * flexible_string(spec, fs)
    return StringNet(rig, best[1], word)


# closed flexible loops on the torus


def winding_numbers(spec: LatticeSpec, fs: FlexibleStringSpec) -> Tuple[int, int, int]:
    d = fs.displacement()
    w = []
    for a, L in enumerate(spec.dims):
        if d[a] % L:
            raise PreconditionError(f"string does not close on {spec}")
        w.append(d[a] // L)
    return tuple(w)  # type: ignore[return-value]


def close_flexible_string(spec: LatticeSpec, fs: FlexibleStringSpec) -> FlexibleStringSpec:
    """Append the shortest continuation that returns ``fs`` to its start state."""
    back = flexible_path_between(spec, fs.t, fs.end, fs.end_sign, fs.start, fs.eps)
    assert back is not None
    return FlexibleStringSpec(fs.start, fs.t, fs.eps, fs.steps + back.steps)


def bilayer_periods(spec: LatticeSpec, t: Sequence[int], count: int = 6, span: int = 6) -> List[Site]:
    """Short translations ``(w_x L_x, w_y L_y, w_z L_z)`` that keep a ``[t]``-bilayer in place.

    A closed flexible loop on the torus lifts to a path between a site and one of
    these translates; the integer vector ``w`` is its winding.
    """
    found = []
    rng = range(-span, span + 1)
    for w in ((a, b, c) for a in rng for b in rng for c in rng):
        if w == (0, 0, 0) or sum(t[i] * w[i] * spec.p[i] for i in range(3)):
            continue
        d = tuple(w[i] * spec.dims[i] for i in range(3))
        found.append((sum(c * c for c in d), d))
    found.sort()
    return [d for _, d in found[:count]]


def cover_path(t: Sequence[int], a: Site, ea: int, b: Site, eb: int, limit: int = 200000) -> Optional[str]:
    """Step letters of a shortest flexible string from ``(a, ea)`` to ``(b, eb)`` in ``Z^3``.

    A* search; every step has length sqrt(2), so Euclidean distance over sqrt(2)
    never overestimates the remaining step count.
    """
    steps_of = [(ax, lam(t, ax)) for ax in AXIS_NAMES]
    start, goal = (tuple(a), ea), (tuple(b), eb)

    def h(u):
        return math.sqrt(sum((u[i] - b[i]) ** 2 for i in range(3)) / 2.0)

    prev = {start: None}
    cost = {start: 0}
    heap = [(h(start[0]), 0, start)]
    while heap:
        _, g, cur = heapq.heappop(heap)
        if cur == goal:
            break
        if g > cost[cur]:
            continue
        if len(prev) > limit:
            return None
        u, s = cur
        for ax, l in steps_of:
            v = (u[0] + s * l[0], u[1] + s * l[1], u[2] + s * l[2])
            nxt = (v, -s)
            if nxt not in cost or cost[nxt] > g + 1:
                cost[nxt] = g + 1
                prev[nxt] = (cur, ax)
                heapq.heappush(heap, (g + 1 + h(v), g + 1, nxt))
    if goal not in prev:
        return None
    steps = []
    cur = goal
    while prev[cur] is not None:
        cur, ax = prev[cur]
        steps.append(ax)
    return "".join(reversed(steps))


def random_closed_loop(
    spec: LatticeSpec,
    t: Sequence[int],
    rng,
    max_walk: int = 40,
    periods: Optional[Sequence[Site]] = None,
) -> FlexibleStringSpec:
    """Random walk in the ``[t]``-bilayer closed up along a random period (possibly zero)."""
    periods = list(periods) if periods is not None else bilayer_periods(spec, t)
    choices = [(0, 0, 0)] + periods
    d = choices[rng.randrange(len(choices))]
    eps = rng.choice((1, -1))
    start = (0, 0, 0)
    walk = "".join(rng.choice(AXIS_NAMES) for _ in range(rng.randint(0, max_walk)))
    fs = FlexibleStringSpec(start, tuple(t), eps, walk)
    back = cover_path(t, fs.end, fs.end_sign, add(start, d), eps)
    assert back is not None
    return FlexibleStringSpec(start, tuple(t), eps, walk + back)
