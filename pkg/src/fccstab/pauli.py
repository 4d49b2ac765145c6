"""Phase-tracked Pauli words on the even sublattice.

A word is stored as ``i^phase * prod_q X_q^{x_q} Z_q^{z_q}`` with the X and Z parts
held as Python-int bitsets over qubit indices.  ``Y = i X Z``, so a single ``Y``
is ``(phase=1, x=1, z=1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Tuple

from .errors import ContextMismatchError, ParityError, UndefinedGeneratorError
from .lattice import NEIGHBOR_OFFSETS, Context, Site, add, parity, parse_context

LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
BITS_LETTER = {v: k for k, v in LETTER_BITS.items()}


def popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliWord:
    ctx: Context
    phase: int = 0
    x: int = 0
    z: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase & 3)

    # construction

    @classmethod
    def identity(cls, ctx: Context) -> "PauliWord":
        return cls(ctx)

    @classmethod
    def single(cls, ctx: Context, site: Sequence[int], letter: str) -> "PauliWord":
        q = ctx.qubit_index(site)
        bx, bz = LETTER_BITS[letter]
        return cls(ctx, bx & bz, bx << q, bz << q)

    @classmethod
    def from_letters(cls, ctx: Context, items: Iterable[Tuple[Sequence[int], str]]) -> "PauliWord":
        """Ordered product of single-site letters; repeated sites multiply exactly."""
        out = cls(ctx)
        for site, letter in items:
            out = out * cls.single(ctx, site, letter)
        return out

    @classmethod
    def from_symplectic(cls, ctx: Context, vec: int, hermitian: bool = True) -> "PauliWord":
        """Inverse of :attr:`symplectic`; chooses the Hermitian phase by default."""
        n = ctx.num_qubits
        x = vec & ((1 << n) - 1)
        z = vec >> n
        phase = popcount(x & z) if hermitian else 0
        return cls(ctx, phase, x, z)

    # algebra

    def _check(self, other: "PauliWord") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        self._check(other)
        # Z^a X^b = (-1)^{ab} X^b Z^a when moving other's X left past self's Z
        ph = self.phase + other.phase + 2 * popcount(self.z & other.x)
        return PauliWord(self.ctx, ph, self.x ^ other.x, self.z ^ other.z)

    mul = __mul__

    def scaled(self, k: int) -> "PauliWord":
        """Multiply by ``i^k``."""
        return PauliWord(self.ctx, self.phase + k, self.x, self.z)

    def symplectic_product(self, other: "PauliWord") -> int:
        """0 if the words commute, 1 if they anticommute."""
        self._check(other)
        return popcount((self.x & other.z) ^ (self.z & other.x)) & 1

    def commutes(self, other: "PauliWord") -> bool:
        return self.symplectic_product(other) == 0

    def __pow__(self, k: int) -> "PauliWord":
        out = PauliWord(self.ctx)
        for _ in range(k):
            out = out * self
        return out

    # inspection

    @property
    def n(self) -> int:
        return self.ctx.num_qubits

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def num_y(self) -> int:
        return popcount(self.x & self.z)

    @property
    def symplectic(self) -> int:
        """``x | z << n`` as one bit vector of length ``2n``."""
        return self.x | (self.z << self.n)

    def is_identity(self) -> bool:
        """True only for the exact identity, phase included."""
        return self.x == 0 and self.z == 0 and self.phase == 0

    def is_trivial(self) -> bool:
        """True for any multiple of the identity."""
        return self.x == 0 and self.z == 0

    def is_hermitian(self) -> bool:
        # X^x Z^z with Y positions is Hermitian iff i^phase * i^{-#Y} is real
        return (self.phase - self.num_y) % 2 == 0

    def sign(self) -> int:
        """The +-1 (or +-i) in front of the letter form, as an exponent of i."""
        return (self.phase - self.num_y) & 3

    def equal_up_to_phase(self, other: "PauliWord") -> bool:
        self._check(other)
        return self.x == other.x and self.z == other.z

    def letter(self, site: Sequence[int]) -> str:
        q = self.ctx.qubit_index(site)
        return BITS_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]

    def qubits(self) -> list:
        s = self.support
        out = []
        while s:
            low = s & -s
            out.append(low.bit_length() - 1)
            s ^= low
        return out

    def sites(self) -> list:
        return [self.ctx.qubit_site(q) for q in self.qubits()]

    def letters(self) -> dict:
        """``{site: letter}`` over the support."""
        return {
            self.ctx.qubit_site(q): BITS_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]
            for q in self.qubits()
        }

    # serialization

    def to_json(self) -> dict:
        return {
            "phase": self.phase,
            "x": _bits(self.x),
            "z": _bits(self.z),
            "context": self.ctx.spec_string,
        }

    @classmethod
    def from_json(cls, data: Mapping, ctx: Optional[Context] = None) -> "PauliWord":
        if ctx is None:
            ctx = parse_context(data["context"])
        x = 0
        z = 0
        for q in data.get("x", []):
            x |= 1 << int(q)
        for q in data.get("z", []):
            z |= 1 << int(q)
        return cls(ctx, int(data.get("phase", 0)), x, z)

    def __repr__(self) -> str:
        body = " ".join(f"{l}{s}" for s, l in sorted(self.letters().items())) or "I"
        return f"PauliWord(i^{self.sign()} {body} on {self.ctx.spec_string})"


def _bits(v: int) -> list:
    out = []
    q = 0
    while v:
        if v & 1:
            out.append(q)
        v >>= 1
        q += 1
    return out


def generator(ctx: Context, u: Sequence[int]) -> PauliWord:
    """Six-body generator ``S_u`` at odd site ``u``."""
    u = tuple(u)
    if not parity(u):
        raise ParityError(f"generators live on odd sites, {u} is even")
    if not ctx.periodic:
        if any(v is None for v in ctx.neighbors(u)):
            raise UndefinedGeneratorError(f"generator at {u} leaves {ctx.spec_string}")
    return PauliWord.from_letters(ctx, ((add(u, off), l) for off, l in NEIGHBOR_OFFSETS))


def truncated_generator(ctx: Context, u: Sequence[int]) -> PauliWord:
    """``S_u`` restricted to the qubits of a window (used only for syndrome bits)."""
    items = []
    for off, l in NEIGHBOR_OFFSETS:
        v = add(u, off)
        if ctx.contains(v):
            items.append((v, l))
    return PauliWord.from_letters(ctx, items)


def generator_product(ctx: Context, sites: Iterable[Sequence[int]]) -> PauliWord:
    """Product of generators in the given order."""
    out = PauliWord(ctx)
    for u in sites:
        out = out * generator(ctx, u)
    return out
