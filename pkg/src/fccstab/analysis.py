"""Code distance, subsystem distance and cleaning-lemma checks.

Every reported witness is re-verified here: it must commute with all
generators (zero syndrome) and lie outside the stabilizer group, or outside
the gauge group in subsystem mode.  Membership is always a rank test.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .code import generator_words
from .errors import ConfigError, PreconditionError
from .gf2 import Gf2Matrix, RowSpace, rank_of
from .lattice import LatticeSpec, Site, add
from .operators import (
    HalfMembraneSpec,
    PARITY_LABELS,
    check_logical_preconditions,
    closed_rigid_length,
    gauge_groups,
    half_membrane,
    logical_set,
    rigid_string,
    RigidStringSpec,
    string_net,
)
from .pauli import PauliWord, generator, popcount
from .search import PauliSearch


def default_threads() -> int:
    raw = os.environ.get("FCC_STAB_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        raise ConfigError(f"FCC_STAB_THREADS must be an integer, got {raw!r}")


# membership oracles


def _swap(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return (v >> n) | ((v & mask) << n)


class CodeGroups:
    """Stabilizer and gauge row spaces plus the centralizer basis."""

    def __init__(self, spec: LatticeSpec, subsystem: bool = False):
        self.spec = spec
        self.n = spec.n
        self.words = generator_words(spec)
        self.stab = RowSpace([w.symplectic for w in self.words], 2 * self.n)
        self.subsystem = subsystem
        if subsystem:
            extra = [w.symplectic for w in gauge_groups(spec).subsystem]
            self.gauge = self.stab.extended(extra)
        else:
            self.gauge = self.stab

    def commutes_with_all(self, v: int) -> bool:
        sv = _swap(v, self.n)
        return all(popcount(sv & w.symplectic) % 2 == 0 for w in self.words)

    def trivial(self, v: int) -> bool:
        """In ``S`` (or ``G`` in subsystem mode)."""
        return self.gauge.contains(v)

    def is_witness(self, v: int) -> bool:
        return v != 0 and self.commutes_with_all(v) and not self.trivial(v)

    def centralizer_basis(self) -> List[int]:
        rows = [_swap(w.symplectic, self.n) for w in self.words]
        return Gf2Matrix.from_ints(rows, 2 * self.n).nullspace_basis()


def qubit_weight(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return popcount((v | (v >> n)) & mask)


# reports


@dataclass
class DistanceReport:
    spec: LatticeSpec
    mode: str  # "exact", "heuristic" or "subsystem"
    lower: int
    upper: Optional[int]
    witness: Optional[PauliWord] = None
    methods: List[str] = field(default_factory=list)
    trials: int = 0
    nodes: int = 0
    complete: bool = True
    seeds: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper:
            raise AssertionError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    def to_json(self) -> dict:
        out = {
            "spec": self.spec.spec_string,
            "mode": self.mode,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "methods": list(self.methods),
            "trials": self.trials,
            "nodes": self.nodes,
            "complete": self.complete,
            "seed_weights": dict(sorted(self.seeds.items())),
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


# exact search


def _generator_rows(spec: LatticeSpec, words: Sequence[PauliWord]) -> Dict[int, Dict[int, str]]:
    rows = {}
    for idx, w in enumerate(words):
        rows[idx] = {spec.qubit_index(s): l for s, l in w.letters().items()}
    return rows


def exact_distance(
    spec: LatticeSpec,
    cap: int = 4,
    subsystem: bool = False,
    max_nodes: int = 5_000_000,
    groups: Optional[CodeGroups] = None,
) -> DistanceReport:
    """Exhaustive minimum weight of ``C(S) \\ S`` (or ``C(S) \\ G``) up to ``cap``.

    Translations by even vectors act transitively on qubits and preserve the
    code, so the search fixes a non-identity letter on the qubit at the origin.
    """
    if subsystem:
        check_logical_preconditions(spec)
    groups = groups or CodeGroups(spec, subsystem)
    rows = _generator_rows(spec, groups.words)
    q0 = spec.qubit_index((0, 0, 0))
    search = PauliSearch(spec, rows, max_nodes=max_nodes)
    seeds = [{q0: l} for l in "XYZ"]
    res = search.run(cap, accept=lambda w: not groups.trivial(w.symplectic), seeds=seeds)
    mode = "subsystem" if subsystem else "exact"
    if res.word is not None:
        if not groups.is_witness(res.word.symplectic):
            raise AssertionError("search returned an invalid witness")
        wt = res.word.weight
        return DistanceReport(spec, mode, wt, wt, res.word, ["branch-and-bound"], 0, res.nodes)
    return DistanceReport(
        spec, mode, res.weight_exhausted + 1, None, None, ["branch-and-bound"], 0, res.nodes, res.complete
    )


# known constructions


def construction_seeds(spec: LatticeSpec, subsystem: bool = False) -> Dict[str, PauliWord]:
    """Logical operators from explicit constructions, used as heuristic seeds."""
    out: Dict[str, PauliWord] = {}
    try:
        check_logical_preconditions(spec)
        coprime = True
    except ConfigError:
        coprime = False
    if not subsystem:
        for axis in "xyz":
            for abc in PARITY_LABELS:
                out[f"half-membrane-{axis}{abc}"] = half_membrane(spec, HalfMembraneSpec(axis, abc))
    if coprime:
        lg = logical_set(spec)
        for name in ("X3", "X4", "Z3", "Z4"):
            out[f"logical-{name}"] = lg[name]
        for h in ((1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1)):
            m = closed_rigid_length(spec, h)
            out[f"closed-rigid-{''.join('1' if c == 1 else '-1' if c == -1 else '0' for c in h)}"] = rigid_string(
                spec, RigidStringSpec((0, 0, 0), h, m - 1)
            )
        if spec.p[1] == spec.p[0] + 2:
            out["string-net"] = string_net(spec).word
    return out


def _hill_climb(v: int, n: int, gens: Sequence[int], touch: Dict[int, List[int]]) -> int:
    """Greedy weight descent by multiplying with generators touching the support."""
    mask = (1 << n) - 1
    best = qubit_weight(v, n)
    improved = True
    while improved:
        improved = False
        sup = (v | (v >> n)) & mask
        cand = set()
        while sup:
            low = sup & -sup
            cand.update(touch.get(low.bit_length() - 1, ()))
            sup ^= low
        for gi in sorted(cand):
            nv = v ^ gens[gi]
            wt = qubit_weight(nv, n)
            if wt < best:
                v, best, improved = nv, wt, True
    return v


def _isd_restart(
    basis_dense: np.ndarray,
    n: int,
    rng_seed: int,
    perms: int,
    stop_at: int,
    groups: CodeGroups,
    gens: Sequence[int],
    touch: Dict[int, List[int]],
) -> Tuple[Optional[int], int]:
    """One restart: ``perms`` random information sets, returns (best vector, weight)."""
    rng = np.random.default_rng(rng_seed)
    best_v, best_w = None, 1 << 30
    for _ in range(perms):
        order = rng.permutation(n)
        cols = np.empty(2 * n, dtype=np.int64)
        cols[0::2] = order
        cols[1::2] = order + n
        red, _ = Gf2Matrix.from_dense(basis_dense[:, cols]).rref()
        dense = red.to_dense()
        back = np.zeros_like(dense)
        back[:, cols] = dense
        for row in Gf2Matrix.from_dense(back).row_ints():
            wt = qubit_weight(row, n)
            if wt >= best_w:
                continue
            row = _hill_climb(row, n, gens, touch)
            wt = qubit_weight(row, n)
            if wt < best_w and not groups.trivial(row):
                best_v, best_w = row, wt
        if best_w <= stop_at:
            break
    return best_v, best_w


def heuristic_distance(
    spec: LatticeSpec,
    trials: int = 4,
    seed: int = 0,
    subsystem: bool = False,
    perms: int = 64,
    certify_cap: int = 0,
    threads: Optional[int] = None,
) -> DistanceReport:
    """Upper bound on ``d`` (or ``d_G``) from constructions plus randomized information-set search.

    ``trials`` independent restarts of ``perms`` permutations each run on
    private matrices; results are merged by weight, then by restart index, so
    the outcome does not depend on ``threads``.
    """
    if subsystem:
        check_logical_preconditions(spec)
    groups = CodeGroups(spec, subsystem)
    n = spec.n
    gens = [w.symplectic for w in groups.words]
    touch: Dict[int, List[int]] = {}
    for gi, w in enumerate(groups.words):
        for q in w.qubits():
            touch.setdefault(q, []).append(gi)

    methods = ["constructions"]
    best_v: Optional[int] = None
    best_w = 1 << 30
    seed_weights: Dict[str, int] = {}
    for name, word in sorted(construction_seeds(spec, subsystem).items()):
        v = word.symplectic
        if not groups.is_witness(v):
            continue
        v = _hill_climb(v, n, gens, touch)
        wt = qubit_weight(v, n)
        seed_weights[name] = wt
        if wt < best_w:
            best_v, best_w = v, wt

    lower = 1
    nodes = 0
    complete = True
    if certify_cap > 0:
        ex = exact_distance(spec, certify_cap, subsystem, groups=groups)
        nodes = ex.nodes
        complete = ex.complete
        methods.append("branch-and-bound")
        lower = ex.lower
        if ex.witness is not None:
            best_v, best_w = ex.witness.symplectic, ex.witness.weight

    if trials > 0 and best_w > lower:
        methods.append("information-set")
        basis = groups.centralizer_basis()
        dense = Gf2Matrix.from_ints(basis, 2 * n).to_dense()
        seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
        workers = threads or default_threads()
        args = [(dense, n, int(s), perms, lower, groups, gens, touch) for s in seeds]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda a: _isd_restart(*a), args))
        else:
            results = [_isd_restart(*a) for a in args]
        for v, wt in results:
            if v is not None and wt < best_w:
                best_v, best_w = v, wt

    witness = None
    upper = None
    if best_v is not None:
        if not groups.is_witness(best_v):
            raise AssertionError("heuristic produced an invalid witness")
        witness = PauliWord.from_symplectic(spec, best_v)
        upper = witness.weight
    mode = "subsystem" if subsystem else "heuristic"
    return DistanceReport(spec, mode, lower, upper, witness, methods, trials, nodes, complete, seed_weights)


def subsystem_distance(spec: LatticeSpec, trials: int = 4, seed: int = 0, **kw) -> DistanceReport:
    """Upper bound on ``d_G``; the gauge group adds the logical pairs 1 and 2 to ``S``."""
    return heuristic_distance(spec, trials, seed, subsystem=True, **kw)


# cleaning lemma


@dataclass
class CleaningReport:
    spec: LatticeSpec
    box: Tuple[int, int, int]
    anchor: Site
    commuting_dim: int
    stabilizer_dim: int
    hypothesis: bool  # every l_a <= L_a - 3
    peel_checked: int = 0
    peel_ok: int = 0

    @property
    def equal(self) -> bool:
        return self.commuting_dim == self.stabilizer_dim

    def to_json(self) -> dict:
        return {
            "box": list(self.box),
            "anchor": list(self.anchor),
            "commuting_dim": self.commuting_dim,
            "stabilizer_dim": self.stabilizer_dim,
            "equal": self.equal,
            "hypothesis": self.hypothesis,
            "peel_checked": self.peel_checked,
            "peel_ok": self.peel_ok,
        }


def box_sites(spec: LatticeSpec, anchor: Sequence[int], box: Sequence[int]) -> List[Site]:
    sites = {
        spec.reduce((anchor[0] + i, anchor[1] + j, anchor[2] + k))
        for i in range(box[0])
        for j in range(box[1])
        for k in range(box[2])
    }
    return sorted(sites)


def _restrict(v: int, n: int, cols: Dict[int, int]) -> int:
    """Restrict a symplectic vector to box qubits with compact column indices."""
    out = 0
    m = len(cols)
    for q, c in cols.items():
        if (v >> q) & 1:
            out |= 1 << c
        if (v >> (q + n)) & 1:
            out |= 1 << (c + m)
    return out


def _box_data(spec: LatticeSpec, anchor, box):
    sites = box_sites(spec, anchor, box)
    in_box = set(sites)
    qubits = sorted(spec.qubit_index(u) for u in sites if not sum(u) % 2)
    cols = {q: c for c, q in enumerate(qubits)}
    n = spec.n
    touching, inside = [], []
    for idx in range(spec.n):
        v = spec.generator_site(idx)
        nb = spec.neighbors(v)
        hits = [w for w in nb if w in in_box]
        if not hits:
            continue
        word = generator(spec, v)
        touching.append(word)
        if len(hits) == len(nb):
            inside.append(word)
    return qubits, cols, touching, inside


def cleaning_check(
    spec: LatticeSpec,
    box: Sequence[int],
    anchor: Sequence[int] = (0, 0, 0),
    peel_samples: int = 0,
    seed: int = 0,
) -> CleaningReport:
    """Compare the box-supported centralizer with the span of in-box generators."""
    box = tuple(int(b) for b in box)
    if any(b < 1 for b in box):
        raise PreconditionError("box dimensions must be positive")
    hypothesis = all(b <= L - 3 for b, L in zip(box, spec.dims))
    qubits, cols, touching, inside = _box_data(spec, anchor, box)
    n, m = spec.n, len(qubits)
    constraint = [_swap(_restrict(w.symplectic, n, cols), m) for w in touching]
    commuting_dim = 2 * m - rank_of(constraint, 2 * m)
    stabilizer_dim = rank_of([_restrict(w.symplectic, n, cols) for w in inside], 2 * m)
    rep = CleaningReport(spec, box, tuple(anchor), commuting_dim, stabilizer_dim, hypothesis)
    if peel_samples and m:
        basis = Gf2Matrix.from_ints(constraint, 2 * m).nullspace_basis() if constraint else []
        rng = random.Random(seed)
        inv = {c: q for q, c in cols.items()}
        for _ in range(peel_samples):
            v = 0
            for b in basis:
                if rng.getrandbits(1):
                    v ^= b
            full = 0
            for c in range(m):
                if (v >> c) & 1:
                    full |= 1 << inv[c]
                if (v >> (c + m)) & 1:
                    full |= 1 << (inv[c] + n)
            rep.peel_checked += 1
            if peel(spec, anchor, box, PauliWord.from_symplectic(spec, full)) is not None:
                rep.peel_ok += 1
    return rep


def peel(spec: LatticeSpec, anchor: Sequence[int], box: Sequence[int], P: PauliWord) -> Optional[List[Site]]:
    """Constructive cleaning: strip the top face with generators one layer below.

    A commuting operator must act as ``Z`` or trivially on the top face (the
    generators just above the box see only that one qubit).  Multiplying by
    ``S_{u - z}`` clears ``u``.  Returns the generator centres used, or ``None``
    if the sweep gets stuck; the result is checked against ``P`` up to phase.
    """
    in_box = set(box_sites(spec, anchor, box))
    cur = P
    used: List[Site] = []
    for top in range(box[2] - 1, 1, -1):
        face = [spec.reduce((anchor[0] + i, anchor[1] + j, anchor[2] + top)) for i in range(box[0]) for j in range(box[1])]
        for u in face:
            if sum(u) % 2:
                continue
            l = cur.letter(u)
            if l == "I":
                continue
            if l != "Z":
                return None
            c = spec.reduce(add(u, (0, 0, -1)))
            if any(w not in in_box for w in spec.neighbors(c)):
                return None
            cur = cur * generator(spec, c)
            used.append(c)
    if not cur.is_trivial():
        return None
    check = PauliWord(spec)
    for c in used:
        check = check * generator(spec, c)
    if not check.equal_up_to_phase(P):
        return None
    return used


def cleaning_sweep(
    spec: LatticeSpec,
    max_box: Optional[Sequence[int]] = None,
    anchors: Iterable[Sequence[int]] = ((0, 0, 0), (1, 0, 0)),
    peel_samples: int = 0,
) -> List[CleaningReport]:
    """All boxes ``l_a <= L_a - 3`` (or up to ``max_box``) at each anchor parity."""
    top = tuple(max_box) if max_box is not None else tuple(L - 3 for L in spec.dims)
    out = []
    for anchor in anchors:
        for lx in range(1, top[0] + 1):
            for ly in range(1, top[1] + 1):
                for lz in range(1, top[2] + 1):
                    out.append(cleaning_check(spec, (lx, ly, lz), tuple(anchor), peel_samples))
    return out


@dataclass
class TqoReport:
    spec: LatticeSpec
    boxes: List[CleaningReport]
    distance: DistanceReport
    cleaning_lower: int

    @property
    def cleaning_ok(self) -> bool:
        return bool(self.boxes) and all(b.equal for b in self.boxes)

    @property
    def ok(self) -> bool:
        return self.cleaning_ok and self.distance.lower > 1

    def to_json(self) -> dict:
        largest = None
        passing = [b for b in self.boxes if b.equal]
        if passing:
            largest = list(max(passing, key=lambda b: (b.box[0] * b.box[1] * b.box[2], b.box)).box)
        return {
            "spec": self.spec.spec_string,
            "boxes_checked": len(self.boxes),
            "boxes_passing": len(passing),
            "cleaning_ok": self.cleaning_ok,
            "largest_passing_box": largest,
            "cleaning_distance_lower": self.cleaning_lower,
            "distance": self.distance.to_json(),
            "ok": self.ok,
            "failures": [b.to_json() for b in self.boxes if not b.equal],
        }


def tqo_report(spec: LatticeSpec, cap: int = 3, max_nodes: int = 2_000_000) -> TqoReport:
    """Cleaning sweep plus a distance lower bound.

    If the largest allowed box passes at both anchor parities, any logical's
    projection onto some axis meets every three consecutive coordinates, so its
    weight is at least ``min_a ceil(L_a / 3)``.
    """
    boxes = cleaning_sweep(spec)
    top = tuple(L - 3 for L in spec.dims)
    big = [b for b in boxes if b.box == top]
    cleaning_lower = 1
    if big and all(b.equal for b in big):
        cleaning_lower = min(math.ceil(L / 3) for L in spec.dims)
    dist = exact_distance(spec, cap, max_nodes=max_nodes)
    if dist.upper is None and cleaning_lower > dist.lower:
        dist.lower = cleaning_lower
        dist.methods.append("cleaning")
    return TqoReport(spec, boxes, dist, cleaning_lower)

