"""Exhaustive branch-and-bound over low-weight Pauli operators.

The search grows a Pauli one qubit at a time.  At every node it picks a check
row whose current bit disagrees with the target and branches over the qubits
that touch that row, restricted to letters that flip it.  Earlier siblings are
forbidden in later branches, so every operator is visited at most once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .pauli import PauliWord

_FLIPPERS = {"X": ("Y", "Z"), "Y": ("X", "Z"), "Z": ("X", "Y")}
_LETTER_X = {"X": 1, "Y": 1, "Z": 0}
_LETTER_Z = {"X": 0, "Y": 1, "Z": 1}


class BudgetExceeded(Exception):
    pass


def _anti(a: str, b: str) -> bool:
    return a != b


@dataclass
class SearchResult:
    word: Optional[PauliWord]
    weight_exhausted: int  # every weight up to this value was searched completely
    nodes: int
    complete: bool


class PauliSearch:
    """Branch-and-bound over Paulis whose syndrome on ``rows`` equals ``target``.

    ``rows`` maps a row id to the generator's letters on its qubits
    (``{qubit: letter}``), ``target`` is a set of row ids.  ``allowed`` restricts
    the qubits that may be used.
    """

    def __init__(
        self,
        ctx,
        rows: Dict[object, Dict[int, str]],
        target: Iterable[object] = (),
        allowed: Optional[Set[int]] = None,
        max_nodes: int = 5_000_000,
    ):
        self.ctx = ctx
        self.rows = rows
        self.target = set(target)
        self.allowed = allowed
        self.max_nodes = max_nodes
        self.qubit_rows: Dict[int, List[Tuple[object, str]]] = {}
        for r, letters in rows.items():
            for q, l in letters.items():
                self.qubit_rows.setdefault(q, []).append((r, l))
        self.maxflip = max((len(v) for v in self.qubit_rows.values()), default=1)
        self.nodes = 0

    def _flips(self, q: int, letter: str) -> List[object]:
        return [r for r, gl in self.qubit_rows.get(q, ()) if _anti(letter, gl)]

    def _word(self, assign: Dict[int, str]) -> PauliWord:
        x = z = 0
        for q, l in assign.items():
            x |= _LETTER_X[l] << q
            z |= _LETTER_Z[l] << q
        return PauliWord.from_symplectic(self.ctx, x | (z << self.ctx.num_qubits))

    def run(
        self,
        cap: int,
        accept: Callable[[PauliWord], bool] = lambda w: True,
        seeds: Sequence[Dict[int, str]] = ({},),
        min_weight: int = 1,
    ) -> SearchResult:
        """Iterative deepening on weight; returns the first accepted operator."""
        exhausted = min_weight - 1
        self.nodes = 0
        try:
            for limit in range(min_weight, cap + 1):
                for seed in seeds:
                    found = self._run_limit(limit, seed, accept)
                    if found is not None:
                        return SearchResult(found, limit - 1, self.nodes, True)
                exhausted = limit
        except BudgetExceeded:
            return SearchResult(None, exhausted, self.nodes, False)
        return SearchResult(None, exhausted, self.nodes, True)

    def _run_limit(self, limit: int, seed: Dict[int, str], accept) -> Optional[PauliWord]:
        assign: Dict[int, str] = {}
        violated = set(self.target)
        for q, l in seed.items():
            assign[q] = l
            for r in self._flips(q, l):
                violated ^= {r}
        if len(assign) > limit:
            return None
        forbidden: Set[Tuple[int, str]] = set()
        return self._dfs(assign, violated, limit - len(assign), forbidden, accept)

    def _dfs(self, assign, violated, remaining, forbidden, accept) -> Optional[PauliWord]:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise BudgetExceeded
        if not violated:
            if assign:
                w = self._word(assign)
                if accept(w):
                    return w
            # an accepted extension would contain a smaller accepted operator
            # after removing this zero-syndrome part; shallower limits cover it
            return None
        if remaining <= 0 or len(violated) > self.maxflip * remaining:
            return None
        r = min(violated, key=lambda v: (len(self.rows[v]), str(v)))
        options = []
        for q, gl in sorted(self.rows[r].items()):
            if q in assign or (self.allowed is not None and q not in self.allowed):
                continue
            for l in _FLIPPERS[gl]:
                if (q, l) not in forbidden:
                    options.append((q, l))
        added = []
        found = None
        for q, l in options:
            flips = self._flips(q, l)
            assign[q] = l
            for v in flips:
                violated ^= {v}
            found = self._dfs(assign, violated, remaining - 1, forbidden, accept)
            for v in flips:
                violated ^= {v}
            del assign[q]
            if found is not None:
                break
            forbidden.add((q, l))
            added.append((q, l))
        for key in added:
            forbidden.discard(key)
        return found
