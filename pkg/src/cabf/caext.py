"""One-dimensional uniform cellular automata and the 5 -> 9 variable extension.

Window convention: for a rule of arity ``r`` the cell at offset ``+radius``
(rightmost) feeds bit 0 of the rule index and the cell at ``-radius``
feeds bit ``r - 1``, so ``f(a, b, c)`` written left to right has ``c = x_0``.
For the extension, cell ``i`` of the 9-cell automaton holds input ``x_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .boolfn import TruthTable, WrongArity


class StateTooShort(ValueError):
    pass


class Boundary(str, Enum):
    CIRCULAR = "circular"
    TRUNCATING = "truncating"


@dataclass(frozen=True)
class CAState:
    cells: tuple[int, ...]
    rule: TruthTable
    boundary: Boundary = Boundary.CIRCULAR

    def __post_init__(self):
        if self.rule.arity % 2 == 0:
            raise WrongArity("CA rules need an odd arity")
        if not self.cells:
            raise StateTooShort("a CA needs at least one cell")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def radius(self) -> int:
        return self.rule.arity // 2

    def render(self) -> str:
        return "".join("#" if c else "." for c in self.cells)


def _window_index(cells, centre: int, radius: int, wrap: bool) -> int:
    idx = 0
    n = len(cells)
    for k, offset in enumerate(range(radius, -radius - 1, -1)):
        pos = centre + offset
        if wrap:
            pos %= n
        idx |= cells[pos] << k
    return idx


def ca_step(s: CAState) -> CAState:
    """One synchronous update.

    Circular boundaries keep the length; truncating boundaries only keep
    cells whose whole window lies inside the state (length shrinks by r - 1).
    """
    r, radius, bits = s.rule.arity, s.radius, s.rule.bits
    n = len(s.cells)
    if s.boundary is Boundary.CIRCULAR:
        centres = range(n)
        wrap = True
    else:
        if n < r:
            raise StateTooShort(f"truncating step needs at least {r} cells, got {n}")
        centres = range(radius, n - radius)
        wrap = False
    new = tuple((bits >> _window_index(s.cells, i, radius, wrap)) & 1 for i in centres)
    return CAState(new, s.rule, s.boundary)


def evolve(s: CAState, steps: int) -> list[CAState]:
    """The initial state followed by ``steps`` successors."""
    states = [s]
    for _ in range(steps):
        states.append(ca_step(states[-1]))
    return states


def render_evolution(states: list[CAState]) -> str:
    """Rows of . and #; truncated rows are centred under the first row."""
    width = len(states[0].cells)
    lines = []
    for st in states:
        pad = (width - len(st.cells)) // 2
        lines.append(" " * pad + st.render())
    return "\n".join(lines)


def extend_5_to_9(f: TruthTable) -> TruthTable:
    """The 9-variable function computed by two CA steps of ``f`` on 9 cells.

    Bitsliced: all 512 inputs are advanced at once.
    """
    return TruthTable(9, extend_many(np.array([_rule_bits(f)], dtype=np.int64))[0])


def extend_many(rules: np.ndarray) -> list[int]:
    """Extend a batch of packed 5-variable rules; returns packed 512-bit ints."""
    from . import _kernels as K

    rules = np.ascontiguousarray(rules, dtype=np.int64)
    words = np.zeros((len(rules), K.NWORDS), dtype=np.int64)
    K.extend_batch(rules, words)
    return [words_to_int(row) for row in words]


def words_to_int(words) -> int:
    return sum(int(w) << (32 * i) for i, w in enumerate(words))


def int_to_words(bits: int) -> np.ndarray:
    return np.array([(bits >> (32 * i)) & 0xFFFFFFFF for i in range(16)], dtype=np.int64)


def extend_by_simulation(f: TruthTable) -> TruthTable:
    """Reference extension built from :func:`ca_step` with truncating boundaries."""
    _rule_bits(f)
    bits = 0
    for x in range(512):
        state = CAState(tuple((x >> i) & 1 for i in range(9)), f, Boundary.TRUNCATING)
        final = ca_step(ca_step(state))
        bits |= final.cells[0] << x
    return TruthTable(9, bits)


def mirror_rule(f: TruthTable) -> TruthTable:
    """The rule with its window arguments reversed."""
    n = f.arity
    return TruthTable.from_function(lambda i: f[_reverse(i, n)], n)


def mirror_inputs(g: TruthTable) -> TruthTable:
    """``x_i -> x_{n-1-i}`` applied to the inputs of ``g``."""
    n = g.arity
    return TruthTable.from_function(lambda i: g[_reverse(i, n)], n)


def _reverse(i: int, n: int) -> int:
    return int(format(i, f"0{n}b")[::-1], 2)


def _rule_bits(f: TruthTable) -> int:
    if f.arity != 5:
        raise WrongArity(f"extension needs a 5-variable rule, got arity {f.arity}")
    return f.bits
