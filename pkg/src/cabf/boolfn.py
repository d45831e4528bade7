"""Truth-table representation of Boolean functions.

Bit ``i`` of a truth table is ``f`` evaluated on the input whose variable
``x_j`` is bit ``j`` of ``i`` (``x_0`` is the least significant bit).  The
packed table is an ordinary Python ``int``, so the hex form printed
most-significant digit first has ``f(1, ..., 1)`` as its high-order bit.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_ARITY = 9


class BoolFnError(ValueError):
    """Base class for malformed truth tables and inputs."""


class WrongLength(BoolFnError):
    pass


class InvalidDigit(BoolFnError):
    pass


class WrongArity(BoolFnError):
    pass


class IndexOutOfRange(BoolFnError, IndexError):
    pass


@lru_cache(maxsize=None)
def var_mask(arity: int, j: int) -> int:
    """Packed table of ``x_j`` for the given arity."""
    return sum(1 << i for i in range(1 << arity) if (i >> j) & 1)


def _check_arity(arity: int) -> None:
    if not 1 <= arity <= MAX_ARITY:
        raise WrongArity(f"arity must be in [1, {MAX_ARITY}], got {arity}")


@dataclass(frozen=True)
class TruthTable:
    """Immutable truth table of an ``arity``-variable Boolean function.

    ``bits`` packs the 2**arity outputs into one integer.
    """

    arity: int
    bits: int

    def __post_init__(self):
        _check_arity(self.arity)
        if not 0 <= self.bits < (1 << self.size):
            raise WrongLength(f"table does not fit in {self.size} bits")

    @property
    def size(self) -> int:
        return 1 << self.arity

    @property
    def mask(self) -> int:
        return (1 << self.size) - 1

    @classmethod
    def zero(cls, arity: int) -> "TruthTable":
        return cls(arity, 0)

    @classmethod
    def ones(cls, arity: int) -> "TruthTable":
        return cls(arity, (1 << (1 << arity)) - 1)

    @classmethod
    def variable(cls, arity: int, j: int) -> "TruthTable":
        """The projection ``x -> x_j``."""
        if not 0 <= j < arity:
            raise IndexOutOfRange(f"variable x{j} does not exist for arity {arity}")
        return cls(arity, var_mask(arity, j))

    @classmethod
    def from_array(cls, values, arity: int | None = None) -> "TruthTable":
        values = np.asarray(values).astype(np.uint8) & 1
        if arity is None:
            arity = int(values.size).bit_length() - 1
        if values.size != 1 << arity:
            raise WrongLength(f"expected {1 << arity} values, got {values.size}")
        packed = np.packbits(values, bitorder="little").tobytes()
        return cls(arity, int.from_bytes(packed, "little"))

    @classmethod
    def from_function(cls, func, arity: int) -> "TruthTable":
        """Tabulate ``func(x)`` where ``x`` is the integer input index."""
        bits = 0
        for i in range(1 << arity):
            if func(i) & 1:
                bits |= 1 << i
        return cls(arity, bits)

    def to_array(self) -> np.ndarray:
        """Outputs as a ``uint8`` vector of length 2**arity, index = input."""
        raw = self.bits.to_bytes(max(1, self.size // 8), "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[: self.size]

    def __getitem__(self, x: int) -> int:
        return evaluate(self, x)

    def __xor__(self, other: "TruthTable") -> "TruthTable":
        if other.arity != self.arity:
            raise WrongArity("cannot combine functions of different arity")
        return TruthTable(self.arity, self.bits ^ other.bits)

    def __invert__(self) -> "TruthTable":
        return TruthTable(self.arity, self.bits ^ self.mask)

    def __str__(self) -> str:
        return to_hex(self) if self.arity >= 2 else to_binary(self)


def from_hex(text: str, arity: int) -> TruthTable:
    """Parse a fixed-width, MSB-first hex table (``"6e"`` is rule 110)."""
    _check_arity(arity)
    if arity < 2:
        raise WrongLength("hex form needs arity >= 2; use from_binary")
    digits = text.strip().lower()
    if digits.startswith("0x"):
        digits = digits[2:]
    width = (1 << arity) // 4
    bad = [c for c in digits if c not in string.hexdigits]
    if bad:
        raise InvalidDigit(f"invalid hex digit {bad[0]!r} in {text!r}")
    if len(digits) != width:
        raise WrongLength(f"arity {arity} needs {width} hex digits, got {len(digits)}")
    return TruthTable(arity, int(digits, 16))


def to_hex(t: TruthTable) -> str:
    if t.arity < 2:
        raise WrongLength("hex form needs arity >= 2; use to_binary")
    return format(t.bits, f"0{t.size // 4}x")


def from_binary(text: str, arity: int) -> TruthTable:
    """Parse ``"0b..."`` with 2**arity digits, leftmost = f on the all-ones input."""
    _check_arity(arity)
    digits = text.strip()
    if digits.startswith("0b"):
        digits = digits[2:]
    if any(c not in "01" for c in digits):
        raise InvalidDigit(f"invalid binary digit in {text!r}")
    if len(digits) != 1 << arity:
        raise WrongLength(f"arity {arity} needs {1 << arity} binary digits, got {len(digits)}")
    return TruthTable(arity, int(digits, 2))


def to_binary(t: TruthTable) -> str:
    return "0b" + format(t.bits, f"0{t.size}b")


def parse_table(text: str, arity: int) -> TruthTable:
    """Accept either the hex or the ``0b`` binary form."""
    if text.strip().startswith("0b") or arity < 2:
        return from_binary(text, arity)
    return from_hex(text, arity)


def evaluate(t: TruthTable, x: int) -> int:
    if not 0 <= x < t.size:
        raise IndexOutOfRange(f"input {x} out of range for arity {t.arity}")
    return (t.bits >> x) & 1


def weight(t: TruthTable) -> int:
    return t.bits.bit_count()


def shift_input(t: TruthTable, a: int) -> TruthTable:
    """The function ``x -> f(x XOR a)``."""
    if not 0 <= a < t.size:
        raise IndexOutOfRange(f"direction {a} out of range for arity {t.arity}")
    bits = t.bits
    for j in range(t.arity):
        if (a >> j) & 1:
            s = 1 << j
            low = ~var_mask(t.arity, j) & t.mask
            bits = ((bits & low) << s) | ((bits >> s) & low)
    return TruthTable(t.arity, bits)


def derivative(t: TruthTable, a: int) -> TruthTable:
    """``D_a f(x) = f(x) XOR f(x XOR a)``."""
    return TruthTable(t.arity, t.bits ^ shift_input(t, a).bits)
