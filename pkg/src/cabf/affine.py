"""Affine equivalence of 5-variable Boolean functions.

Two functions are equivalent when ``f(x) = g(Ax + b) + c.x + d`` with
``A`` invertible over GF(2).  Classification looks up an affine-invariant
signature (affine degree, |Walsh| multiset, |autocorrelation| multiset)
in a table built from the 48 registry representatives; the table is
checked to be collision-free before any lookup happens.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources

import numpy as np

from .boolfn import TruthTable, WrongArity, from_hex
from .transforms import algebraic_degree, autocorrelation, walsh_spectrum

ARITY = 5
ORBIT_LIMIT = 2_500_000


class AffineError(ValueError):
    pass


class SingularMatrix(AffineError):
    pass


class SignatureCollision(AffineError):
    pass


class UnknownSignature(AffineError):
    pass


class LimitExceeded(AffineError):
    pass


class UnknownClass(AffineError, KeyError):
    pass


def _parity(x: int) -> int:
    return x.bit_count() & 1


def gf2_rank(rows) -> int:
    """Rank of a GF(2) matrix given as row bitmasks."""
    rows = list(rows)
    rank = 0
    for bit in range(max((r.bit_length() for r in rows), default=0)):
        pivot = next((i for i in range(rank, len(rows)) if (rows[i] >> bit) & 1), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and (rows[i] >> bit) & 1:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


@dataclass(frozen=True)
class AffineTransform:
    """``(A, b, c, d)``; row ``i`` of ``A`` is a bitmask, bit ``j`` = A[i][j].

    Vectors ``b`` and ``c`` are bitmasks over the variables (bit j is
    component j), matching the truth-table index convention.
    """

    A: tuple[int, ...]
    b: int = 0
    c: int = 0
    d: int = 0

    def __post_init__(self):
        n = len(self.A)
        if gf2_rank(self.A) != n:
            raise SingularMatrix("A is not invertible over GF(2)")
        if self.b >> n or self.c >> n or self.d not in (0, 1):
            raise AffineError("b, c must have n bits and d must be a bit")

    @property
    def n(self) -> int:
        return len(self.A)

    @classmethod
    def identity(cls, n: int = ARITY) -> "AffineTransform":
        return cls(tuple(1 << i for i in range(n)))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int = ARITY) -> "AffineTransform":
        while True:
            rows = tuple(int(v) for v in rng.integers(0, 1 << n, size=n))
            if gf2_rank(rows) == n:
                break
        b, c, d = (int(v) for v in rng.integers(0, [1 << n, 1 << n, 2]))
        return cls(rows, b, c, d)

    def matvec(self, x: int) -> int:
        return sum(_parity(row & x) << i for i, row in enumerate(self.A))

    def transpose_matvec(self, x: int) -> int:
        out = 0
        for i, row in enumerate(self.A):
            if (x >> i) & 1:
                out ^= row
        return out

    def then(self, other: "AffineTransform") -> "AffineTransform":
        """The transform equal to applying ``self`` and then ``other``."""
        cols = [other.matvec(1 << j) for j in range(self.n)]
        # Row i of A1 A2, built column by column.
        A = tuple(
            sum(_parity(self.A[i] & cols[j]) << j for j in range(self.n)) for i in range(self.n)
        )
        b = self.matvec(other.b) ^ self.b
        c = other.transpose_matvec(self.c) ^ other.c
        d = _parity(self.c & other.b) ^ self.d ^ other.d
        return AffineTransform(A, b, c, d)


def apply_transform(g: TruthTable, T: AffineTransform) -> TruthTable:
    """``f(x) = g(Ax + b) XOR c.x XOR d``."""
    if g.arity != T.n:
        raise WrongArity(f"transform acts on {T.n} variables, function has {g.arity}")
    gv = g.to_array()
    x = np.arange(g.size)
    y = np.full(g.size, T.b)
    for i, row in enumerate(T.A):
        y ^= _parity_vec(x & row) << i
    lin = _parity_vec(x & T.c)
    return TruthTable.from_array(gv[y] ^ lin ^ T.d, g.arity)


def _parity_vec(v: np.ndarray) -> np.ndarray:
    return np.bitwise_count(v.astype(np.uint64)).astype(np.int64) & 1


@dataclass(frozen=True)
class ClassSignature:
    degree: int
    walsh_abs_multiset: tuple[int, ...]
    autocorr_abs_multiset: tuple[int, ...]


def signature(t: TruthTable) -> ClassSignature:
    """Affine-invariant signature.

    Adding an affine term can drop a degree-1 function to a constant, so
    the degree component is ``max(degree, 1)``.
    """
    if t.arity != ARITY:
        raise WrongArity("signatures are defined for 5-variable functions")
    walsh = np.sort(np.abs(walsh_spectrum(t).coefficients))
    autocorr = np.sort(np.abs(autocorrelation(t).coefficients))
    return ClassSignature(
        max(algebraic_degree(t), 1),
        tuple(int(v) for v in walsh),
        tuple(int(v) for v in autocorr),
    )


@dataclass(frozen=True)
class ClassEntry:
    index: int
    rep_hex: str
    anf: str
    expected_count: int

    @property
    def rep(self) -> TruthTable:
        return from_hex(self.rep_hex, ARITY)


class ClassRegistry:
    """The 48 affine classes with their verified signature table."""

    def __init__(self, entries: list[ClassEntry]):
        if len(entries) != 48:
            raise AffineError(f"registry must have 48 classes, found {len(entries)}")
        self.entries = entries
        self.by_hex = {e.rep_hex: e for e in entries}
        self.signatures: dict[ClassSignature, ClassEntry] = {}
        for e in entries:
            sig = signature(e.rep)
            if sig in self.signatures:
                raise SignatureCollision(
                    f"classes {self.signatures[sig].rep_hex} and {e.rep_hex} share a signature"
                )
            self.signatures[sig] = e

    @classmethod
    def from_csv(cls, lines) -> "ClassRegistry":
        reader = csv.DictReader(lines)
        entries = [
            ClassEntry(i, row["rep_hex"].strip().lower(), row["anf"].strip(), int(row["expected_count"]))
            for i, row in enumerate(reader)
        ]
        return cls(entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, rep_hex: str) -> ClassEntry:
        try:
            return self.by_hex[rep_hex.lower()]
        except KeyError:
            raise UnknownClass(f"no class with representative {rep_hex!r}") from None

    @property
    def ids(self) -> list[str]:
        return [e.rep_hex for e in self.entries]

    def classify(self, t: TruthTable) -> str:
        try:
            return self.signatures[signature(t)].rep_hex
        except KeyError:
            raise UnknownSignature(f"{t} matches no registry signature") from None

    @cached_property
    def kernel_tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(sorted keys, key order, signature rows) for the compiled lookup."""
        from . import _kernels as K

        reps = np.array([e.rep.bits for e in self.entries], dtype=np.int64)
        sigs = np.zeros((len(reps), K.SIG_LEN), dtype=np.int64)
        K.signatures5_batch(reps, sigs)
        if len({tuple(s) for s in sigs}) != len(reps):
            raise SignatureCollision("representative signatures are not pairwise distinct")
        keys = np.array([K.signature_key(s) for s in sigs], dtype=np.int64)
        if len(set(keys.tolist())) != len(keys):
            raise SignatureCollision("signature hash keys collide; change the key function")
        order = np.argsort(keys)
        return keys[order], order.astype(np.int64), sigs


@lru_cache(maxsize=1)
def default_registry() -> ClassRegistry:
    with resources.files("cabf.data").joinpath("classes.csv").open("r") as fh:
        return ClassRegistry.from_csv(fh)


def classify(t: TruthTable) -> str:
    return default_registry().classify(t)


def orbit_enumerate(rep: TruthTable, limit: int = ORBIT_LIMIT) -> np.ndarray:
    """All functions affine-equivalent to ``rep``, as a sorted int64 array of packed tables.

    Breadth-first closure under variable swaps, transvections
    ``x_i <- x_i + x_j``, input complements, ``f <- f + x_i`` and
    ``f <- f + 1``.  Raises :class:`LimitExceeded` if the orbit has more
    than ``limit`` members.
    """
    from . import _kernels as K

    if rep.arity != ARITY:
        raise WrongArity("orbits are enumerated for 5-variable functions")
    if limit < 1:
        raise ValueError("limit must be positive")
    members = np.zeros(limit, dtype=np.int64)
    table = np.zeros(1 << max(6, (2 * limit).bit_length()), dtype=np.int64)
    size = K.orbit_bfs(rep.bits, members, table)
    if size < 0:
        raise LimitExceeded(f"orbit of {rep} has more than {limit} members")
    return np.sort(members[:size])
