"""Walsh-Hadamard, Moebius (ANF) and autocorrelation transforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfn import TruthTable, WrongArity


def _butterfly_add(v: np.ndarray) -> np.ndarray:
    """In-place unnormalised Hadamard butterfly over the last axis."""
    n = v.shape[-1].bit_length() - 1
    lead = v.shape[:-1]
    for i in range(n):
        h = 1 << i
        w = v.reshape(*lead, -1, 2, h)
        a = w[..., 0, :].copy()
        b = w[..., 1, :]
        w[..., 0, :] += b
        w[..., 1, :] = a - b
    return v


def _butterfly_xor(v: np.ndarray) -> np.ndarray:
    """In-place binary Moebius butterfly over the last axis."""
    n = v.shape[-1].bit_length() - 1
    lead = v.shape[:-1]
    for i in range(n):
        h = 1 << i
        w = v.reshape(*lead, -1, 2, h)
        w[..., 1, :] ^= w[..., 0, :]
    return v


def fwht(values: np.ndarray) -> np.ndarray:
    """Fast Walsh-Hadamard transform of +-1 (or any integer) vectors.

    Works on the last axis, so a (batch, 2**n) array transforms row-wise.
    """
    return _butterfly_add(np.array(values, dtype=np.int32))


def mobius(bits: np.ndarray) -> np.ndarray:
    """Binary Moebius transform (an involution) on the last axis."""
    return _butterfly_xor(np.array(bits, dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    arity: int
    coefficients: np.ndarray

    def __getitem__(self, omega: int) -> int:
        return int(self.coefficients[omega])

    def __eq__(self, other):
        return (isinstance(other, WalshSpectrum) and self.arity == other.arity
                and np.array_equal(self.coefficients, other.coefficients))


@dataclass(frozen=True, eq=False)
class AutocorrelationSpectrum:
    arity: int
    coefficients: np.ndarray

    def __getitem__(self, a: int) -> int:
        return int(self.coefficients[a])


@dataclass(frozen=True)
class AnfPolynomial:
    """ANF coefficients packed like a truth table: bit ``u`` is ``a_u``."""

    arity: int
    coefficients: int

    @property
    def monomials(self) -> list[int]:
        return [u for u in range(1 << self.arity) if (self.coefficients >> u) & 1]

    @property
    def degree(self) -> int:
        return max((u.bit_count() for u in self.monomials), default=0)

    def __str__(self) -> str:
        return anf_text(self)


def walsh_spectrum(t: TruthTable) -> WalshSpectrum:
    signs = 1 - 2 * t.to_array().astype(np.int32)
    return WalshSpectrum(t.arity, fwht(signs))


def anf(t: TruthTable) -> AnfPolynomial:
    coeffs = mobius(t.to_array())
    return AnfPolynomial(t.arity, TruthTable.from_array(coeffs, t.arity).bits)


def from_anf(p: AnfPolynomial) -> TruthTable:
    values = mobius(TruthTable(p.arity, p.coefficients).to_array())
    return TruthTable.from_array(values, p.arity)


def algebraic_degree(t: TruthTable) -> int:
    return anf(t).degree


def autocorrelation(t: TruthTable) -> AutocorrelationSpectrum:
    """Autocorrelation via the squared Walsh spectrum (Wiener-Khinchin)."""
    spectrum = walsh_spectrum(t).coefficients.astype(np.int64)
    coeffs = fwht(spectrum * spectrum) >> t.arity
    return AutocorrelationSpectrum(t.arity, coeffs.astype(np.int32))


def anf_text(p: AnfPolynomial) -> str:
    """Render as ``"x0x1 + x0x3 + x0 + x1x4 + x1 + x3x4 + 1"``.

    Monomials are ordered as in a lexicographic listing of variable
    names, which puts ``x0x1`` before ``x0`` and the constant ``1`` last.
    """
    terms = []
    for u in sorted(p.monomials, key=_lex_key):
        terms.append("".join(f"x{i}" for i in range(p.arity) if (u >> i) & 1) or "1")
    return " + ".join(terms) if terms else "0"


def _lex_key(u: int) -> tuple:
    variables = tuple(i for i in range(u.bit_length()) if (u >> i) & 1)
    # The sentinel makes a monomial sort after every extension of it.
    return variables + (1 << 10,)


def parse_anf(text: str, arity: int) -> AnfPolynomial:
    """Inverse of :func:`anf_text`; accepts ``+`` or ``^`` separators."""
    coeffs = 0
    text = text.replace("^", "+").replace("$", "").replace("_", "")
    for term in text.split("+"):
        term = term.strip()
        if not term or term == "0":
            continue
        if term == "1":
            u = 0
        else:
            parts = term.split("x")
            if parts[0] != "":
                raise ValueError(f"bad monomial {term!r}")
            u = 0
            for p in parts[1:]:
                i = int(p)
                if i >= arity:
                    raise WrongArity(f"variable x{i} exceeds arity {arity}")
                u |= 1 << i
        coeffs ^= 1 << u
    return AnfPolynomial(arity, coeffs)
