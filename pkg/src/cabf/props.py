"""Cryptographic property predicates for a single Boolean function."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boolfn import TruthTable, weight
from .transforms import algebraic_degree, autocorrelation, walsh_spectrum


class InvalidOrder(ValueError):
    pass


@lru_cache(maxsize=None)
def weight_shells(arity: int) -> tuple[np.ndarray, ...]:
    """Input differences grouped by Hamming weight; shell ``k`` holds weight ``k``."""
    idx = np.arange(1 << arity)
    counts = np.array([i.bit_count() for i in range(1 << arity)])
    return tuple(idx[counts == k] for k in range(arity + 1))


@dataclass(frozen=True)
class PropertyProfile:
    balanced: bool
    ci1: bool
    sac: bool
    pc_order: int
    degree: int
    nonlinear: bool

    CSV_FIELDS = ("degree", "nonlinear", "balanced", "ci1", "sac", "pc_order")

    def csv_row(self, hex_table: str) -> str:
        values = [hex_table] + [str(int(getattr(self, k))) for k in self.CSV_FIELDS]
        return ",".join(values)


def is_balanced(t: TruthTable) -> bool:
    return 2 * weight(t) == t.size


def _vanishing_order(values: np.ndarray, arity: int) -> int:
    """Largest k such that ``values`` is zero on every shell of weight 1..k."""
    shells = weight_shells(arity)
    for k in range(1, arity + 1):
        if np.any(values[shells[k]] != 0):
            return k - 1
    return arity


def correlation_immunity_order(t: TruthTable) -> int:
    """Xiao-Massey: order k iff the spectrum vanishes on weights 1..k.

    Constants have no nonzero-weight spectrum and report order ``n``.
    """
    return _vanishing_order(walsh_spectrum(t).coefficients, t.arity)


def is_resilient(t: TruthTable, k: int) -> bool:
    if not 1 <= k <= t.arity:
        raise InvalidOrder(f"order must be in [1, {t.arity}], got {k}")
    return is_balanced(t) and correlation_immunity_order(t) >= k


def propagation_criterion_order(t: TruthTable) -> int:
    # A derivative is balanced exactly when its autocorrelation is zero.
    return _vanishing_order(autocorrelation(t).coefficients, t.arity)


def satisfies_sac(t: TruthTable) -> bool:
    return propagation_criterion_order(t) >= 1


def is_nonlinear(t: TruthTable) -> bool:
    return algebraic_degree(t) >= 2


def property_profile(t: TruthTable) -> PropertyProfile:
    spectrum = walsh_spectrum(t).coefficients
    autocorr = autocorrelation(t).coefficients
    degree = algebraic_degree(t)
    pc = _vanishing_order(autocorr, t.arity)
    return PropertyProfile(
        balanced=bool(spectrum[0] == 0),
        ci1=_vanishing_order(spectrum, t.arity) >= 1,
        sac=pc >= 1,
        pc_order=pc,
        degree=degree,
        nonlinear=degree >= 2,
    )
