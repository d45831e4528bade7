"""Boolean-function property tests, 5-variable affine classes and the CA 5 -> 9 extension."""

from .boolfn import TruthTable, derivative, evaluate, from_binary, from_hex, to_binary, to_hex, weight
from .props import (
    PropertyProfile,
    correlation_immunity_order,
    is_balanced,
    is_nonlinear,
    is_resilient,
    propagation_criterion_order,
    property_profile,
    satisfies_sac,
)
from .transforms import algebraic_degree, anf, anf_text, autocorrelation, from_anf, walsh_spectrum

__version__ = "0.1.0"
