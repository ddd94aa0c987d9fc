"""Exact epsilon-function analysis on generalized Cartan-Hartogs domains."""

from .algebra import BiPoly, PoleError, RationalFunction, UniPoly
from .domains import (
    DomainError,
    DomainSpec,
    Factor,
    IrreducibleDomainParams,
    alpha_threshold,
    ball,
    cartan_catalog,
    make_spec,
    thullen,
    validate_spec,
)
from .epsilon import (
    AlphaError,
    NotPolynomialError,
    Status,
    balanced_check,
    berezin_report,
    epsilon_coeffs,
    epsilon_series,
    polynomiality_check,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaError", "BiPoly", "DomainError", "DomainSpec", "Factor", "IrreducibleDomainParams",
    "NotPolynomialError", "PoleError", "RationalFunction", "Status", "UniPoly", "alpha_threshold",
    "balanced_check", "ball", "berezin_report", "cartan_catalog", "epsilon_coeffs", "epsilon_series",
    "make_spec", "polynomiality_check", "thullen", "validate_spec",
]
