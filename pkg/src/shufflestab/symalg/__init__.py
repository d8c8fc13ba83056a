"""Exact polynomial and rational-function kernels."""

from .poly import (
    CHERN,
    FRAMING,
    HBAR,
    NotDivisible,
    ONE,
    ZERO,
    Poly,
    Symbol,
    a,
    encode,
    decode,
    hbar,
    prod,
    s,
)
from .ratfun import DenominatorVanishes, PolynomialityError, RatFun, poly_arith
from .symmetrize import (
    flag_pushforward,
    full_blocks,
    is_block_symmetric,
    shuffle_symmetrize,
    shuffles,
    split_blocks,
    substitute,
    vandermonde,
)
from .text import ParseError, format_poly, format_ratfun, format_value, parse_expr, parse_poly, parse_ratfun

__all__ = [
    "CHERN",
    "FRAMING",
    "HBAR",
    "DenominatorVanishes",
    "NotDivisible",
    "ONE",
    "ParseError",
    "Poly",
    "PolynomialityError",
    "RatFun",
    "Symbol",
    "ZERO",
    "a",
    "decode",
    "encode",
    "flag_pushforward",
    "format_poly",
    "format_ratfun",
    "format_value",
    "full_blocks",
    "hbar",
    "is_block_symmetric",
    "parse_expr",
    "parse_poly",
    "parse_ratfun",
    "poly_arith",
    "prod",
    "s",
    "shuffle_symmetrize",
    "shuffles",
    "split_blocks",
    "substitute",
    "vandermonde",
]
