"""Rational functions with a factored denominator.

The denominator is kept as a sorted tuple of polynomials, each normalized to
lex-leading coefficient 1, so the product has leading coefficient 1 as well.
Euler classes produce denominators that are products of linear forms; keeping
them factored lets sums use a cheap least common multiple and lets quotients
cancel by exact division without any factorization.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Iterable, Mapping

from .poly import ONE, SCALAR_TYPES, NotDivisible, Poly, Q, grlex_key, prod


class PolynomialityError(ArithmeticError):
    """A result that must be a polynomial kept a nontrivial denominator."""


class DenominatorVanishes(ZeroDivisionError):
    pass


def _factor_key(p: Poly) -> tuple:
    return tuple((grlex_key(m), c) for m, c in p.sorted_terms())


def normalize_factors(factors: Iterable[Poly]) -> tuple[Fraction, list[Poly]]:
    """Split each factor as lc * monic; drop constants; return (scalar, monic factors)."""
    scalar = Q(1)
    out = []
    for f in factors:
        if f.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if f.is_constant():
            scalar *= f.constant_value()
            continue
        lc, m = f.monic()
        scalar *= lc
        out.append(m)
    return scalar, out


def _cancel(num: Poly, den: list[Poly]) -> tuple[Poly, list[Poly]]:
    if num.is_zero():
        return num, []
    kept = []
    for f in den:
        try:
            num = num.divexact(f)
        except NotDivisible:
            kept.append(f)
    return num, kept


class RatFun:
    """Quotient ``num / prod(den)`` with exact rational coefficients."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly | int | Fraction, den: Iterable[Poly] = (), *, cancel: bool = True):
        num = Poly.coerce(num)
        scalar, factors = normalize_factors(Poly.coerce(f) for f in den)
        if scalar != 1:
            num = num * (Q(1) / scalar)
        if cancel:
            num, factors = _cancel(num, factors)
        if num.is_zero():
            factors = []
        self.num = num
        self.den = tuple(sorted(factors, key=_factor_key))

    @classmethod
    def coerce(cls, x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        return cls(Poly.coerce(x))

    @property
    def denominator(self) -> Poly:
        return prod(self.den)

    @property
    def numerator(self) -> Poly:
        return self.num

    def is_poly(self) -> bool:
        return not self.den

    def as_poly(self) -> Poly:
        if self.den:
            raise PolynomialityError(f"not a polynomial: ({self.num}) / ({self.denominator})")
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # -- arithmetic ---------------------------------------------------
    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den, cancel=False)

    def __add__(self, other):
        other = _as_ratfun(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        c1, c2 = Counter(self.den), Counter(other.den)
        lcm = c1 | c2
        n1 = self.num * prod((lcm - c1).elements())
        n2 = other.num * prod((lcm - c2).elements())
        return RatFun(n1 + n2, lcm.elements())

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_ratfun(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_ratfun(other)
        if other is None:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return RatFun(Poly.const(0))
        # cross-cancel before multiplying out
        n1, d2 = _cancel(self.num, list(other.den))
        n2, d1 = _cancel(other.num, list(self.den))
        return RatFun(n1 * n2, d1 + d2, cancel=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfun(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        return self * RatFun(prod(other.den), (other.num,), cancel=False)

    def __rtruediv__(self, other):
        return RatFun.coerce(other) / self

    def __pow__(self, n: int) -> "RatFun":
        if n < 0:
            return RatFun(1) / (self ** (-n))
        return RatFun(self.num ** n, self.den * n, cancel=False)

    def substitute(self, assignment: Mapping[int, Poly]) -> "RatFun":
        den = [f.substitute(assignment) for f in self.den]
        if any(f.is_zero() for f in den):
            raise DenominatorVanishes("denominator vanishes identically after substitution")
        return RatFun(self.num.substitute(assignment), den)

    def rename(self, mapping: Mapping[int, int]) -> "RatFun":
        return RatFun(self.num.rename(mapping), [f.rename(mapping) for f in self.den], cancel=False)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other) -> bool:
        other = _as_ratfun(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * prod(other.den) == other.num * prod(self.den)

    def __hash__(self):
        raise TypeError("RatFun equality is by cross-multiplication and is not hashable")

    def __str__(self) -> str:
        from .text import format_ratfun

        return format_ratfun(self)

    def __repr__(self) -> str:
        return f"RatFun({self})"


def _as_ratfun(x) -> RatFun | None:
    if isinstance(x, RatFun):
        return x
    if isinstance(x, (Poly, *SCALAR_TYPES)):
        return RatFun(Poly.coerce(x), cancel=False)
    return None


def to_ratfun(x) -> RatFun:
    return RatFun.coerce(x)


def poly_arith(lhs, op: str, rhs):
    """Apply one of ``+ - * /`` (``×``, ``÷``, ``−`` accepted) exactly.

    ``+``, ``-`` and ``*`` of two polynomials give a polynomial; ``/`` always
    gives a reduced RatFun.
    """
    op = {"×": "*", "÷": "/", "−": "-"}.get(op, op)
    if op == "/":
        return RatFun.coerce(lhs) / RatFun.coerce(rhs)
    if op == "+":
        return lhs + rhs
    if op == "-":
        return lhs - rhs
    if op == "*":
        return lhs * rhs
    raise ValueError(f"unknown operator {op!r}")


__all__ = [
    "DenominatorVanishes",
    "PolynomialityError",
    "RatFun",
    "normalize_factors",
    "poly_arith",
    "to_ratfun",
    "ONE",
]
