"""Sparse multivariate polynomials with exact rational coefficients.

Symbols are the framing parameters ``a(i,k)``, the Chern roots ``s(i,a)``
and the equivariant parameter ``h``.  Internally a symbol is packed into an
integer code whose natural order is the symbol order
(framing < chern < hbar, then vertex, then index), and a monomial is a tuple
of ``(code, exponent)`` pairs sorted by code.
"""

from __future__ import annotations

import heapq

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq
from typing import Callable, Iterable, Iterator, Mapping, Union

FRAMING, CHERN, HBAR = 0, 1, 2
_KIND_NAMES = {FRAMING: "a", CHERN: "s", HBAR: "h"}
_SHIFT = 20
_MASK = (1 << _SHIFT) - 1

Monomial = tuple  # tuple[tuple[int, int], ...]
Scalar = Union[int, Fraction]
Q = mpq
SCALAR_TYPES = (int, Fraction, type(mpq(0)))


def encode(kind: int, vertex: int = 0, index: int = 0) -> int:
    if not (0 <= vertex <= _MASK and 0 <= index <= _MASK):
        raise ValueError(f"symbol position out of range: ({vertex}, {index})")
    return (kind << (2 * _SHIFT)) | (vertex << _SHIFT) | index


def decode(code: int) -> tuple[int, int, int]:
    return code >> (2 * _SHIFT), (code >> _SHIFT) & _MASK, code & _MASK


@dataclass(frozen=True, order=True)
class Symbol:
    """A named variable; ordering follows the canonical symbol order."""

    code: int

    @classmethod
    def framing(cls, vertex: int, index: int) -> "Symbol":
        return cls(encode(FRAMING, vertex, index))

    @classmethod
    def chern(cls, vertex: int, index: int) -> "Symbol":
        return cls(encode(CHERN, vertex, index))

    @classmethod
    def hbar(cls) -> "Symbol":
        return cls(encode(HBAR))

    @property
    def kind(self) -> int:
        return decode(self.code)[0]

    @property
    def vertex(self) -> int:
        return decode(self.code)[1]

    @property
    def index(self) -> int:
        return decode(self.code)[2]

    def __str__(self) -> str:
        return symbol_name(self.code)


def symbol_name(code: int) -> str:
    kind, vertex, index = decode(code)
    if kind == HBAR:
        return "h"
    return f"{_KIND_NAMES[kind]}({vertex},{index})"


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        c1, e1 = m1[i]
        c2, e2 = m2[j]
        if c1 == c2:
            out.append((c1, e1 + e2))
            i += 1
            j += 1
        elif c1 < c2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


_PACK_THRESHOLD = 64


def _packed_mul(a: dict, b: dict) -> dict:
    """Product of two term dicts with monomials packed into integers.

    Each symbol gets a bit field wide enough for the largest exponent of the
    product, so monomial multiplication is integer addition.
    """
    codes = sorted({c for m in a for c, _ in m} | {c for m in b for c, _ in m})
    slot = {c: i for i, c in enumerate(codes)}
    top = max(e for m in a for _, e in m) if any(a) else 0
    top += max(e for m in b for _, e in m) if any(b) else 0
    width = max(top.bit_length(), 1)

    def pack(terms: dict) -> list:
        return [(sum(e << (width * slot[c]) for c, e in m), coeff) for m, coeff in terms.items()]

    pa, pb = pack(a), pack(b)
    out: dict = {}
    get = out.get
    for kb, cb in pb:
        for ka, ca in pa:
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    mask = (1 << width) - 1
    result = {}
    for k, coeff in out.items():
        if not coeff:
            continue
        mono = []
        i = 0
        while k:
            e = k & mask
            if e:
                mono.append((codes[i], e))
            k >>= width
            i += 1
        result[tuple(mono)] = coeff
    return result


def _mono_div(m1: Monomial, m2: Monomial) -> Monomial | None:
    """m1 / m2, or None when m2 does not divide m1."""
    if not m2:
        return m1
    d = dict(m1)
    for c, e in m2:
        have = d.get(c, 0)
        if have < e:
            return None
        if have == e:
            del d[c]
        else:
            d[c] = have - e
    return tuple(sorted(d.items()))


def lex_key(mono: Monomial) -> tuple:
    # Earlier symbols are the larger variables; a larger key means a larger monomial.
    return tuple((-c, e) for c, e in mono)


_AFTER_ALL = (float("inf"), 0)


def rev_lex_key(mono: Monomial) -> tuple:
    """Reverses lex_key order, so a min-heap pops the lex-largest monomial."""
    return tuple((c, -e) for c, e in mono) + (_AFTER_ALL,)


def grlex_key(mono: Monomial) -> tuple:
    return (sum(e for _, e in mono), lex_key(mono))


class NotDivisible(ArithmeticError):
    pass


class Poly:
    """Immutable polynomial over Q in the symbols a(i,k), s(i,a), h."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        if terms:
            self._terms = {m: Q(c) for m, c in terms.items() if c != 0}
        else:
            self._terms = {}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls._raw({(): Q(c)} if c != 0 else {})

    @classmethod
    def symbol(cls, sym: Symbol | int) -> "Poly":
        code = sym.code if isinstance(sym, Symbol) else sym
        return cls._raw({((code, 1),): Q(1)})

    @classmethod
    def coerce(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, SCALAR_TYPES):
            return cls.const(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Poly")

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((), Q(0))

    def codes(self) -> set[int]:
        return {c for m in self._terms for c, _ in m}

    def symbols(self) -> list[Symbol]:
        return [Symbol(c) for c in sorted(self.codes())]

    def degree(self, kinds: Iterable[int] | None = None) -> int:
        """Total degree, optionally counting only symbols of the given kinds.

        The zero polynomial has degree -1.
        """
        if not self._terms:
            return -1
        if kinds is None:
            return max(sum(e for _, e in m) for m in self._terms)
        ks = set(kinds)
        return max(sum(e for c, e in m if (c >> (2 * _SHIFT)) in ks) for m in self._terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e for _, e in m) for m in self._terms}) <= 1

    def leading_term(self) -> tuple[Monomial, Fraction]:
        m = max(self._terms, key=lex_key)
        return m, self._terms[m]

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Q(0))

    # -- arithmetic ---------------------------------------------------
    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __pos__(self) -> "Poly":
        return self

    def __add__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, SCALAR_TYPES):
                other = Poly.const(other)
            else:
                return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, SCALAR_TYPES):
                other = Poly.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SCALAR_TYPES):
            if other == 0:
                return Poly._raw({})
            return Poly._raw({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly._raw({})
        if len(a) < len(b):
            a, b = b, a
        if len(a) * len(b) > _PACK_THRESHOLD:
            return Poly._raw(_packed_mul(a, b))
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = _mono_mul(ma, mb)
                out[m] = get(m, 0) + ca * cb
        return Poly._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, SCALAR_TYPES):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Q(1) / Q(other))
        from .ratfun import RatFun

        if isinstance(other, (Poly, RatFun)):
            return RatFun.coerce(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        from .ratfun import RatFun

        return RatFun.coerce(other) / self

    def divexact(self, other: "Poly") -> "Poly":
        """Exact quotient ``self / other``; raises NotDivisible otherwise."""
        if not other._terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            return self * (Q(1) / other.constant_value())
        if not self._terms:
            return self
        if all(len(m) == 1 and m[0][1] == 1 for m in other._terms):
            return self._divexact_linear(other)
        lm_d, lc_d = other.leading_term()
        rem = dict(self._terms)
        heap = [(rev_lex_key(m), m) for m in rem]
        heapq.heapify(heap)
        quo: dict = {}
        divisor = list(other._terms.items())
        while rem:
            _, lm_r = heapq.heappop(heap)
            if lm_r not in rem:
                continue  # stale entry
            qm = _mono_div(lm_r, lm_d)
            if qm is None:
                raise NotDivisible
            qc = rem[lm_r] / lc_d
            quo[qm] = qc
            for m, c in divisor:
                mm = _mono_mul(qm, m)
                if mm in rem:
                    v = rem[mm] - qc * c
                    if v:
                        rem[mm] = v
                    else:
                        del rem[mm]
                else:
                    rem[mm] = -qc * c
                    heapq.heappush(heap, (rev_lex_key(mm), mm))
        return Poly._raw(quo)

    def _divexact_linear(self, other: "Poly") -> "Poly":
        # other = c*x + r with r free of x: synthetic division in x
        x = min(m[0][0] for m in other._terms)
        c = other._terms[((x, 1),)]
        r = Poly._raw({m: v for m, v in other._terms.items() if m[0][0] != x})
        layers: dict[int, dict] = {}
        for m, v in self._terms.items():
            k = 0
            rest = m
            for i, (code, e) in enumerate(m):
                if code == x:
                    k = e
                    rest = m[:i] + m[i + 1 :]
                    break
            layers.setdefault(k, {})[rest] = v
        top = max(layers)
        inv = Q(1) / c
        quo: dict = {}
        q = Poly._raw({})
        for k in range(top, 0, -1):
            fk = Poly._raw(layers.get(k, {}))
            q = (fk - r * q) * inv
            shift = ((x, k - 1),) if k > 1 else ()
            for m, v in q._terms.items():
                quo[_mono_mul(m, shift)] = v
        if Poly._raw(layers.get(0, {})) != r * q:
            raise NotDivisible
        return Poly._raw(quo)

    def divides(self, other: "Poly") -> bool:
        try:
            other.divexact(self)
        except NotDivisible:
            return False
        return True

    def monic(self) -> tuple[Fraction, "Poly"]:
        """Return (lc, p) with self == lc * p and p's lex-leading coefficient 1."""
        if not self._terms:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        _, lc = self.leading_term()
        if lc == 1:
            return Q(1), self
        inv = Q(1) / lc
        return lc, Poly._raw({m: c * inv for m, c in self._terms.items()})

    # -- substitution -------------------------------------------------
    def rename(self, mapping: Mapping[int, int]) -> "Poly":
        """Rename symbols by code; unmapped symbols are kept."""
        if not mapping:
            return self
        out: dict = {}
        for m, c in self._terms.items():
            nm = tuple(sorted((mapping.get(code, code), e) for code, e in m))
            out[nm] = out.get(nm, 0) + c
        return Poly._raw({m: c for m, c in out.items() if c})

    def substitute(self, assignment: Mapping[int, "Poly"]) -> "Poly":
        """Replace symbols (by code) with polynomials."""
        if not assignment:
            return self
        powers: dict = {}

        def power(code, e):
            key = (code, e)
            if key not in powers:
                powers[key] = assignment[code] ** e
            return powers[key]

        result = Poly._raw({})
        for m, c in self._terms.items():
            kept = []
            term = Poly.const(c)
            for code, e in m:
                if code in assignment:
                    term = term * power(code, e)
                else:
                    kept.append((code, e))
            if kept:
                term = term * Poly._raw({tuple(kept): Q(1)})
            result = result + term
        return result

    def map_coefficients(self, fn: Callable[[Monomial, Fraction], Fraction]) -> "Poly":
        return Poly({m: fn(m, c) for m, c in self._terms.items()})

    # -- comparison ---------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, SCALAR_TYPES):
            return self._terms == ({(): Q(other)} if other != 0 else {})
        from .ratfun import RatFun

        if isinstance(other, RatFun):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __reduce__(self):
        return (Poly, (self._terms,))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        from .text import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({self})"


def a(vertex: int, index: int) -> Poly:
    return Poly.symbol(encode(FRAMING, vertex, index))


def s(vertex: int, index: int) -> Poly:
    return Poly.symbol(encode(CHERN, vertex, index))


def hbar() -> Poly:
    return Poly.symbol(encode(HBAR))


H_CODE = encode(HBAR)
ONE = Poly.const(1)
ZERO = Poly.const(0)


def prod(factors: Iterable[Poly]) -> Poly:
    out = ONE
    for f in factors:
        out = out * f
    return out
