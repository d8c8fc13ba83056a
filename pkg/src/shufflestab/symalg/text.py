"""Canonical text format for polynomials and rational functions.

Printing: monomials in decreasing graded-lex order (earlier symbols in the
symbol order count as larger variables), coefficients as ``p/q``, factors
joined by ``*`` and powers written ``x^n``; e.g. ``-a(1,2) + s(1,1) + h``.

Parsing accepts a superset: any expression built from rationals, symbols,
``+ - * /``, ``^`` with a nonnegative integer exponent, and parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .poly import CHERN, FRAMING, HBAR, Poly, Q, encode, symbol_name
from .ratfun import RatFun


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(mono) -> str:
    parts = []
    for code, e in mono:
        name = symbol_name(code)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    terms = p.sorted_terms()
    if not terms:
        return "0"
    out = []
    for i, (mono, c) in enumerate(terms):
        neg = c < 0
        mag = -c if neg else c
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = _format_monomial(mono)
        else:
            body = f"{_format_coeff(mag)}*{_format_monomial(mono)}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def format_ratfun(r: RatFun) -> str:
    if r.is_poly():
        return format_poly(r.num)
    num = format_poly(r.num)
    den = "*".join(f"({format_poly(f)})" for f in r.den)
    return f"({num})/({den})" if len(r.den) > 1 else f"({num})/{den}"


def format_value(x: Poly | RatFun) -> str:
    return format_ratfun(x) if isinstance(x, RatFun) else format_poly(Poly.coerce(x))


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass
class _Tok:
    kind: str
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),])"
)


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind=None, value=None) -> _Tok:
        t = self.toks[self.i]
        if (kind and t.kind != kind) or (value and t.value != value):
            want = value or kind
            got = t.value or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", t.line, t.col)
        self.i += 1
        return t

    def parse(self):
        r = self.expr()
        t = self.peek()
        if t.kind != "eof":
            raise ParseError(f"unexpected {t.value!r}", t.line, t.col)
        return r

    def expr(self):
        r = self.term()
        while self.peek().value in ("+", "-"):
            op = self.take().value
            rhs = self.term()
            r = r + rhs if op == "+" else r - rhs
        return r

    def term(self):
        r = self.unary()
        while self.peek().value in ("*", "/"):
            t = self.take()
            rhs = self.unary()
            if t.value == "*":
                r = r * rhs
            else:
                if _is_zero(rhs):
                    raise ParseError("division by zero", t.line, t.col)
                if isinstance(rhs, Poly) and rhs.is_constant():
                    r = r * (Q(1) / rhs.constant_value())
                else:
                    r = RatFun.coerce(r) / rhs
        return r

    def unary(self):
        t = self.peek()
        if t.value == "-":
            self.take()
            return -self.unary()
        if t.value == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().value == "^":
            self.take()
            e = self.take("num")
            base = base ** int(e.value)
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return Poly.const(int(t.value))
        if t.value == "(":
            self.take()
            r = self.expr()
            self.take(value=")")
            return r
        if t.kind == "name":
            self.take()
            if t.value == "h":
                return Poly.symbol(encode(HBAR))
            if t.value in ("a", "s"):
                self.take(value="(")
                vertex = int(self.take("num").value)
                self.take(value=",")
                index = int(self.take("num").value)
                self.take(value=")")
                if vertex < 1 or index < 1:
                    raise ParseError("symbol positions are 1-based", t.line, t.col)
                kind = FRAMING if t.value == "a" else CHERN
                return Poly.symbol(encode(kind, vertex, index))
            raise ParseError(f"unknown symbol {t.value!r}", t.line, t.col)
        raise ParseError(f"unexpected {t.value or 'end of input'!r}", t.line, t.col)


def _is_zero(x) -> bool:
    return x.is_zero()


def parse_expr(text: str) -> Poly | RatFun:
    """Parse a polynomial or rational-function expression."""
    r = _Parser(text).parse()
    if isinstance(r, RatFun) and r.is_poly():
        return r.num
    return r


def parse_poly(text: str) -> Poly:
    r = parse_expr(text)
    if isinstance(r, RatFun):
        raise ParseError("expected a polynomial, got a rational function", 1, 1)
    return r


def parse_ratfun(text: str) -> RatFun:
    return RatFun.coerce(parse_expr(text))
