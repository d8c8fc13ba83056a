from __future__ import annotations

import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

import oracles
from strategies import polys
from shufflestab.symalg import (
    CHERN,
    DenominatorVanishes,
    NotDivisible,
    ParseError,
    Poly,
    PolynomialityError,
    RatFun,
    a,
    encode,
    flag_pushforward,
    format_poly,
    format_value,
    hbar,
    parse_expr,
    parse_poly,
    poly_arith,
    s,
    shuffle_symmetrize,
    substitute,
)

h = hbar()
s1, s2 = s(1, 1), s(1, 2)
SYMS = [s(1, 1), s(1, 2), s(1, 3), a(1, 1), a(1, 2), s(2, 1), h]


def test_poly_arith_examples():
    assert poly_arith(s1 - s2, "×", s1 - s2 + h) == s1**2 - 2 * s1 * s2 + s2**2 + h * s1 - h * s2
    f = s1 * s2 + h
    assert poly_arith(f, "÷", f) == 1
    q = poly_arith(h**2 - (s1 - s2) ** 2, "÷", s1 - s2 + h)
    assert q == h - s1 + s2
    assert q.as_poly() * (s1 - s2 + h) == h**2 - (s1 - s2) ** 2


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        poly_arith(s1, "÷", Poly.const(0))


def test_divexact():
    f = (s1 - a(1, 2) + h) * (s2 - s1) * (a(1, 1) + 2 * h)
    assert f.divexact(s2 - s1) == (s1 - a(1, 2) + h) * (a(1, 1) + 2 * h)
    assert f.divexact((s1 - a(1, 2) + h) * (a(1, 1) + 2 * h)) == s2 - s1
    with pytest.raises(NotDivisible):
        f.divexact(s1 + s2)


def test_canonical_text():
    assert format_poly(s1 - a(1, 2) + h) == "-a(1,2) + s(1,1) + h"
    assert format_poly(Poly.const(0)) == "0"
    assert format_poly(s1 * Poly.const(1) / 2) == "1/2*s(1,1)"
    assert parse_poly("s(1,1) - a(1,2) + h") == s1 - a(1, 2) + h


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_poly("s(1,1) +\n  * h")
    assert (err.value.line, err.value.column) == (2, 3)


@given(polys(SYMS))
def test_print_parse_roundtrip(f):
    assert parse_poly(format_poly(f)) == f


@given(polys(SYMS, max_terms=3), polys([s1, s2, h], max_terms=2, max_degree=1))
def test_ratfun_roundtrip(f, g):
    if g.is_zero():
        return
    r = RatFun(f, [g])
    assert parse_expr(format_value(r)) == r


@given(polys(SYMS, max_terms=3), polys(SYMS, max_terms=3))
def test_multiply_then_divide(f, g):
    if g.is_zero():
        return
    assert (f * g).divexact(g) == f


def test_shuffle_examples():
    split = {1: (1, 1)}
    assert shuffle_symmetrize(RatFun(1, [s1 - s2]), split) == 0
    assert shuffle_symmetrize(RatFun(s1 - s2 + h, [s1 - s2]), split) == 2
    assert shuffle_symmetrize(s1 - s2 + h, split) == 2 * h


def test_shuffle_term_count():
    # sum of 1 counts the coset representatives: binom(4, 2) * binom(3, 1)
    assert shuffle_symmetrize(Poly.const(1), {1: (2, 2), 2: (1, 2)}) == 18


def test_shuffle_checks_symmetry():
    with pytest.raises(ValueError):
        shuffle_symmetrize(s(1, 1), {1: (2, 1)})


def test_shuffle_non_polynomial_reports():
    with pytest.raises(PolynomialityError):
        shuffle_symmetrize(RatFun(s1, [s1 - s2 + h]), {1: (1, 1)})
    r = shuffle_symmetrize(RatFun(s1, [s1 - s2 + h]), {1: (1, 1)}, require_polynomial=False)
    assert isinstance(r, RatFun) and not r.is_poly()


@given(polys([s(1, 1), s(1, 2), s(1, 3), a(1, 1), h], max_terms=3))
def test_shuffle_trivial_split_is_identity(f):
    assert shuffle_symmetrize(f, {1: (3, 0)}, check=False) == f
    assert shuffle_symmetrize(f, {1: (0, 3)}, check=False) == f


def _swap_map(perm):
    codes = [encode(CHERN, 1, i) for i in (1, 2)]
    return {codes[i]: codes[p - 1] for i, p in enumerate(perm)}


@given(polys([s(1, 1), s(1, 2), s(1, 3), a(1, 1), h], max_terms=3), st.permutations([1, 2]))
def test_shuffle_invariant_under_sub_block_permutation(f, perm):
    g = f + f.rename(_swap_map([2, 1]))  # symmetric in the first sub-block
    assert shuffle_symmetrize(g, {1: (2, 1)}) == shuffle_symmetrize(g.rename(_swap_map(perm)), {1: (2, 1)})


def test_flag_pushforward_examples():
    assert flag_pushforward(s1, {1: 2}) == 1
    assert flag_pushforward(Poly.const(1), {1: 2}) == 0


def test_flag_pushforward_output_is_symmetric():
    f = s1**3 * s2 + 2 * s(1, 3) * h
    g = flag_pushforward(f, {1: 3})
    assert g == g.rename(_swap_map([2, 1]))


def _sym(f: Poly) -> sympy.Expr:
    return oracles.to_sympy(format_poly(f))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_flag_pushforward_matches_divided_differences(n):
    xs = [oracles.s(1, i) for i in range(1, n + 1)]
    for exps in itertools.product(range(3), repeat=n):
        if sum(exps) > n + 1:
            continue
        f = Poly.const(1)
        for i, e in enumerate(exps, 1):
            f = f * s(1, i) ** e
        f = f * (h + a(1, 1))
        expected = oracles.longest_element(_sym(f), xs)
        assert sympy.expand(_sym(flag_pushforward(f, {1: n})) - expected) == 0


@given(
    polys([s(1, 1), s(1, 2), s(1, 3), h], max_terms=3),
    st.lists(st.integers(-2, 2), min_size=3, max_size=3),
)
def test_projection_formula(f, cs):
    e1 = s(1, 1) + s(1, 2) + s(1, 3)
    e3 = s(1, 1) * s(1, 2) * s(1, 3)
    g = cs[0] * e1 + cs[1] * e3 + cs[2] * h
    assert flag_pushforward(g * f, {1: 3}) == g * flag_pushforward(f, {1: 3})


def test_flag_pushforward_two_vertices():
    f = s(1, 1) * s(2, 1) ** 2
    assert flag_pushforward(f, {1: 2, 2: 2}) == flag_pushforward(s(1, 1), {1: 2}) * flag_pushforward(
        s(2, 1) ** 2, {2: 2}
    )


def test_substitute_examples():
    f = s1 - a(1, 2) + h
    assert substitute(f, {"s(1,1)": "a(1,1)"}) == a(1, 1) - a(1, 2) + h
    assert substitute(f, {"s(1,1)": "a(1,2)"}) == h
    r = RatFun(s1 - s2, [s1 + s2])
    assert substitute(r, {"s(1,1)": "s(1,2)"}) == 0
    with pytest.raises(DenominatorVanishes):
        substitute(r, {"s(1,1)": -s2})


def test_ratfun_equality_by_cross_multiplication():
    x = RatFun(s1**2 - s2**2, [s1 - s2], cancel=False)
    assert x == s1 + s2
    assert RatFun(1, [s1 - s2]) == RatFun(-1, [s2 - s1])
