"""Shuffle symmetrization, full flag pushforward and substitution."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from typing import Iterable, Iterator, Mapping, Sequence

from .poly import CHERN, NotDivisible, Poly, Q, encode, prod, s
from .ratfun import PolynomialityError, RatFun, normalize_factors

log = logging.getLogger(__name__)

Dims = Mapping[int, int]  # vertex -> block size


def _chern_map(vertex: int, perm: Sequence[int]) -> dict[int, int]:
    # position p (1-based) is sent to perm[p-1]
    return {
        encode(CHERN, vertex, p + 1): encode(CHERN, vertex, q)
        for p, q in enumerate(perm)
        if p + 1 != q
    }


def shuffles(n1: int, n2: int) -> Iterator[tuple[int, ...]]:
    """Minimal-length coset representatives of (S_n1 x S_n2) in S_(n1+n2).

    Each representative is given as the image of positions 1..n1+n2: the
    first sub-block goes to an increasing subset, the second to its
    complement in increasing order.  Subsets come in lexicographic order.
    """
    n = n1 + n2
    for first in itertools.combinations(range(1, n + 1), n1):
        chosen = set(first)
        yield first + tuple(i for i in range(1, n + 1) if i not in chosen)


def _product_maps(per_vertex: list[list[dict[int, int]]]) -> Iterator[dict[int, int]]:
    for combo in itertools.product(*per_vertex):
        merged: dict[int, int] = {}
        for m in combo:
            merged.update(m)
        yield merged


def is_block_symmetric(f: Poly | RatFun, blocks: Mapping[int, Iterable[Sequence[int]]]) -> bool:
    """Check invariance under adjacent transpositions inside each block.

    ``blocks`` maps a vertex to a list of index runs, e.g. ``{1: [(1, 2), (3,)]}``.
    """
    for vertex, runs in blocks.items():
        for run in runs:
            run = list(run)
            for x, y in zip(run, run[1:]):
                cx, cy = encode(CHERN, vertex, x), encode(CHERN, vertex, y)
                if f.rename({cx: cy, cy: cx}) != f:
                    return False
    return True


def full_blocks(dims: Dims) -> dict[int, list[tuple[int, ...]]]:
    return {i: [tuple(range(1, n + 1))] for i, n in dims.items() if n > 1}


def split_blocks(split: Mapping[int, tuple[int, int]]) -> dict[int, list[tuple[int, ...]]]:
    out = {}
    for i, (n1, n2) in split.items():
        out[i] = [tuple(range(1, n1 + 1)), tuple(range(n1 + 1, n1 + n2 + 1))]
    return out


def _sum_over_maps(f: RatFun, maps: Iterable[dict[int, int]]) -> tuple[Poly, list[Poly]]:
    """Numerator and denominator factors of the sum of f renamed by each map."""
    terms = []
    for m in maps:
        num = f.num.rename(m)
        scalar, den = normalize_factors(d.rename(m) for d in f.den)
        terms.append((num, Q(1) / scalar, Counter(den)))
    lcm: Counter = Counter()
    for _, _, den in terms:
        lcm |= den
    total = Poly.const(0)
    for num, scale, den in terms:
        extra = prod((lcm - den).elements())
        total = total + num * extra * scale
    return total, list(lcm.elements())


def _divide_out(total: Poly, factors: list[Poly], what: str, f: RatFun) -> Poly:
    for d in factors:
        try:
            total = total.divexact(d)
        except NotDivisible:
            log.error("%s kernel: (%s)/(%s); stuck at factor %s", what, f.num, f.denominator, d)
            raise PolynomialityError(
                f"{what}: denominator factor ({d}) did not cancel; kernel numerator ({f.num}), "
                f"denominator ({f.denominator})"
            ) from None
    return total


def shuffle_symmetrize(
    f: Poly | RatFun,
    split: Mapping[int, tuple[int, int]],
    *,
    check: bool = True,
    require_polynomial: bool = True,
) -> Poly | RatFun:
    """Sum of f over shuffles of each vertex block into two sub-blocks.

    ``split`` maps vertex i to ``(n1, n2)``: s(i,1..n1) form the first
    sub-block and s(i,n1+1..n1+n2) the second.  The sum has prod binom(n, n1)
    terms.  By default it must be a polynomial; with
    ``require_polynomial=False`` surviving denominator factors are returned
    as a reduced RatFun.
    """
    f = RatFun.coerce(f)
    if check and not is_block_symmetric(f, split_blocks(split)):
        raise ValueError("input is not symmetric within the sub-blocks of the split")
    per_vertex = []
    for vertex, (n1, n2) in sorted(split.items()):
        if n1 and n2:
            per_vertex.append([_chern_map(vertex, p) for p in shuffles(n1, n2)])
    if not per_vertex:
        return f.as_poly() if require_polynomial else _simplify(f)
    total, lcm = _sum_over_maps(f, _product_maps(per_vertex))
    if require_polynomial:
        return _divide_out(total, lcm, "shuffle_symmetrize", f)
    return _simplify(RatFun(total, lcm))


def _simplify(r: RatFun) -> Poly | RatFun:
    return r.num if r.is_poly() else r


def _sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def vandermonde(vertex: int, n: int) -> Poly:
    """prod over 1 <= a < b <= n of (s(i,a) - s(i,b))."""
    return prod(s(vertex, x) - s(vertex, y) for x, y in itertools.combinations(range(1, n + 1), 2))


def flag_pushforward(f: Poly, dims: Dims) -> Poly:
    """Sum over prod_i S_(v_i) of w.(f / prod_i prod_(a<b) (s(i,a) - s(i,b)))."""
    f = Poly.coerce(f)
    per_vertex, vertices = [], []
    for vertex, n in sorted(dims.items()):
        if n > 1:
            perms = list(itertools.permutations(range(1, n + 1)))
            per_vertex.append([(_chern_map(vertex, p), _sign(p)) for p in perms])
            vertices.append((vertex, n))
    if not per_vertex:
        return f
    total = Poly.const(0)
    for combo in itertools.product(*per_vertex):
        m: dict[int, int] = {}
        sign = 1
        for part, sg in combo:
            m.update(part)
            sign *= sg
        term = f.rename(m)
        total = total + (term if sign > 0 else -term)
    # antisymmetric sum / prod of Vandermondes, one linear factor at a time
    factors = []
    for vertex, n in vertices:
        factors.extend(s(vertex, x) - s(vertex, y) for x, y in itertools.combinations(range(1, n + 1), 2))
    return _divide_out(total, factors, "flag_pushforward", RatFun(f, factors, cancel=False))


def substitute(f: Poly | RatFun, assignment: Mapping) -> Poly | RatFun:
    """Substitute symbols (Symbol, code or text name) by polynomials (weights).

    Polynomials stay polynomials; a rational function raises
    DenominatorVanishes if its denominator becomes identically zero.
    """
    amap = {}
    for k, v in assignment.items():
        amap[_as_code(k)] = Poly.coerce(v) if not isinstance(v, str) else _parse(v)
    if isinstance(f, Poly):
        return f.substitute(amap)
    r = f.substitute(amap)
    return r.num if r.is_poly() else r


def _as_code(k) -> int:
    from .poly import Symbol

    if isinstance(k, Symbol):
        return k.code
    if isinstance(k, int):
        return k
    if isinstance(k, Poly):
        (code,) = k.codes()
        return code
    if isinstance(k, str):
        (code,) = _parse(k).codes()
        return code
    raise TypeError(f"cannot interpret {k!r} as a symbol")


def _parse(text: str) -> Poly:
    from .text import parse_poly

    return parse_poly(text)
