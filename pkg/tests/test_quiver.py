from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shufflestab.quiver import (
    DimensionError,
    GradeSplit,
    KClass,
    Quiver,
    ZeroEulerClass,
    a1_quiver,
    a2_quiver,
    class_gauge,
    class_trep,
    euler,
    grade_part,
    jordan_quiver,
    normal_split,
    tangent_naka,
)
from shufflestab.symalg import CHERN, Poly, RatFun, a, encode, hbar, s

h = hbar()


def test_quiver_json_roundtrip(tmp_path):
    q = Quiver.from_json({"vertices": ["x", "y"], "arrows": [["x", "y"], ["y", "y"], ["x", "y"]]})
    assert q.adjacency() == [[0, 2], [0, 1]]
    path = tmp_path / "q.json"
    path.write_text(json.dumps(q.to_json()))
    assert Quiver.load(path) == q


def test_quiver_rejects_unknown_vertex():
    with pytest.raises(ValueError):
        Quiver.from_json({"vertices": [1], "arrows": [[1, 2]]})


def test_dimvec_length_checked():
    with pytest.raises(DimensionError):
        class_trep(a1_quiver(), (1, 1), (1,))


def test_class_trep_examples():
    s1 = s(1, 1)
    expected = KClass([a(1, 1) - s1, a(1, 2) - s1, s1 - a(1, 1) + h, s1 - a(1, 2) + h])
    assert class_trep(a1_quiver(), (1,), (2,)) == expected
    assert class_trep(jordan_quiver(), (1,), (0,)) == KClass([Poly.const(0), h])
    assert class_trep(a2_quiver(), (0, 0), (3, 1)) == KClass()


def test_class_gauge_examples():
    s1, s2 = s(1, 1), s(1, 2)
    q = a1_quiver()
    assert class_gauge(q, (2,), h) == KClass([h, h, s1 - s2 + h, s2 - s1 + h])
    assert class_gauge(q, (1,), 0) == KClass([Poly.const(0)])
    assert class_gauge(q, (0,), h) == KClass()


def test_grade_part_examples():
    q = a1_quiver()
    trep = class_trep(q, (1,), (2,))
    s1 = s(1, 1)
    assert grade_part(trep, GradeSplit((1,), (0,), (1,), (1,)), -1) == KClass([s1 - a(1, 2) + h])
    assert grade_part(trep, GradeSplit((0,), (1,), (1,), (1,)), -1) == KClass([a(1, 1) - s1])
    assert grade_part(trep, GradeSplit((1,), (0,), (2,), (0,)), -1) == KClass()


def test_euler_examples():
    s1, s2 = s(1, 1), s(1, 2)
    assert euler(KClass([h, h, s1 - s2 + h, s2 - s1 + h])) == h**2 * (h**2 - (s1 - s2) ** 2)
    assert euler(KClass()) == 1
    assert euler(KClass({s1: 1, s2: -1})) == RatFun(s1, [s2])
    assert euler(KClass({Poly.const(0): 1, s1: -1})) == 0
    with pytest.raises(ZeroEulerClass):
        euler(KClass({Poly.const(0): -1}))


def test_tangent_examples():
    t = tangent_naka(a1_quiver(), (1,), (2,))
    assert t.rank == 2
    at = t.substitute({encode(CHERN, 1, 1): a(1, 1)})
    assert at == KClass([a(1, 2) - a(1, 1), a(1, 1) - a(1, 2) + h])
    assert tangent_naka(a1_quiver(), (0,), (3,)).rank == 0


QUIVERS = [a1_quiver(), jordan_quiver(), a2_quiver(), Quiver((1, 2), ((1, 2), (2, 1), (1, 1)))]
small = st.integers(0, 2)


@st.composite
def quiver_split(draw):
    q = draw(st.sampled_from(QUIVERS))
    vec = lambda: tuple(draw(small) for _ in range(q.n))  # noqa: E731
    return q, GradeSplit(vec(), vec(), vec(), vec())


@given(quiver_split())
def test_trep_rank_formula(qs):
    q, split = qs
    v, w = split.v, split.w
    expected = 2 * (sum(v[t - 1] * v[hd - 1] for t, hd in q.arrows) + sum(x * y for x, y in zip(v, w)))
    assert class_trep(q, v, w).rank == expected


@given(quiver_split())
def test_grade_parts_partition(qs):
    q, split = qs
    for c in (class_trep(q, split.v, split.w), class_gauge(q, split.v, h)):
        parts = [grade_part(c, split, d) for d in (-1, 0, 1)]
        assert parts[0] + parts[1] + parts[2] == c


@given(quiver_split())
def test_gauge_decomposition(qs):
    q, split = qs
    g = class_gauge(q, split.v, h)
    zero = grade_part(g, split, 0)
    own = class_gauge(q, split.v1, h).rank + class_gauge(q, split.v2, h).rank
    assert zero.rank == own
    assert grade_part(g, split, -1).rank == grade_part(g, split, 1).rank == sum(
        x * y for x, y in zip(split.v1, split.v2)
    )


@given(quiver_split())
def test_normal_split_is_graded_tangent(qs):
    q, split = qs
    parts = normal_split(q, split)
    t = tangent_naka(q, split.v, split.w)
    assert parts.n_minus == grade_part(t, split, -1)
    assert parts.n_plus == grade_part(t, split, 1)


@given(st.lists(st.sampled_from([s(1, 1), s(1, 2) + h, a(1, 1) - s(1, 1), h]), max_size=4),
       st.lists(st.sampled_from([s(1, 2), a(1, 2) + h]), max_size=3))
def test_euler_multiplicative(xs, ys):
    c1, c2 = KClass(xs), KClass(ys)
    assert euler(c1 + c2) == euler(c1) * euler(c2)


def test_tangent_weights_pair_up():
    # u and -u + h at each T*P^1 fixed point
    t = tangent_naka(a1_quiver(), (1,), (2,))
    for k in (1, 2):
        ws = t.substitute({encode(CHERN, 1, 1): a(1, k)}).weights()
        (u,) = [w for w in ws if not w.codes() & h.codes()]
        assert sorted(ws, key=str) == sorted([u, h - u], key=str)
