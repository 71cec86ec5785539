from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import GF4, GF5, GF8, GF13, GF16, GF25, Q

from leonard.errors import DivisionByZero, FieldMismatch, InvalidInput
from leonard.field import (
    FieldDescriptor,
    is_irreducible,
    solve_quadratic,
    sqrt,
    trace_to_prime_field,
)

FINITE = [GF4, GF5, GF8, GF13, GF16, GF25, FieldDescriptor.prime(3), FieldDescriptor.prime(7)]


def test_rational_addition():
    assert Q("3/2") + Q("1/6") == Q(Fraction(5, 3))
    assert str(Q("3/2") + Q("1/6")) == "5/3"


def test_prime_field_product():
    assert GF13(8) * GF13(5) == GF13(1)


def test_extension_reduction():
    t = GF4([0, 1])
    assert t * t == GF4([1, 1])
    assert str(t * t) == "[1,1]"


@pytest.mark.parametrize("f, char", [(Q, 0), (GF13, 13), (GF4, 2), (GF25, 5)])
def test_characteristic(f, char):
    assert f.characteristic == char


def test_sqrt_picks_smaller_representative():
    assert sqrt(GF13(4)) == GF13(2)
    assert sqrt(Q("9/4")) == Q("3/2")
    assert sqrt(GF13(5)) is None
    assert sqrt(Q(-1)) is None
    assert sqrt(Q(2)) is None


def test_gf13_nonresidues_match_exhaustive_squaring():
    squares = {x * x for x in GF13.elements()}
    for a in GF13.elements():
        assert (sqrt(a) is not None) == (a in squares)


def test_solve_quadratic_rational():
    assert solve_quadratic(Q(-5), Q(6)) == {Q(2), Q(3)}
    assert solve_quadratic(Q(0), Q(1)) == frozenset()
    assert solve_quadratic(Q(-2), Q(1)) == {Q(1)}


def test_characteristic_two_quadratic_uses_trace():
    # x^2 + x + c has a root in GF(2^m) exactly when Tr(c) = 0.
    for f in (GF4, GF8, GF16):
        one = f.one()
        for c in f.elements():
            roots = solve_quadratic(one, c)
            assert bool(roots) == (not trace_to_prime_field(c))
            for r in roots:
                assert r * r + r + c == 0


def test_division_by_zero_is_named():
    with pytest.raises(DivisionByZero):
        GF13(3) / GF13(0)
    with pytest.raises(ZeroDivisionError):
        Q(1) / Q(0)


def test_mixing_fields_is_rejected():
    with pytest.raises(FieldMismatch):
        GF13(1) + GF5(1)


def test_parse_rejects_decimals():
    with pytest.raises(InvalidInput):
        Q.parse("0.5")
    assert Q.parse("-7/14") == Q(Fraction(-1, 2))
    assert GF4.parse("[1,1]") == GF4([1, 1])


def test_reducible_modulus_rejected():
    assert not is_irreducible((1, 0, 1), 2)
    with pytest.raises(InvalidInput):
        FieldDescriptor.extension(2, [1, 0, 1])


@pytest.mark.parametrize("f", FINITE, ids=str)
def test_field_axioms_exhaustive(f):
    els = list(f.elements())
    assert len(els) == f.order
    for a in els:
        assert a + (-a) == f.zero()
        if a:
            assert a * a.inverse() == f.one()
            assert a ** (f.order - 1) == f.one()


@pytest.mark.parametrize("f", FINITE, ids=str)
def test_every_square_root_squares_back(f):
    for a in f.elements():
        r = sqrt(a)
        squares_to_a = [x for x in f.elements() if x * x == a]
        if r is None:
            assert not squares_to_a
        else:
            assert r * r == a
            assert r == min(squares_to_a, key=lambda x: x.sort_key())


@pytest.mark.parametrize("f", FINITE, ids=str)
def test_quadratic_roots_match_brute_force(f):
    els = list(f.elements())
    for b in els[:7]:
        for c in els:
            expected = {x for x in els if x * x + b * x + c == 0}
            assert solve_quadratic(b, c) == expected


def test_json_round_trip():
    for f in [Q, GF13, GF4, GF25]:
        assert FieldDescriptor.from_json(f.to_json()) == f
        for x in ([f(3), f(-2)] if not f.is_finite else list(f.elements())[:9]):
            assert f.parse(str(x)) == x


fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10**6)


@given(fractions, fractions, fractions)
def test_rational_ring_laws(a, b, c):
    x, y, z = Q(a), Q(b), Q(c)
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert (x - y) + y == x


@settings(max_examples=200)
@given(st.lists(st.integers(0, 1), min_size=4, max_size=4), st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_gf16_distributive_and_frobenius(u, v):
    a, b = GF16(u), GF16(v)
    assert (a + b) ** 2 == a**2 + b**2
    assert a * (a + b) == a * a + a * b


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_prime_field_matches_modular_integers(m, n):
    assert GF13(m) * GF13(n) == GF13((m * n) % 13)
    assert GF13(m) - GF13(n) == GF13((m - n) % 13)
