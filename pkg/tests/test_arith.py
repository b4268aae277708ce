from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oscspec.arith import (
    ConstructionError,
    Interval,
    as_rational,
    fmt,
    interval_ops,
    normalize,
)

rationals = st.fractions(max_denominator=10**6)


@pytest.mark.parametrize(
    "num, den, want",
    [(2, 4, F(1, 2)), (5, -10, F(-1, 2)), (0, 7, F(0))],
)
def test_normalize(num, den, want):
    q = normalize(num, den)
    assert q == want and q.denominator > 0
    assert fmt(q) == f"{want.numerator}/{want.denominator}"


def test_normalize_zero_denominator():
    with pytest.raises(ConstructionError):
        normalize(1, 0)


@given(st.integers(), st.integers().filter(bool))
def test_normalize_idempotent(n, d):
    q = normalize(n, d)
    assert normalize(q.numerator, q.denominator) == q


def test_fmt_zero_and_negative():
    assert fmt(F(0)) == "0/1"
    assert fmt(F(-1, 2)) == "-1/2"


@pytest.mark.parametrize("bad", ["0.5", "1e3", "", "x/2", True, 0.5])
def test_as_rational_refuses_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        as_rational(bad)


def test_as_rational_accepts():
    assert as_rational("-3/6") == F(-1, 2)
    assert as_rational(" 7 ") == 7
    assert as_rational(F(1, 3)) == F(1, 3)


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    if a:
        assert a * (1 / a) == 1


def test_closed_touch():
    r = interval_ops(Interval.closed(0, 1), Interval.closed(1, 2))
    assert r.intersection == Interval.closed(1, 1)
    assert not r.disjoint


def test_open_touch_is_disjoint():
    r = interval_ops(Interval.open(0, 1), Interval.closed(1, 2))
    assert r.intersection is None and r.disjoint


def test_window_contains_center():
    w = Interval.open(F(1, 2) - F(1, 512), F(1, 2) + F(1, 512))
    assert w.contains_point(F(1, 2))
    assert not w.contains_point(w.lo)


def test_degenerate_must_be_closed():
    with pytest.raises(ValueError):
        Interval(F(1), F(1), False, True)
    with pytest.raises(ValueError):
        Interval(F(2), F(1))


@st.composite
def intervals(draw):
    lo, hi = sorted([draw(rationals), draw(rationals)])
    if lo == hi:
        return Interval.closed(lo, hi)
    return Interval(lo, hi, draw(st.booleans()), draw(st.booleans()))


@given(intervals(), intervals())
def test_intersection_commutes_and_matches_disjoint(a, b):
    ab, ba = a.intersection(b), b.intersection(a)
    assert ab == ba
    assert a.disjoint(b) == (ab is None)


@given(intervals(), intervals(), rationals)
def test_intersection_membership(a, b, t):
    ab = a.intersection(b)
    inside = a.contains_point(t) and b.contains_point(t)
    assert inside == (ab is not None and ab.contains_point(t))


@given(intervals(), intervals(), intervals())
def test_intersection_associative(a, b, c):
    def meet(x, y):
        return None if x is None or y is None else x.intersection(y)

    assert meet(meet(a, b), c) == meet(a, meet(b, c))


@given(intervals())
def test_interval_json_round_trip(a):
    assert Interval.from_json(a.to_json()) == a
