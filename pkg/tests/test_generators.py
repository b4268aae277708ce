import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscspec.arith import DomainError, Interval
from oscspec.generators import (
    PiecewiseLinear,
    designated_regions,
    evaluate,
    generator_on,
    linear_combine,
    oscillation,
    sup_norm,
    variation_support,
    verify_generators,
)
from oscspec.lattice import ScaleParams, anchor, external_window, words
from oscspec.spectrum import neighborhood

P = ScaleParams()
BREAKPOINTS = [7, 15, 27, 47, 83, 151, 283, 543, 1059, 2087, 4139, 8239]


def test_pl_validation():
    with pytest.raises(ValueError):
        PiecewiseLinear((F(0), F(1, 2)), (F(0), F(0)))
    with pytest.raises(ValueError):
        PiecewiseLinear((F(0), F(1, 2), F(1, 2), F(1)), (F(0),) * 4)
    f = PiecewiseLinear.from_points(["0", "1/2", "1"], ["-1", "1", "-1"])
    assert f(F(1, 4)) == 0 and f(F(1, 2)) == 1
    with pytest.raises(DomainError):
        evaluate(f, F(3, 2))


def test_breakpoint_counts(gens):
    assert [len(gens.phi(m).xs) for m in range(1, 13)] == BREAKPOINTS


def test_generator_values(gens):
    for m in range(1, 13):
        f = gens.phi(m)
        assert f(F(0)) == -1 and f(F(1)) == -1
        assert sup_norm(f) == 1
        assert all(-1 <= y <= 1 for y in f.ys)
        for n in range(2, m + 1):
            assert f(anchor(n)) == 1
            assert oscillation(f, external_window(n, m)) == 2
        assert oscillation(f, external_window(1, m)) == 2


def test_levels_out_of_range(gens):
    with pytest.raises(DomainError):
        gens.phi(0)
    with pytest.raises(DomainError):
        gens.phi(13)


def test_phi1_has_no_bumps(gens):
    f = gens.phi(1)
    regions = variation_support(f)
    assert len(regions) == 2
    assert all(r.lo > 1 - P.eta(1) / 2 for r in regions)


def test_phi2_regions(gens):
    # the bump's two slopes, three gap splices, the terminal ramp
    assert len(variation_support(gens.phi(2))) == 6


def test_constant_has_no_variation():
    assert variation_support(PiecewiseLinear.constant(F(1, 3))) == []
    assert sup_norm(PiecewiseLinear.constant(0)) == 0
    c = PiecewiseLinear.constant(5)
    assert oscillation(c, Interval.closed(F(1, 5), F(2, 5))) == 0


def test_variation_in_designated_regions(gens, tree):
    for m in range(1, 10):
        allowed = designated_regions(tree, m)
        for r in variation_support(gens.phi(m)):
            assert any(r.issubset(a) for a in allowed)


def test_sign_alignment_at_block_points(gens, tree):
    for L in range(1, 7):
        for w in words(L):
            b = tree.block(w)
            for k in range(1, L + 1):
                f = gens.phi(k)
                assert f(b.lo) == f(b.midpoint) == f(b.hi) == w[k - 1]


def test_oscillation_examples(gens):
    assert oscillation(gens.phi(2), neighborhood(F(1, 2), F(1, 10))) == 2
    with pytest.raises(DomainError):
        oscillation(gens.phi(2), Interval.closed(F(2), F(3)))


def test_linear_combine_examples(gens, tree):
    p1, p2 = gens.phi(1), gens.phi(2)
    assert linear_combine([1], [p1]).same_function(p1)
    assert linear_combine([1, -1], [p1, p1]).is_zero()
    half = linear_combine([F(1, 2), F(1, 2)], [p1, p2])
    assert sup_norm(half) == 1
    assert half(tree.block((1, 1)).midpoint) == 1
    with pytest.raises(DomainError):
        linear_combine([1, 2], [p1])


def test_linear_combine_is_linear(gens):
    rng = random.Random(5)
    fs = [gens.phi(m) for m in range(1, 6)]
    coeffs = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in fs]
    g = linear_combine(coeffs, fs)
    points = [F(rng.randint(0, 10**9), 10**9) for _ in range(100)]
    points += [F(1) - F(rng.randint(0, 10**6), 2**30) for _ in range(100)]
    for t in points:
        assert g(t) == sum(a * f(t) for a, f in zip(coeffs, fs))


def test_table_combine_matches_reference(gens):
    rng = random.Random(11)
    for _ in range(5):
        k = rng.randint(1, 10)
        coeffs = [F(rng.randint(-1024, 1024), 1024) for _ in range(k)]
        fast = gens.combine(coeffs)
        ref = linear_combine(coeffs, [gens.phi(m) for m in range(1, k + 1)])
        assert fast.same_function(ref)
        lo, hi = gens.combination_extrema(coeffs)
        assert (lo, hi) == (min(ref.ys), max(ref.ys))


def test_local_generator_agrees_on_window(gens):
    lat = gens.lattice
    rng = random.Random(3)
    for m in (3, 7, 12):
        full = gens.phi(m)
        for _ in range(25):
            a = F(rng.randint(0, 2**40), 2**40)
            if rng.random() < 0.5:
                a = 1 - F(rng.randint(0, 2**20), 2**30)
            b = min(F(1), a + F(rng.randint(1, 2**20), 2**40))
            loc = generator_on(lat, m, a, b)
            pts = sorted({a, b, (a + b) / 2, *[x for x in full.xs if a <= x <= b]})
            assert loc.values_at(pts) == full.values_at(pts)


def test_local_levels_beyond_tree(gens):
    deep = gens.with_max_level(40)
    w = external_window(37, 40)
    assert deep.oscillation(40, w.closure()) == 2
    assert deep.oscillation(40, Interval.closed(F(7, 10), F(71, 100))) == 0
    with pytest.raises(DomainError):
        deep.phi(20)


def test_grid_oracle(gens):
    grid = [F(j, 10**5) for j in range(10**5 + 1)]
    for m in (1, 4, 9):
        f = gens.phi(m)
        on_grid = max(abs(v) for v in f.values_at(grid))
        assert on_grid <= sup_norm(f)
        pts = sorted(set(grid).union(f.xs))
        assert max(abs(v) for v in f.values_at(pts)) == sup_norm(f)


def test_pl_json(gens):
    f = gens.phi(3)
    assert PiecewiseLinear.from_json(json.loads(json.dumps(f.to_json()))) == f


def test_generator_report(gens):
    rep = verify_generators(gens)
    assert rep.passed
    assert [c.status for c in rep.by_anchor("generators.window_at_zero")] == ["discrepancy"]


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=50), min_size=3, max_size=8),
    st.fractions(min_value=0, max_value=1, max_denominator=1000),
    st.fractions(min_value=0, max_value=1, max_denominator=1000),
)
def test_oscillation_by_dense_evaluation(ys, a, b):
    a, b = sorted([a, b])
    xs = [F(i, len(ys) - 1) for i in range(len(ys))]
    f = PiecewiseLinear(tuple(xs), tuple(ys))
    inner = [x for x in xs if a < x < b]
    vals = [f(t) for t in [a, b, *inner]]
    assert oscillation(f, Interval.closed(a, b)) == max(vals) - min(vals)
    assert oscillation(f, Interval.closed(a, b)) >= abs(f(a) - f(b))
