from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from algint.poly import IntPoly, MonicIntPoly, height
from algint.realroots import (
    NonSquarefreeError,
    RationalInterval,
    count_real_roots,
    count_roots_halfopen,
    isolate_roots,
    max_root_bound,
    sturm_chain,
)

F = Fraction
I = RationalInterval  # noqa: E741
monic = lambda *c: MonicIntPoly(c)  # noqa: E731


def bisect_roots(c, lo, hi, steps=60):
    """Independent oracle: sign changes on a fine float grid, then bisection."""
    f = lambda x: sum(a * x**k for k, a in enumerate(c))  # noqa: E731
    m = 4000
    xs = [lo + (hi - lo) * i / m for i in range(m + 1)]
    roots = []
    for a, b in zip(xs, xs[1:]):
        fa, fb = f(a), f(b)
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            for _ in range(steps):
                mid = (a + b) / 2
                if f(a) * f(mid) <= 0:
                    b = mid
                else:
                    a = mid
            roots.append((a + b) / 2)
    return roots


def test_interval_basics():
    iv = I(F(1, 2), 2)
    assert iv.width == F(3, 2)
    assert F(1, 2) in iv and 2 not in iv
    assert str(iv.reflect()) == "[-2, -1/2)"
    assert I.parse("1/2:3/2") == I(F(1, 2), F(3, 2))
    with pytest.raises(ValueError):
        I(1, 1)


def test_sturm_chain_examples():
    ch = sturm_chain(monic(-2, 0))
    assert [p.degree for p in ch.polys] == [2, 1, 0]
    assert ch.polys[-1].leading > 0  # x^2 - 2, x, 1 up to positive factors
    assert sturm_chain(monic(1, 0)).count_between(-100, 100) == 0
    assert sturm_chain(monic(-1, -1)).count_between(-2, 2) == 2


def test_golden_ratio_oracle():
    roots = bisect_roots((-1, -1, 1), -2, 2)
    assert len(roots) == 2 and all(-2 < r <= 2 for r in roots)
    assert sum(0 <= r < 1 for r in roots) == 0
    assert sum(-1 <= r < 0 for r in roots) == 1


def test_count_halfopen_examples():
    assert count_roots_halfopen(monic(-2, 0), I(1, 2)) == 1
    assert count_roots_halfopen(monic(-2, 0), I(-2, 2)) == 2
    # (sqrt5 - 1)/2 is a root of x^2 + x - 1; x^2 - x - 1 has 1.618 and -0.618
    assert count_roots_halfopen(monic(-1, 1), I(0, 1)) == 1
    assert count_roots_halfopen(monic(-1, -1), I(0, 1)) == 0
    assert count_roots_halfopen(monic(-1, -1), I(-1, 0)) == 1


def test_endpoint_corrections():
    # x^2 - 1 has rational roots; [1, 2) holds 1, [-1, 1) holds -1 only
    p = IntPoly((-1, 0, 1))
    assert count_roots_halfopen(p, I(1, 2)) == 1
    assert count_roots_halfopen(p, I(-1, 1)) == 1
    assert count_roots_halfopen(p, I(0, 1)) == 0


def test_non_squarefree_rejected():
    with pytest.raises(NonSquarefreeError):
        count_roots_halfopen(IntPoly((1, -2, 1)), I(0, 2))


def test_isolate_examples():
    ivs = isolate_roots(monic(-2, 0), F(1, 100))
    assert len(ivs) == 2
    neg, pos = ivs
    # exact bracketing of +-sqrt2 at width <= 1/100
    assert pos.lo**2 <= 2 < pos.hi**2 and pos.width <= F(1, 100)
    assert neg.hi**2 < 2 <= neg.lo**2 and neg.width <= F(1, 100)
    assert abs(float(pos.midpoint) - 1.41421356) < 0.01
    assert isolate_roots(monic(1, 0), F(1, 2)) == []
    ivs = isolate_roots(monic(-1, -1), F(1, 1000))
    oracle = sorted(bisect_roots((-1, -1, 1), -3, 3))
    for iv, r in zip(ivs, oracle):
        assert iv.width <= F(1, 1000)
        assert iv.lo - F(1, 10**9) <= F(r) < iv.hi + F(1, 10**9)


def test_max_root_bound_examples():
    assert max_root_bound(monic(-2, 0)) == 3
    assert max_root_bound(monic(-1, -1, 0)) == 2
    assert max_root_bound(monic(-7, 7, 3)) == 8


squarefree_polys = st.lists(st.integers(-20, 20), min_size=2, max_size=6).map(
    lambda c: IntPoly(tuple(c[:-1]) + (c[-1] or 1,))
)


def _is_squarefree(p):
    try:
        sturm_chain(p)
    except NonSquarefreeError:
        return False
    return True


@settings(max_examples=200, deadline=None)
@given(squarefree_polys, st.fractions(-25, 25, max_denominator=50), st.fractions(0, 10, max_denominator=50),
       st.fractions(0, 10, max_denominator=50))
def test_additivity(p, a, w1, w2):
    assume(p.degree >= 1 and _is_squarefree(p) and w1 > 0 and w2 > 0)
    b, c = a + w1, a + w1 + w2
    assert count_roots_halfopen(p, I(a, b)) + count_roots_halfopen(p, I(b, c)) == count_roots_halfopen(p, I(a, c))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=5), st.integers(1, 7))
def test_totality_over_partition(c, pieces):
    p = MonicIntPoly(tuple(c))
    assume(_is_squarefree(p))
    B = height(p) + 1
    cuts = [F(-B) + F(2 * B * i, pieces) for i in range(pieces + 1)]
    total = sum(count_roots_halfopen(p, I(x, y)) for x, y in zip(cuts, cuts[1:]))
    assert total == count_real_roots(p)


@settings(max_examples=100, deadline=None)
@given(squarefree_polys, st.fractions(-21, 21, max_denominator=8), st.fractions(F(1, 8), 10, max_denominator=8))
def test_sturm_agrees_with_isolation(p, a, w):
    assume(p.degree >= 1 and _is_squarefree(p))
    ivs = isolate_roots(p, F(1, 10**6))
    assert len(ivs) == count_real_roots(p)
    for x, y in zip(ivs, ivs[1:]):
        assert x.hi <= y.lo
    window = I(a, a + w)
    # every root isolated to width 1e-6 lies in exactly one cell; only cells
    # straddling an endpoint need a local exact count
    inside = 0
    for iv in ivs:
        if window.lo <= iv.lo and iv.hi <= window.hi:
            inside += 1
        elif iv.lo < window.hi and window.lo < iv.hi:
            inside += count_roots_halfopen(p, I(max(iv.lo, window.lo), min(iv.hi, window.hi)))
    assert inside == count_roots_halfopen(p, window)
