import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algint import census
from algint.census import (
    BudgetExceededError,
    EmptyCensusError,
    InvalidBinsError,
    ResidualModel,
    certify_root_bound,
    compare_census_to_integral,
    count_reducible,
    nearest_to_rational,
    root_distance,
    run_census,
    signs_at,
    uniform_bins,
    whole_line_bin,
)
from algint.poly import MonicIntPoly, eval_exact, is_irreducible
from algint.realroots import RationalInterval, count_roots_halfopen, isolate_roots

F = Fraction
I = RationalInterval  # noqa: E741


def oracle_census(n, Q, bins):
    """Per-polynomial irreducibility test and Sturm count."""
    omega = [0] * len(bins)
    N = [[0] * n for _ in bins]
    red = 0
    for c in product(range(-Q, Q + 1), repeat=n):
        p = MonicIntPoly(c)
        if not is_irreducible(p):
            red += 1
            continue
        for b, iv in enumerate(bins):
            k = count_roots_halfopen(p, iv)
            omega[b] += k
            if k:
                N[b][k - 1] += 1
    return omega, N, red


def test_quadratic_q1_hand_enumeration():
    # the 9 polynomials x^2 + a x + b, |a|, |b| <= 1; reducible: x^2, x^2 +- x, x^2 - 1
    reducible = {(0, 0), (0, 1), (0, -1), (-1, 0)}
    real_roots = 0
    for b, a in product((-1, 0, 1), repeat=2):
        if (b, a) in reducible:
            continue
        disc = a * a - 4 * b
        real_roots += 2 if disc > 0 else 0
    assert real_roots == 4
    t = run_census(2, 1, [whole_line_bin(1)])
    assert t.omega == [4]
    assert (t.irreducible_count, t.reducible_count) == (5, 4)
    assert count_reducible(2, 1) == 4
    assert run_census(2, 1, [I(0, 1)]).omega == [1]


def test_symmetric_bins_example():
    t = run_census(2, 5, [I(1, 2), I(-2, -1)])
    assert t.omega[0] == t.omega[1] > 0


@pytest.mark.parametrize(
    "n,Q,bins",
    [
        (2, 4, uniform_bins(4)),
        (2, 6, [I(F(-7, 3), F(1, 7)), I(F(1, 7), 3), I(5, 9)]),
        (3, 3, uniform_bins(3, F(1, 3))),
        (4, 2, uniform_bins(2, 1)),
        (5, 1, [I(-2, 0), I(0, F(1, 2)), I(F(1, 2), 2)]),
    ],
)
def test_census_matches_per_polynomial_oracle(n, Q, bins):
    omega, N, red = oracle_census(n, Q, bins)
    t = run_census(n, Q, bins)
    assert t.omega == omega
    assert t.N == N
    assert t.reducible_count == red
    t.check_invariants()


def test_invariants_and_root_bound():
    for n, Q in [(2, 7), (3, 4), (4, 2)]:
        t = run_census(n, Q)
        t.check_invariants()
        assert t.roots_outside == 0
        assert t.max_abs_root_upper < Q + 1
        assert t.omega_total % 2 == 0


def test_max_abs_root_upper_is_tight():
    Q = 6
    best = F(0)
    for c in product(range(-Q, Q + 1), repeat=2):
        p = MonicIntPoly(c)
        if is_irreducible(p):
            for iv in isolate_roots(p, F(1, 2**24)):
                best = max(best, abs(iv.lo), abs(iv.hi))
    t = run_census(2, Q)
    assert best - F(1, 2**18) <= t.max_abs_root_upper < Q + 1


def test_bin_additivity():
    Q = 5
    parts = [I(-3, F(-1, 2)), I(F(-1, 2), F(2, 3)), I(F(2, 3), 4)]
    merged = run_census(3, Q, [I(-3, 4)])
    split = run_census(3, Q, parts)
    assert merged.omega[0] == sum(split.omega)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 6), st.fractions(F(-7), F(6), max_denominator=7), st.fractions(F(1, 7), F(3), max_denominator=7))
def test_reflection_symmetry(Q, lo, w):
    iv = I(lo, lo + w)
    a = run_census(2, Q, [iv]).omega[0]
    b = run_census(2, Q, [iv.reflect()]).omega[0]
    assert a == b


def test_parallel_and_shard_determinism():
    bins = uniform_bins(4, F(1, 3))
    a = run_census(3, 4, bins, jobs=1, shard_depth=1)
    b = run_census(3, 4, bins, jobs=2, shard_depth=2)
    assert a == b


def test_shard_depth_two_mask_degree_four():
    for pre in census.shard_prefixes(4, 2, 2):
        rows = census.shard_rows(4, 2, pre)
        mask = census.reducible_mask(4, 2, pre)
        for r, m in zip(rows, mask):
            assert m == (not is_irreducible(MonicIntPoly(tuple(int(x) for x in r[:-1]))))


def test_signs_exact_for_large_denominators():
    rows = census.shard_rows(3, 3, (1,))
    pts = [F(-4), F(1, 2**40), F(3, 2**41 + 1), F(4)]
    s = signs_at(rows, pts, 3)
    for r, srow in zip(rows[::17], s[::17]):
        p = MonicIntPoly(tuple(int(x) for x in r[:-1]))
        for x, sv in zip(pts, srow):
            v = eval_exact(p, x)
            assert sv == (v > 0) - (v < 0)


def test_reducible_counts_against_brute_force():
    for n, Q in [(2, 5), (3, 3), (4, 3), (5, 2)]:
        bf = sum(not is_irreducible(MonicIntPoly(c)) for c in product(range(-Q, Q + 1), repeat=n))
        assert count_reducible(n, Q) == bf


def quadratic_reducible_closed(Q):
    """Distinct {r, s} with |r + s| <= Q and |r s| <= Q, plus the c = 0 family."""
    pairs = set()
    for r in range(-2 * Q - 1, 2 * Q + 2):
        for s in range(r, 2 * Q + 2):
            if abs(r + s) <= Q and abs(r * s) <= Q:
                pairs.add((r, s))
    return len(pairs)


@pytest.mark.parametrize("Q", [1, 10, 37, 100])
def test_reducible_quadratics_closed_count(Q):
    assert count_reducible(2, Q) == quadratic_reducible_closed(Q)


def test_budget_and_bins_errors():
    with pytest.raises(BudgetExceededError):
        run_census(5, 100)
    with pytest.raises(BudgetExceededError):
        count_reducible(3, 10, budget=100)
    with pytest.raises(InvalidBinsError):
        run_census(2, 3, [I(0, 2), I(1, 3)])
    with pytest.raises(ValueError):
        run_census(6, 1)


def oracle_nearest(n, Q, x0):
    best = None
    for c in product(range(-Q, Q + 1), repeat=n):
        p = MonicIntPoly(c)
        if is_irreducible(p):
            for iv in isolate_roots(p, F(1, 2**40)):
                d = min(abs(iv.lo - x0), abs(iv.hi - x0))
                best = d if best is None else min(best, d)
    return best


def test_nearest_examples():
    d = nearest_to_rational(2, 10, 0)
    assert d >= F(1, 11)
    d = nearest_to_rational(2, 1, 0)
    assert abs(float(d) - (math.sqrt(5) - 1) / 2) < 1e-9


@pytest.mark.parametrize("n,Q,x0", [(2, 4, F(0)), (2, 5, F(1, 2)), (3, 3, F(1, 3)), (3, 2, F(2, 3))])
def test_nearest_matches_isolation_oracle(n, Q, x0):
    d = nearest_to_rational(n, Q, x0)
    assert abs(d - oracle_nearest(n, Q, x0)) < F(1, 10**9)


def test_nearest_scale_half():
    vals = [nearest_to_rational(2, Q, F(1, 2)) * 4 * Q for Q in (50, 100)]
    assert min(vals) > 0.5
    assert max(vals) / min(vals) < 1.5


def test_root_distance_lower_bound():
    d = root_distance((-2, 0, 1), F(1), F(1))
    assert d <= F(math.sqrt(2) - 1) and F(math.sqrt(2) - 1) - d < F(1, 10**9)
    assert root_distance((1, 0, 1), 0, 5) is None


def test_certify_root_bound():
    r = certify_root_bound(3, 8)
    assert r.violations == 0 and r.checked == run_census(3, 8, [whole_line_bin(8)]).irreducible_count


def test_compare_degenerate_and_mismatch():
    t = run_census(2, 3, [I(10, 12), I(-2, 2)])
    rows = compare_census_to_integral(t, [0.0, 1.0])
    assert rows[0].omega == 0 and rows[0].residual == 0
    with pytest.raises(ValueError):
        compare_census_to_integral(t, [0.0])


def test_residual_model():
    assert ResidualModel(2).delta == 1 and ResidualModel(3).delta == 0
    assert ResidualModel(2).order(10) == pytest.approx(10 * math.log(10))
    assert ResidualModel(4).order(10) == 1000


def test_jobs_env(monkeypatch):
    monkeypatch.setenv("ALGINT_JOBS", "3")
    assert census.resolve_jobs() == 3
    assert census.resolve_jobs(1) == 1
    with pytest.raises(ValueError):
        census.resolve_jobs(0)


def test_no_roots_error():
    # degree-2 census always has real algebraic integers; monkeypatched empty shard forces the error path
    orig = census._gap_shard
    try:
        census._gap_shard = lambda task: (None, None)
        with pytest.raises(EmptyCensusError):
            nearest_to_rational(2, 1, 0)
    finally:
        census._gap_shard = orig
