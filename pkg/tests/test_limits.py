import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algint.density import omega, phi, phi_value
from algint.limits import (
    NoRootError,
    convergence_profile,
    fit_regime_constants,
    g_measure,
    gamma,
    idiff,
    inner_equation,
    j1,
    outer_equation,
    phi_tail_constant,
    regime_of,
    stick_threshold,
    quadratic_idiff_leading,
    thresholds,
    whole_line_ratio,
)

F = Fraction


def test_threshold_examples():
    ts = thresholds(2, 0.1)
    assert ts.kind == "quadratic"
    assert ts[3] == pytest.approx(1 / math.sqrt(0.1), abs=1e-12)
    assert ts[1] < ts[2] <= ts[3] <= ts[4] < ts[5]
    g = thresholds(3, 0.01)
    assert 100 < g[3] < 101
    gaps = [abs(thresholds(3, xi)[2] - 1 / xi) for xi in (0.01, 0.005)]
    assert max(gaps) <= 3 and abs(gaps[0] - gaps[1]) <= 0.1


def test_threshold_domain_errors():
    with pytest.raises(NoRootError):
        thresholds(3, 0.2)
    with pytest.raises(NoRootError):
        thresholds(2, 0.3)
    with pytest.raises(ValueError):
        thresholds(3, 0.01, "quadratic")


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 5), st.floats(1e-4, 0.124))
def test_general_thresholds_solve_their_equations(n, xi):
    t1, t2, t3 = thresholds(n, xi, "general").values
    assert abs(inner_equation(n, xi, t1)) <= 1e-10
    assert abs(inner_equation(n, xi, t2)) <= 1e-10
    assert abs(outer_equation(n, xi, t3)) <= 1e-10
    assert 1 < t1 < t2 < 1 / xi < t3 <= 1 / xi + 1


def test_j1_examples():
    assert j1(3, F(1, 25), 16).exact == F(4, 25)
    assert j1(4, F(1, 100), 39).exact == F(8, 100)
    assert j1(3, F(1, 25), 0).exact == 2
    assert stick_threshold(3, 0.04) == pytest.approx(math.sqrt(250))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 4), st.fractions(F(1, 100), F(99, 100), max_denominator=100), st.data())
def test_j1_sticks_beyond_threshold(n, xi, data):
    lo = stick_threshold(n, float(xi))
    t = F(math.ceil(lo * 8), 8) + data.draw(st.fractions(0, 20, max_denominator=8))
    if data.draw(st.booleans()):
        t = -t
    assert j1(n, xi, t).exact == 2 ** (n - 1) * xi


def test_g_measure_examples():
    assert g_measure(2, 4) == F(1, 4)
    assert g_measure(2, 0) == 4
    assert g_measure(3, 5) == F(8, 125)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.fractions(3, 60, max_denominator=11), st.booleans())
def test_g_measure_closed_form(m, t, neg):
    t = -t if neg else t
    assert g_measure(m, t) * abs(t) ** m == 2**m


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.sampled_from([F(1, 10), F(1, 20), F(1, 50)]), st.fractions(0, 5, max_denominator=4))
def test_omega_vanishes_beyond_t3(n, xi, extra):
    t3 = thresholds(n, float(xi), "general")[3]
    t = F(t3).limit_denominator(1000) + F(1, 1000) + extra
    assert omega(n, xi, t).exact == 0
    assert omega(n, xi, -t).exact == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.fractions(3, 200, max_denominator=7))
def test_phi_tail_envelope(m, t):
    assert phi(m, t).exact <= F(phi_tail_constant(m)) / t**2


def test_profile_examples():
    rows = convergence_profile(3, 0.01, [0.0, 150.0])
    assert rows[0].absdiff == 0 and rows[0].omega == 2
    assert rows[1].omega == 0 and rows[1].absdiff == rows[1].phi
    assert rows[1].phi <= phi_tail_constant(2) / 150**2
    assert rows[1].regime == "outer"
    assert regime_of(1.0, 0.01, math.sqrt(10), 1.0)[0] == "inner"
    assert regime_of(50.0, 0.01, math.sqrt(10), 1.0)[0] == "middle"
    with pytest.raises(ValueError):
        convergence_profile(2, 0.01, [0.0])


def test_profile_max_diff_scales_with_xi():
    ks = []
    for xi in (0.04, 0.01):
        grid = [k * (1.1 / xi) / 40 for k in range(41)]
        rows = convergence_profile(3, xi, grid)
        ks.append(max(r.absdiff for r in rows) / xi)
    assert max(ks) <= 5 and max(ks) / min(ks) <= 1.25
    assert set(fit_regime_constants(rows)) <= {"inner", "middle", "outer"}


def test_gamma():
    g1 = gamma(1, 1e-8)
    assert g1.value == pytest.approx(4, abs=1e-8)
    assert whole_line_ratio(2, 4.0) == 2
    a = gamma(2, 1e-4)
    b = gamma(2, 5e-5)  # doubles the cutoff
    assert b.cutoff == 2 * a.cutoff
    assert 0 < a.value < math.inf
    assert abs(a.value - b.value) <= a.err + b.err


def test_idiff_quadratic_matches_closed_leading_terms():
    for xi in (0.04, 0.01, 0.0025):
        r = idiff(2, xi, 1e-4)
        assert r.err <= 1e-4 + 2 * phi_tail_constant(1) / r.cutoff
        assert abs(r.value - quadratic_idiff_leading(xi)) <= 0.01 * xi + r.err
    assert quadratic_idiff_leading(0.01) == pytest.approx(3.46667, abs=1e-5)
    assert quadratic_idiff_leading(0.04) == pytest.approx(2.93333, abs=1e-5)


@pytest.mark.slow
def test_idiff_cubic_tends_to_eight():
    vals = {xi: idiff(3, xi, 1e-4).value for xi in (0.04, 0.01)}
    scaled = [abs(v - 8) / math.sqrt(xi) for xi, v in vals.items()]
    assert vals[0.01] > vals[0.04]
    assert abs(vals[0.01] - 8) < abs(vals[0.04] - 8)
    assert max(scaled) <= 12 and max(scaled) / min(scaled) <= 1.1


def test_idiff_domain():
    with pytest.raises(ValueError):
        idiff(2, 0.2)
    with pytest.raises(ValueError):
        idiff(2, 0.01, 0)
    assert phi_value(1, 0) == 1
