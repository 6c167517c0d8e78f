"""Tails, thresholds and the xi -> 0 behaviour of omega_n."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .density import _num, _region, breakpoints, omega_value, phi_value
from .polytope import DensityPoint, SlabBoxPolytope, exact_volume, integrate_abs_affine
from .quadrature import integrate
from .thresholds import (  # noqa: F401  (re-exported)
    NoRootError,
    ThresholdSet,
    general_thresholds,
    inner_equation,
    outer_equation,
    outer_threshold,
    quadratic_thresholds,
    thresholds,
)

TAIL_START = 3.0


def j1(n: int, xi, t) -> DensityPoint:
    """int over G_{n-1}(t) of |xi t^(n-1) + v(t).q| dq."""
    if n < 3:
        raise ValueError("j1 needs n >= 3")
    xi, t = _num(xi), _num(t)
    P = _region(n - 1, 0, t, xi * t ** (n - 1))
    return integrate_abs_affine(P, "exact", n=n, xi=float(xi), t=float(t))


def stick_threshold(n: int, xi: float) -> float:
    """|t| beyond which j1 equals 2^(n-1) xi exactly."""
    return math.sqrt(5 * (n - 1) / float(xi))


def g_measure(m: int, t) -> Fraction:
    """Exact volume of G_m(t)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    t = _num(t)
    w = tuple(t**k for k in range(1, m + 1))
    return exact_volume(SlabBoxPolytope(m, w, 0, (0,) * m, 0))


def phi_tail_constant(m: int) -> float:
    """C with phi_m(t) <= C / t^2 for |t| >= 3."""
    return 2.0**m * (sum((m - k) * 3.0 ** (k + 1 - m) for k in range(1, m)) + m * 3.0 ** (1 - m))


# ---------------------------------------------------------------------------
# convergence profile


@dataclass(frozen=True)
class ProfileRow:
    n: int
    xi: float
    t: float
    omega: float
    phi: float
    absdiff: float
    regime: str
    bound: float


def regime_of(t: float, xi: float, kappa1: float, kappa2: float) -> tuple[str, float]:
    a = abs(t)
    if a <= kappa1 / math.sqrt(xi):
        return "inner", xi * xi * a * a
    if a <= kappa2 / xi:
        return "middle", xi
    return "outer", 1 / (a * a)


def convergence_profile(
    n: int,
    xi: float,
    t_grid: Iterable[float],
    kappa1: float | None = None,
    kappa2: float = 1.0,
) -> list[ProfileRow]:
    """omega_n(xi, t) against phi_{n-1}(t), with the regime each t falls in.

    ``bound`` is the shape of the regime estimate (xi^2 t^2, xi or t^-2)
    before its constant.
    """
    if n < 3:
        raise ValueError("profile needs n >= 3")
    if not 0 < xi < 1:
        raise ValueError("need 0 < xi < 1")
    if kappa1 is None:
        kappa1 = math.sqrt(5 * (n - 1))
    rows = []
    for t in t_grid:
        w = omega_value(n, xi, t)
        p = phi_value(n - 1, t)
        regime, shape = regime_of(t, xi, kappa1, kappa2)
        rows.append(ProfileRow(n, float(xi), float(t), w, p, abs(w - p), regime, shape))
    return rows


def fit_regime_constants(rows: Sequence[ProfileRow]) -> dict[str, float]:
    """Smallest constant per regime with absdiff <= C * bound on every row."""
    out: dict[str, float] = {}
    for r in rows:
        if r.bound > 0:
            out[r.regime] = max(out.get(r.regime, 0.0), r.absdiff / r.bound)
        elif r.absdiff > 0:
            out[r.regime] = math.inf
    return out


# ---------------------------------------------------------------------------
# integrals over the whole line


@dataclass(frozen=True)
class LineIntegral:
    value: float
    err: float
    cutoff: float


def _phi_tail(m: int, start: float, tol: float) -> tuple[float, float, float]:
    """int_start^inf phi_m(t) dt, as (value, error, cutoff).

    Integrates in u = 1/t up to a cutoff X, and bounds the rest by C_m / X.
    """
    C = phi_tail_constant(m)
    X = max(2 * start, 4 * C / tol)
    f = lambda u: phi_value(m, 1 / u) / (u * u)  # noqa: E731
    r = integrate(f, 1 / X, 1 / start, tol / 2)
    return r.value, r.err + C / X, X


def gamma(m: int, tol: float = 1e-6) -> LineIntegral:
    """int over R of phi_m."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    head = integrate(lambda t: phi_value(m, t), 0.0, TAIL_START, tol / 4, breakpoints=(1.0,))
    tail, tail_err, X = _phi_tail(m, TAIL_START, tol / 4)
    return LineIntegral(2 * (head.value + tail), 2 * (head.err + tail_err), X)


def idiff(n: int, xi: float, tol: float = 1e-4) -> LineIntegral:
    """int over R of omega_n(xi, t) - phi_{n-1}(t)."""
    xi = float(xi)
    if not 0 < xi < 0.125:
        raise ValueError("idiff needs 0 < xi < 1/8")
    if tol <= 0:
        raise ValueError("tol must be positive")
    T = outer_threshold(n, xi) + 1  # omega vanishes beyond t3
    bps = [b for b in breakpoints(n, xi) if 0 < b < T]
    head = integrate(
        lambda t: omega_value(n, xi, t) - phi_value(n - 1, t),
        0.0,
        T,
        tol / 4,
        breakpoints=bps,
        max_evals=1_000_000,
    )
    tail, tail_err, X = _phi_tail(n - 1, T, tol / 4)
    return LineIntegral(2 * (head.value - tail), 2 * (head.err + tail_err), X)


def quadratic_idiff_leading(xi: float) -> float:
    """Leading terms 4 - (16/3) sqrt(xi) of the quadratic whole-line difference."""
    return 4 - 16 / 3 * math.sqrt(xi)


def whole_line_ratio(n: int, gamma_value: float) -> float:
    """Limit of int omega_n / int phi_{n-1} over R."""
    return (gamma_value + 2**n) / gamma_value
