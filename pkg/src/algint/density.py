"""Limit densities omega_n(xi, t) and phi_m(t).

Both are integrals of |affine function| over box-slab polytopes:

    omega_n(xi, t) = int_{D_n(xi,t)} |n xi t^(n-1) + sum_k k p_k t^(k-1)| dp,
    D_n(xi, t)     = {p in [-1,1]^(n-1) : |xi t^n + sum_k p_k t^k| <= 1},

and phi_m is the same with xi = 0 and d = m.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .polytope import DensityPoint, SlabBoxPolytope, integrate_abs_affine
from .quadrature import QuadResult, integrate
from .realroots import RationalInterval
from .thresholds import general_thresholds, quadratic_thresholds


def _num(x):
    """Exact rational for int/Fraction/float inputs; text like '1/10' too."""
    if isinstance(x, str):
        return Fraction(x)
    return x if isinstance(x, Fraction) else Fraction(x)


def _region(d: int, xi, t, grad_offset) -> SlabBoxPolytope:
    t = _num(t)
    pw = [t**k for k in range(d + 1)]
    w = tuple(pw[1:])
    v = tuple(k * pw[k - 1] for k in range(1, d + 1))
    return SlabBoxPolytope(d, w, _num(xi) * t ** (d + 1), v, grad_offset)


def build_region(n: int, xi, t) -> SlabBoxPolytope:
    """D_n(xi, t) with the omega objective; xi = 0 gives G_{n-1}(t)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    xi, t = _num(xi), _num(t)
    if not 0 <= xi <= 1:
        raise ValueError("xi must lie in [0, 1]")
    return _region(n - 1, xi, t, n * xi * t ** (n - 1))


def phi_region(m: int, t) -> SlabBoxPolytope:
    if m < 1:
        raise ValueError("m must be >= 1")
    return _region(m, 0, t, Fraction(0))


def omega(n: int, xi, t, method: str = "exact", samples: int = 10**6, seed: int | None = None) -> DensityPoint:
    if _num(xi) <= 0:
        raise ValueError("omega needs xi > 0")
    P = build_region(n, xi, t)
    return integrate_abs_affine(P, method, samples, seed, n=n, xi=float(xi), t=float(t))


def phi(m: int, t, method: str = "exact", samples: int = 10**6, seed: int | None = None) -> DensityPoint:
    return integrate_abs_affine(phi_region(m, t), method, samples, seed, n=m, xi=0.0, t=float(t))


def omega_value(n: int, xi, t) -> float:
    return omega(n, xi, t).value


def phi_value(m: int, t) -> float:
    return phi(m, t).value


def phi1_closed(t) -> float:
    t = float(t)
    return 1.0 / max(1.0, t * t)


def omega2_closed(xi: float, t: float) -> float:
    xi, a = float(xi), abs(float(t))
    if not 0 < xi <= 0.25:
        raise ValueError("closed form holds for 0 < xi <= 1/4")
    t1, t2, t3, t4, t5 = quadratic_thresholds(xi).values
    if a <= t1:
        return 1 + 4 * xi**2 * a**2
    if a <= t2:
        return 1 / (2 * a**2) + 0.5 + xi * (1 - 2 * a) + 2.5 * xi**2 * a**2
    if a <= t3:
        return 1 / a**2 + xi**2 * a**2
    if a <= t4:
        return 2 * xi
    if a <= t5:
        return 1 / (2 * a**2) - 0.5 + xi * (1 + 2 * a) - 1.5 * xi**2 * a**2
    return 0.0


def support_radius(xi: float) -> float:
    """omega_n(xi, t) = 0 for |t| >= this value, any n."""
    return 1 / float(xi) + 1


def breakpoints(n: int, xi: float) -> list[float]:
    """Points where omega_n(xi, .) is known to change shape."""
    xi = float(xi)
    pts = [0.0, 1.0]
    if n == 2 and xi <= 0.25:
        pts += list(quadratic_thresholds(xi).values)
    elif 0 < xi < 0.125:
        pts += list(general_thresholds(n, xi).values)
    pts.append(1 / xi)
    pos = sorted(set(pts))
    return sorted(set(pos + [-x for x in pos]))


def integrate_omega_over(n: int, xi, interval: RationalInterval, tol: float, max_evals: int = 400_000) -> QuadResult:
    """int_I omega_n(xi, t) dt to absolute error tol."""
    xi = float(xi)
    R = support_radius(xi)
    lo, hi = max(float(interval.lo), -R), min(float(interval.hi), R)
    if lo >= hi:
        return QuadResult(0.0, 0.0, 0)
    return integrate(lambda t: omega_value(n, xi, t), lo, hi, tol, breakpoints=breakpoints(n, xi), max_evals=max_evals)


def inv_max_integral(lo: float, hi: float) -> float:
    """int_lo^hi dt / max(1, |t|) in closed form."""

    def F(x):
        if abs(x) <= 1:
            return x
        return math.copysign(1 + math.log(abs(x)), x)

    return F(hi) - F(lo) if lo < hi else 0.0
