"""Exact real-root counting and isolation with Sturm chains.

All counting uses the half-open convention [lo, hi) so that adjacent bins
tile the line. Every query point is rational and evaluated homogeneously
in integers, so no rounding enters the counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import IntPoly, MonicIntPoly, Poly, coeffs_of, height

Coeffs = tuple[int, ...]


class NonSquarefreeError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class RationalInterval:
    """Half-open interval [lo, hi) with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not lo < hi:
            raise ValueError(f"empty interval [{lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x < self.hi

    def reflect(self) -> "RationalInterval":
        # [-hi, -lo) differs from the true mirror (-hi, -lo] only at the endpoints
        return RationalInterval(-self.hi, -self.lo)

    def intersect(self, lo, hi) -> "RationalInterval | None":
        a, b = max(self.lo, Fraction(lo)), min(self.hi, Fraction(hi))
        return RationalInterval(a, b) if a < b else None

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi})"

    @classmethod
    def parse(cls, text: str) -> "RationalInterval":
        """``"-3:3"`` or ``"1/2:3/2"``."""
        lo, sep, hi = text.partition(":")
        if not sep:
            raise ValueError(f"interval must look like lo:hi, got {text!r}")
        return cls(Fraction(lo.strip()), Fraction(hi.strip()))


# ---------------------------------------------------------------------------
# coefficient-tuple helpers (hot paths work on plain tuples)


def _content(c: Sequence[int]) -> int:
    g = 0
    for a in c:
        g = math.gcd(g, a)
    return g


def _primitive(c: Sequence[int]) -> Coeffs:
    g = _content(c)
    return tuple(a // g for a in c) if g > 1 else tuple(c)


def _neg_prem(a: Coeffs, b: Coeffs) -> Coeffs:
    """-(positive multiple of) rem(a, b), as a primitive tuple."""
    r = list(a)
    db = len(b) - 1
    lc = b[-1]
    alc = abs(lc)
    sgn = 1 if lc > 0 else -1
    # r <- |lc| * r - sgn * q * x^k * b, one leading term at a time
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        q = r[-1]
        r = [alc * x for x in r]
        for i in range(db + 1):
            r[k + i] -= sgn * q * b[i]
        while r and r[-1] == 0:
            r.pop()
    return _primitive([-x for x in r])


def sturm_coeffs(c: Coeffs) -> list[Coeffs]:
    """Signed remainder chain for coefficient tuple ``c`` (low-to-high).

    Each element is divided by its positive content, which keeps signs.
    Raises NonSquarefreeError when the final element is nonconstant.
    """
    if len(c) < 2:
        raise ValueError("Sturm chain needs a nonconstant polynomial")
    chain = [_primitive(c), _primitive(tuple(k * c[k] for k in range(1, len(c))))]
    while len(chain[-1]) > 1:
        r = _neg_prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(r)
    if len(chain[-1]) > 1:
        raise NonSquarefreeError(f"{IntPoly(c)} is not squarefree")
    return chain


def _sign_at(c: Coeffs, a: int, b: int) -> int:
    """Sign of the polynomial at a/b (b > 0), via homogeneous Horner."""
    v = c[-1]
    bp = 1
    for k in range(len(c) - 2, -1, -1):
        bp *= b
        v = v * a + c[k] * bp
    return (v > 0) - (v < 0)


def _variations_at(chain: Sequence[Coeffs], x: Fraction) -> int:
    a, b = x.numerator, x.denominator
    count = 0
    last = 0
    for c in chain:
        s = _sign_at(c, a, b)
        if s:
            if last and s != last:
                count += 1
            last = s
    return count


def _variations_inf(chain: Sequence[Coeffs], direction: int) -> int:
    count = 0
    last = 0
    for c in chain:
        s = 1 if c[-1] > 0 else -1
        if direction < 0 and (len(c) - 1) % 2:
            s = -s
        if last and s != last:
            count += 1
        last = s
    return count


def _count_halfopen_chain(chain: Sequence[Coeffs], lo: Fraction, hi: Fraction) -> int:
    c0 = chain[0]
    n = _variations_at(chain, lo) - _variations_at(chain, hi)
    if _sign_at(c0, lo.numerator, lo.denominator) == 0:
        n += 1
    if _sign_at(c0, hi.numerator, hi.denominator) == 0:
        n -= 1
    return n


# ---------------------------------------------------------------------------
# public API


@dataclass(frozen=True)
class SturmChain:
    polys: tuple[IntPoly, ...]

    def _raw(self) -> list[Coeffs]:
        return [p.coeffs for p in self.polys]

    def variations(self, x) -> int:
        return _variations_at(self._raw(), Fraction(x))

    def variations_at_infinity(self, direction: int) -> int:
        return _variations_inf(self._raw(), direction)

    def count_between(self, lo, hi) -> int:
        """Sturm count over the half-open-on-the-left interval (lo, hi]."""
        return self.variations(lo) - self.variations(hi)

    def count_real(self) -> int:
        return self.variations_at_infinity(-1) - self.variations_at_infinity(1)


def sturm_chain(p: Poly) -> SturmChain:
    c = coeffs_of(p)
    if len(c) < 2:
        raise ValueError("Sturm chain needs a nonconstant polynomial")
    return SturmChain(tuple(IntPoly(x) for x in sturm_coeffs(c)))


def count_roots_halfopen(p: Poly, interval: RationalInterval) -> int:
    """Number of distinct real roots of squarefree p in [lo, hi)."""
    chain = sturm_coeffs(coeffs_of(p))
    return _count_halfopen_chain(chain, interval.lo, interval.hi)


def count_real_roots(p: Poly) -> int:
    chain = sturm_coeffs(coeffs_of(p))
    return _variations_inf(chain, -1) - _variations_inf(chain, 1)


def cauchy_bound(p: Poly) -> Fraction:
    c = coeffs_of(p)
    lc = abs(c[-1])
    return 1 + Fraction(max((abs(a) for a in c[:-1]), default=0), lc)


def max_root_bound(p: MonicIntPoly) -> Fraction:
    """1 + H(p); every real root r has |r| < this value."""
    return Fraction(1 + height(p))


def _isolate_chain(chain, lo: Fraction, hi: Fraction, eps: Fraction) -> list[RationalInterval]:
    out = []
    stack = [(lo, hi, _count_halfopen_chain(chain, lo, hi))]
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if k == 1 and b - a <= eps:
            out.append(RationalInterval(a, b))
            continue
        m = (a + b) / 2
        k_left = _count_halfopen_chain(chain, a, m)
        stack.append((m, b, k - k_left))
        stack.append((a, m, k_left))
    out.sort()
    return out


def isolate_roots(p: Poly, eps) -> list[RationalInterval]:
    """Disjoint half-open intervals of width <= eps, one per real root."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    c = coeffs_of(p)
    chain = sturm_coeffs(c)
    bound = cauchy_bound(p)
    # power-of-two box keeps midpoints dyadic
    B = Fraction(1 << max(1, math.ceil(bound)).bit_length())
    return _isolate_chain(chain, -B, B, eps)


def isolate_in(p: Poly, window: RationalInterval, eps) -> list[RationalInterval]:
    chain = sturm_coeffs(coeffs_of(p))
    return _isolate_chain(chain, window.lo, window.hi, Fraction(eps))
