"""Exact integer polynomial arithmetic for small-degree monic polynomials.

Coefficients are stored low-to-high. A ``MonicIntPoly`` of degree n keeps
only (c_0, ..., c_{n-1}); the leading 1 is implicit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

MAX_DEGREE = 5


class UnsupportedDegreeError(ValueError):
    pass


def _strip(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = [int(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial with arbitrary leading coefficient."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @property
    def degree(self) -> int:
        # zero polynomial has degree -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        return format_poly(self.coeffs)


@dataclass(frozen=True)
class MonicIntPoly:
    """x^n + c_{n-1} x^{n-1} + ... + c_0 with c stored as (c_0, ..., c_{n-1})."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        if len(c) < 1:
            raise ValueError("monic polynomial needs degree >= 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def full_coeffs(self) -> tuple[int, ...]:
        return self.coeffs + (1,)

    def as_intpoly(self) -> IntPoly:
        return IntPoly(self.full_coeffs)

    def __str__(self) -> str:
        return format_poly(self.full_coeffs)


Poly = Union[IntPoly, MonicIntPoly]


def coeffs_of(p: Poly | Sequence[int]) -> tuple[int, ...]:
    """Full low-to-high coefficient tuple, leading coefficient included."""
    if isinstance(p, MonicIntPoly):
        return p.full_coeffs
    if isinstance(p, IntPoly):
        return p.coeffs
    return _strip(p)


def height(p: MonicIntPoly) -> int:
    return max(1, max(abs(c) for c in p.coeffs))


def eval_exact(p: Poly, x) -> Fraction:
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(coeffs_of(p)):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> IntPoly:
    c = coeffs_of(p)
    return IntPoly(tuple(k * c[k] for k in range(1, len(c))))


def _divisors(m: int) -> list[int]:
    m = abs(m)
    small, large = [], []
    for d in range(1, math.isqrt(m) + 1):
        if m % d == 0:
            small.append(d)
            if d != m // d:
                large.append(m // d)
    return small + large[::-1]


def integer_roots(p: MonicIntPoly) -> set[int]:
    c = list(p.full_coeffs)
    roots = set()
    k = 0
    while c[k] == 0:
        k += 1
    if k:
        roots.add(0)
    low = c[k]
    for d in _divisors(low):
        for r in (d, -d):
            if _eval_int(c, r) == 0:
                roots.add(r)
    return roots


def _eval_int(c: Sequence[int], x: int) -> int:
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _rem_monic_quadratic(c: Sequence[int], u: int, v: int) -> tuple[int, int]:
    """Remainder of the polynomial c (low-to-high) modulo x^2 + u x + v."""
    r = list(c)
    for k in range(len(r) - 1, 1, -1):
        q = r[k]
        if q:
            r[k - 1] -= u * q
            r[k - 2] -= v * q
        r[k] = 0
    return r[0], r[1]


def _has_quadratic_factor(p: MonicIntPoly) -> bool:
    # caller guarantees c_0 != 0; then v | c_0, and |u| = |sum of two roots| < 2(1 + H)
    c = p.full_coeffs
    bound = 2 * (1 + height(p))
    for d in _divisors(c[0]):
        for v in (d, -d):
            for u in range(-bound, bound + 1):
                if _rem_monic_quadratic(c, u, v) == (0, 0):
                    return True
    return False


def is_irreducible(p: MonicIntPoly) -> bool:
    n = p.degree
    if n > MAX_DEGREE:
        raise UnsupportedDegreeError(f"degree {n} > {MAX_DEGREE} not supported")
    if n < 1:
        raise UnsupportedDegreeError("degree must be positive")
    if n == 1:
        return True
    if integer_roots(p):
        return False
    # degrees 2, 3 have only linear splittings; 4 = 2 + 2, 5 = 2 + 3
    if n >= 4 and _has_quadratic_factor(p):
        return False
    return True


def format_poly(c: Sequence[int]) -> str:
    """Human-readable form, e.g. ``x^2 - 2``."""
    terms = []
    for k in range(len(c) - 1, -1, -1):
        a = c[k]
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        if k == 0:
            body = str(mag)
        else:
            xs = "x" if k == 1 else f"x^{k}"
            body = xs if mag == 1 else f"{mag}*{xs}"
        terms.append((sign, body))
    if not terms:
        return "0"
    head_sign, head = terms[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def parse_monic(text: str) -> MonicIntPoly:
    """Parse the CSV/CLI text form: low-to-high coefficients, leading 1 implicit.

    ``"-2,0"`` is x^2 - 2.
    """
    parts = [s.strip() for s in text.split(",")]
    if not parts or any(not s for s in parts):
        raise ValueError(f"bad polynomial text {text!r}")
    return MonicIntPoly(tuple(int(s) for s in parts))


def format_monic(p: MonicIntPoly) -> str:
    return ",".join(str(c) for c in p.coeffs)
