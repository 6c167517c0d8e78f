"""Numerical and exact checks of the geometric facts behind the counting.

Each check returns a small report; the ``*_suite`` helpers run seeded
batches and flatten them into rows for CSV output.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polytope import MC_SHARD, SlabBoxPolytope, exact_abs_integral, exact_volume
from .realroots import NonSquarefreeError, RationalInterval, _count_halfopen_chain, sturm_coeffs

log = logging.getLogger(__name__)

SINGULAR_FORMULA = 1e-12
MIN_TWO_ROOT_SAMPLES = 10**5


class InsufficientSamplesError(ValueError):
    pass


class CollinearError(ValueError):
    pass


@dataclass(frozen=True)
class CheckRow:
    check: str
    params: str
    measured: float
    reference: float
    passed: bool


# ---------------------------------------------------------------------------
# Jacobian of (b, alpha, beta) -> a


@dataclass(frozen=True)
class FactorizationPoint:
    n: int
    xi: float
    b: tuple[float, ...]  # (b_0, ..., b_{n-3})
    alpha: float
    beta: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if len(self.b) != self.n - 2:
            raise ValueError(f"need {self.n - 2} cofactor coefficients, got {len(self.b)}")


def _cofactor(fp: FactorizationPoint, b) -> np.ndarray:
    # high-to-low: xi x^(n-2) + b_{n-3} x^(n-3) + ... + b_0
    return np.array([fp.xi, *reversed(list(b))], dtype=float)


def factor_map(fp: FactorizationPoint, z: np.ndarray) -> np.ndarray:
    """z = (b_{n-3}, ..., b_0, alpha, beta) -> (a_{n-1}, ..., a_0)."""
    k = fp.n - 2
    b_low = list(reversed(z[:k]))
    alpha, beta = z[k], z[k + 1]
    quad = np.array([1.0, -(alpha + beta), alpha * beta])
    return np.polymul(quad, _cofactor(fp, b_low))[1:]


def jacobian_formula(fp: FactorizationPoint) -> float:
    g = np.poly1d(_cofactor(fp, fp.b))
    return (fp.beta - fp.alpha) * g(fp.alpha) * g(fp.beta)


def jacobian_numeric(fp: FactorizationPoint, rel_step: float = 1e-6) -> float:
    z0 = np.array([*reversed(fp.b), fp.alpha, fp.beta], dtype=float)
    h = rel_step * max(1.0, float(np.abs(z0).max()), fp.xi)
    cols = []
    for i in range(len(z0)):
        e = np.zeros_like(z0)
        e[i] = h
        cols.append((factor_map(fp, z0 + e) - factor_map(fp, z0 - e)) / (2 * h))
    return float(np.linalg.det(np.column_stack(cols)))


def jacobian_check(fp: FactorizationPoint) -> float | None:
    """Relative error of the numeric Jacobian against the closed form.

    None (with a warning) when the closed form is numerically zero.
    """
    ref = jacobian_formula(fp)
    if abs(ref) < SINGULAR_FORMULA:
        log.warning("singular configuration %s: relative error is meaningless", fp)
        return None
    return abs(jacobian_numeric(fp) - ref) / max(1.0, abs(ref))


def random_factorization_points(count: int, seed: int, degrees=(2, 3, 4)) -> list[FactorizationPoint]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.choice(degrees))
        fp = FactorizationPoint(
            n,
            float(rng.uniform(0.1, 1.0)),
            tuple(float(x) for x in rng.uniform(-1, 1, n - 2)),
            float(rng.uniform(-2, 2)),
            float(rng.uniform(-2, 2)),
        )
        if abs(jacobian_formula(fp)) > 1e-3:
            out.append(fp)
    return out


# ---------------------------------------------------------------------------
# |v.x + eps| against |v.x| on a symmetric box


@dataclass(frozen=True)
class OffsetGapReport:
    d: int
    v: tuple
    eps: Fraction
    lam: Fraction
    difference: Fraction
    lower: Fraction
    upper: Fraction
    lower_ok: bool
    upper_ok: bool
    identity_ok: bool  # difference == int over V(eps) of (eps - |v.x|)
    equality_case: bool  # V(eps) == V
    equality_case_ok: bool | None


def _box_integral(v, c) -> Fraction:
    d = len(v)
    return exact_abs_integral(SlabBoxPolytope(d, (0,) * d, 0, tuple(v), c))


def _strip(v, eps: Fraction, grad=None) -> SlabBoxPolytope:
    """{x in box : |v.x| <= eps}, optionally with objective |grad.x|."""
    d = len(v)
    grad = (0,) * d if grad is None else grad
    return SlabBoxPolytope(d, tuple(Fraction(x) / eps for x in v), 0, tuple(grad), 0)


def strip_measure(v, eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        return Fraction(0)
    return exact_volume(_strip(v, eps))


def offset_gap_check(d: int, v: Sequence, eps, lam) -> OffsetGapReport:
    v = tuple(Fraction(x) for x in v)
    eps, lam = Fraction(eps), Fraction(lam)
    if len(v) != d:
        raise ValueError("v must have length d")
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    diff = _box_integral(v, eps) - _box_integral(v, Fraction(0))
    lower = (1 - lam) * eps * strip_measure(v, lam * eps)
    upper = eps * strip_measure(v, eps)
    if eps > 0:
        identity = upper - exact_abs_integral(_strip(v, eps, v))
    else:
        identity = Fraction(0)
    box = Fraction(2) ** d
    full = eps > 0 and sum(abs(x) for x in v) <= eps
    eq_ok = (_box_integral(v, eps) == eps * box) if full else None
    return OffsetGapReport(
        d, v, eps, lam, diff, lower, upper, lower <= diff, diff <= upper, identity == diff, full, eq_ok
    )


def random_diff_configs(count: int, seed: int) -> list[tuple]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(1, 4))
        v = tuple(Fraction(int(x), 4) for x in rng.integers(-8, 9, d))
        if all(x == 0 for x in v):
            v = (Fraction(1),) + v[1:]
        eps = Fraction(int(rng.integers(1, 33)), 8)
        lam = Fraction(int(rng.integers(1, 16)), 16)
        out.append((d, v, eps, lam))
    return out


# ---------------------------------------------------------------------------
# planar section of two strips


@dataclass(frozen=True)
class SectionReport:
    area_measured: float
    area_formula: float
    diam_measured: float
    diam_bounds: tuple[float, float]
    diam_bounds_doubled: tuple[float, float]
    within_bounds: bool
    within_doubled: bool

    @property
    def area_rel_error(self) -> float:
        return abs(self.area_measured - self.area_formula) / abs(self.area_formula)


def section_check(a: Sequence[float], b: Sequence[float], H1: float, H2: float) -> SectionReport:
    """Section of {|a.x| <= H1, |b.x| <= H2} by span(a, b), built as a parallelogram."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    aa, bb, ab = a @ a, b @ b, a @ b
    G = aa * bb - ab * ab
    if G <= 1e-12 * aa * bb:
        raise CollinearError("a and b are collinear")
    gram = np.array([[aa, ab], [ab, bb]])
    # vertex x = s a + r b with a.x = +-H1, b.x = +-H2; walk them in cyclic order
    corners = [(H1, H2), (-H1, H2), (-H1, -H2), (H1, -H2)]
    verts = [np.linalg.solve(gram, np.array(c)) @ np.vstack([a, b]) for c in corners]
    e1 = a / math.sqrt(aa)
    u = b - (b @ e1) * e1
    e2 = u / np.linalg.norm(u)
    pts = [(p @ e1, p @ e2) for p in verts]
    area = 0.5 * abs(sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1])))
    diam = max(np.linalg.norm(p - q) for p in verts for q in verts)
    root = math.sqrt(G)
    lo = math.sqrt(bb * H1**2 + aa * H2**2) / root
    hi = (math.sqrt(bb) * H1 + math.sqrt(aa) * H2) / root
    return SectionReport(
        area,
        4 * H1 * H2 / root,
        diam,
        (lo, hi),
        (2 * lo, 2 * hi),
        lo <= diam * (1 + 1e-12) and diam <= hi * (1 + 1e-12),
        2 * lo <= diam * (1 + 1e-12) and diam <= 2 * hi * (1 + 1e-12),
    )


def random_sections(count: int, seed: int) -> list[tuple]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = int(rng.integers(2, 6))
        a, b = rng.normal(size=k), rng.normal(size=k)
        if abs(a @ a * (b @ b) - (a @ b) ** 2) < 1e-3:
            continue
        out.append((tuple(a), tuple(b), float(rng.uniform(0.1, 3)), float(rng.uniform(0.1, 3))))
    return out


# ---------------------------------------------------------------------------
# measure of polynomials with two roots in a short interval


@dataclass(frozen=True)
class TwoRootQuery:
    n: int
    xi: float
    interval: RationalInterval
    samples: int
    seed: int

    def __post_init__(self):
        if self.interval.width > 1:
            raise ValueError("interval length must be <= 1")
        if not 0 < self.xi <= 1:
            raise ValueError("xi must lie in (0, 1]")

    @property
    def rho(self) -> float:
        return max(1.0, abs(float(self.interval.lo + self.interval.hi)) / 2)


@dataclass(frozen=True)
class TwoRootEstimate:
    estimate: float
    err: float
    ratio: float  # estimate / ((xi + rho^-3)^2 |I|^3)
    ratio_err: float
    ambiguous: int
    hits: int = 0
    samples: int = 0


_AMBIG = 1e-9


def _float_chain(P: np.ndarray):
    """Vectorised signed remainder chain; returns (chain, ambiguous mask)."""
    N, m = P.shape
    deg = m - 1
    ambiguous = np.zeros(N, dtype=bool)
    dP = P[:, 1:] * np.arange(1, m)
    chain = [P, dP]
    a, b = P.copy(), dP.copy()
    for _ in range(deg - 1):
        a = a / np.abs(a).max(axis=1, keepdims=True)
        b = b / np.abs(b).max(axis=1, keepdims=True)
        db = b.shape[1] - 1
        lead = b[:, db]
        ambiguous |= np.abs(lead) < 1e-6
        lead = np.where(ambiguous, 1.0, lead)
        r = a.copy()
        for k in range(r.shape[1] - 1, db - 1, -1):
            q = r[:, k] / lead
            r[:, k - db : k + 1] -= q[:, None] * b
        r = -r[:, :db]
        chain.append(r)
        a, b = b, r
    return chain, ambiguous


def _chain_signs(chain, x: float):
    signs, amb = [], None
    for c in chain:
        powers = x ** np.arange(c.shape[1])
        val = c @ powers
        mag = np.abs(c) @ np.abs(powers)
        bad = np.abs(val) <= _AMBIG * mag
        amb = bad if amb is None else amb | bad
        signs.append(np.sign(val))
    return signs, amb


def _variations(signs) -> np.ndarray:
    count = np.zeros(signs[0].shape, dtype=np.int64)
    last = np.zeros(signs[0].shape)
    for s in signs:
        nz = s != 0
        count += (nz & (last != 0) & (s != last)).astype(np.int64)
        last = np.where(nz, s, last)
    return count


def _exact_count(coeffs_low: Sequence[float], interval: RationalInterval) -> int:
    fr = [Fraction(float(c)) for c in coeffs_low]
    den = math.lcm(*(f.denominator for f in fr))
    ints = tuple(int(f * den) for f in fr)
    while len(ints) > 1 and ints[-1] == 0:
        ints = ints[:-1]
    if len(ints) < 2:
        return 0
    try:
        chain = sturm_coeffs(ints)
    except NonSquarefreeError:
        return 0  # measure zero
    return _count_halfopen_chain(chain, interval.lo, interval.hi)


def two_root_counts(P: np.ndarray, interval: RationalInterval) -> tuple[np.ndarray, int]:
    """Distinct real roots in the interval for each row (low-to-high coefficients)."""
    chain, amb = _float_chain(P)
    s_lo, a_lo = _chain_signs(chain, float(interval.lo))
    s_hi, a_hi = _chain_signs(chain, float(interval.hi))
    counts = _variations(s_lo) - _variations(s_hi)
    amb = amb | a_lo | a_hi
    for i in np.flatnonzero(amb):
        counts[i] = _exact_count(P[i], interval)
    return counts, int(amb.sum())


def two_root_measure(q: TwoRootQuery) -> TwoRootEstimate:
    if q.samples < MIN_TWO_ROOT_SAMPLES:
        raise InsufficientSamplesError(f"need at least {MIN_TWO_ROOT_SAMPLES} samples")
    n = q.n
    children = np.random.SeedSequence(q.seed).spawn(-(-q.samples // MC_SHARD))
    hits = ambiguous = 0
    left = q.samples
    for ss in children:
        m = min(MC_SHARD, left)
        left -= m
        P = np.empty((m, n + 1))
        P[:, :n] = np.random.default_rng(ss).uniform(-1.0, 1.0, size=(m, n))
        P[:, n] = q.xi
        counts, amb = two_root_counts(P, q.interval)
        hits += int((counts >= 2).sum())
        ambiguous += amb
    p = hits / q.samples
    vol = 2.0**n
    est = vol * p
    err = 3 * vol * math.sqrt(max(p * (1 - p), 0.0) / q.samples)
    scale = (q.xi + q.rho**-3) ** 2 * float(q.interval.width) ** 3
    return TwoRootEstimate(est, err, est / scale, err / scale, ambiguous, hits, q.samples)


# ---------------------------------------------------------------------------
# suites


def jacobian_suite(seed: int = 0, count: int = 100, tol: float = 1e-5) -> list[CheckRow]:
    rows = []
    for fp in random_factorization_points(count, seed):
        err = jacobian_check(fp)
        rows.append(CheckRow("jacobian", f"n={fp.n};xi={fp.xi:.6g}", err, 0.0, err <= tol))
    return rows


def offset_gap_suite(seed: int = 0, count: int = 100) -> list[CheckRow]:
    rows = []
    for d, v, eps, lam in random_diff_configs(count, seed):
        r = offset_gap_check(d, v, eps, lam)
        ok = r.lower_ok and r.upper_ok and r.identity_ok and r.equality_case_ok is not False
        params = f"d={d};v={'|'.join(map(str, v))};eps={eps};lambda={lam}"
        rows.append(CheckRow("offset_gap", params, float(r.difference), float(r.upper), ok))
    return rows


def section_suite(seed: int = 0, count: int = 100, tol: float = 1e-10) -> list[CheckRow]:
    rows = []
    for a, b, H1, H2 in random_sections(count, seed):
        r = section_check(a, b, H1, H2)
        rows.append(CheckRow("section_area", f"k={len(a)}", r.area_measured, r.area_formula, r.area_rel_error <= tol))
    return rows


TWO_ROOT_CENTERS = (0, 1, 5)
TWO_ROOT_LENGTHS = (Fraction(1, 20), Fraction(1, 10), Fraction(1, 5))
TWO_ROOT_XIS = (1.0, 0.5, 0.1)


def two_root_grid(n: int = 3, samples: int = 10**6, seed: int = 0) -> list[tuple[TwoRootQuery, TwoRootEstimate]]:
    out = []
    for i, (c, L, xi) in enumerate(
        (c, L, xi) for c in TWO_ROOT_CENTERS for L in TWO_ROOT_LENGTHS for xi in TWO_ROOT_XIS
    ):
        I = RationalInterval(c - L / 2, c + L / 2)
        q = TwoRootQuery(n, xi, I, samples, seed + i)
        out.append((q, two_root_measure(q)))
    return out


def two_root_suite(n=3, samples=10**6, seed=0, ratio_cap: float | None = None) -> list[CheckRow]:
    grid = two_root_grid(n, samples, seed)
    rows = []
    for q, e in grid:
        ok = True if ratio_cap is None else e.ratio <= ratio_cap
        rows.append(CheckRow("two_root_ratio", f"n={n};xi={q.xi};I={q.interval}", e.ratio, ratio_cap or 0.0, ok))
    return rows
