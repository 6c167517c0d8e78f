"""Exhaustive census of monic integer polynomials of bounded height.

The coefficient box [-Q, Q]^n is split into shards by fixing the top one or
two coefficients. Each shard is processed with vectorised integer arithmetic:

* reducible polynomials are marked by generating every polynomial with an
  integer root (and, for n >= 4, every product with a monic quadratic);
* root locations are read off from exact signs at all bin endpoints plus an
  integer grid, which settles every polynomial whose sign changes account
  for all of its real roots;
* the remaining polynomials go through a per-polynomial Sturm chain.

Shard results are merged by plain addition, so the outcome does not depend
on how the work was split or how many processes ran it.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .poly import MAX_DEGREE, UnsupportedDegreeError
from .realroots import (
    RationalInterval,
    _count_halfopen_chain,
    _variations_inf,
    isolate_in,
    sturm_coeffs,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2 * 10**8
_INT64_SAFE = 2**62


class BudgetExceededError(RuntimeError):
    pass


class InvalidBinsError(ValueError):
    pass


class EmptyCensusError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration helpers


def resolve_jobs(jobs: int | None = None) -> int:
    if jobs is None:
        env = os.environ.get("ALGINT_JOBS")
        jobs = int(env) if env else 1
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    return jobs


def _map(func: Callable, tasks: Sequence, jobs: int | None) -> list:
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(func, tasks, chunksize=chunk))


def check_budget(n: int, Q: int, budget: int | None = None) -> int:
    if not 2 <= n <= MAX_DEGREE:
        raise UnsupportedDegreeError(f"census supports 2 <= n <= {MAX_DEGREE}, got {n}")
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    total = (2 * Q + 1) ** n
    cap = DEFAULT_BUDGET if budget is None else budget
    if total > cap:
        raise BudgetExceededError(f"(2Q+1)^n = {total} exceeds budget {cap}")
    return total


def whole_line_bin(Q: int) -> RationalInterval:
    return RationalInterval(-Q - 1, Q + 1)


def uniform_bins(Q: int, width=Fraction(1, 2), lo=None, hi=None) -> list[RationalInterval]:
    width = Fraction(width)
    if width <= 0:
        raise InvalidBinsError("bin width must be positive")
    lo = Fraction(-Q - 1 if lo is None else lo)
    hi = Fraction(Q + 1 if hi is None else hi)
    bins = []
    a = lo
    while a < hi:
        b = min(a + width, hi)
        bins.append(RationalInterval(a, b))
        a = b
    return bins


def validate_bins(bins: Sequence[RationalInterval]) -> None:
    if not bins:
        raise InvalidBinsError("at least one bin is required")
    order = sorted(bins)
    for left, right in zip(order, order[1:]):
        if right.lo < left.hi:
            raise InvalidBinsError(f"bins {left} and {right} overlap")


# ---------------------------------------------------------------------------
# shard enumeration


def shard_prefixes(n: int, Q: int, depth: int = 1) -> list[tuple[int, ...]]:
    """Fixed top coefficients (c_{n-1}, ..., c_{n-depth}) for each shard."""
    if not 0 <= depth <= n - 1:
        raise ValueError(f"shard depth must be in [0, {n - 1}]")
    return list(product(range(-Q, Q + 1), repeat=depth))


def _grid(k: int, Q: int) -> np.ndarray:
    """All (c_{k-1}, ..., c_0) in [-Q, Q]^k; c_0 varies fastest."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axis = np.arange(-Q, Q + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axis] * k), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, k)


def shard_rows(n: int, Q: int, prefix: tuple[int, ...]) -> np.ndarray:
    """Coefficient matrix with columns c_0, ..., c_n (c_n = 1) for one shard."""
    k = n - len(prefix)
    free = _grid(k, Q)
    rows = np.empty((free.shape[0], n + 1), dtype=np.int64)
    rows[:, n] = 1
    for j, c in enumerate(prefix):
        rows[:, n - 1 - j] = c
    # free[:, 0] is c_{k-1}
    for j in range(k):
        rows[:, k - 1 - j] = free[:, j]
    return rows


def _local_index(cols: list[np.ndarray], Q: int) -> np.ndarray:
    """Row index inside a shard from free coefficients [c_0, c_1, ..., c_{k-1}]."""
    R = 2 * Q + 1
    idx = np.zeros_like(cols[0])
    scale = 1
    for c in cols:
        idx = idx + (c + Q) * scale
        scale *= R
    return idx


def reducible_mask(n: int, Q: int, prefix: tuple[int, ...]) -> np.ndarray:
    """Boolean mask over ``shard_rows(n, Q, prefix)`` marking reducible rows."""
    k = n - len(prefix)
    R = 2 * Q + 1
    mask = np.zeros(R**k, dtype=bool)
    if k == 0:
        raise ValueError("shard must leave c_0 free")
    fixed = {n - 1 - j: c for j, c in enumerate(prefix)}

    # integer roots r, |r| <= Q: c_0 = -(r^n + sum_{i>=1} c_i r^i)
    r = np.arange(-Q, Q + 1, dtype=np.int64)
    mid = _grid(k - 1, Q)  # (c_{k-1}, ..., c_1)
    s = r**n
    for i, c in fixed.items():
        s = s + c * r**i
    total = np.broadcast_to(s, (mid.shape[0], R)).copy()
    for j in range(k - 1):
        i = k - 1 - j
        total += mid[:, j : j + 1] * r[None, :] ** i
    c0 = -total
    ok = np.abs(c0) <= Q
    cols = [c0] + [np.broadcast_to(mid[:, k - 1 - i : k - i], c0.shape) for i in range(1, k)]
    mask[_local_index(cols, Q)[ok]] = True

    if n >= 4:
        _mark_quadratic_factors(n, Q, fixed, k, mask)
    return mask


def _mark_quadratic_factors(n, Q, fixed, k, mask):
    # p = (x^2 + u x + v) g with g monic of degree n - 2; c_0 != 0 forces 1 <= |v| <= Q,
    # and |u| = |alpha + beta| < 2(Q + 1)
    u = np.arange(-(2 * Q + 1), 2 * Q + 2, dtype=np.int64)
    v = np.concatenate([np.arange(-Q, 0), np.arange(1, Q + 1)]).astype(np.int64)
    top_free = max(0, k - 2)  # free among c_{n-1}..c_2 are c_{k-1}..c_2
    free = _grid(top_free, Q)
    U, V, F = np.meshgrid(u, v, np.arange(free.shape[0]), indexing="ij")
    U, V, F = U.ravel(), V.ravel(), F.ravel()

    def coeff(i):
        if i in fixed:
            return np.full(U.shape, fixed[i], dtype=np.int64)
        # free[:, 0] is c_{k-1}
        return free[F, (k - 1) - i]

    g = {n - 2: np.ones_like(U)}
    g[n - 3] = coeff(n - 1) - U
    for i in range(n - 2, 1, -1):
        g[i - 2] = coeff(i) - U * g[i - 1] - V * g[i]
    c1 = U * g[0] + V * g[1]
    c0 = V * g[0]
    ok = (np.abs(c1) <= Q) & (np.abs(c0) <= Q)
    if 1 in fixed:
        ok &= c1 == fixed[1]
    if 0 in fixed:
        ok &= c0 == fixed[0]
    cols = [c0]
    if k >= 2:
        cols.append(c1)
    for i in range(2, k):
        cols.append(coeff(i))
    mask[_local_index(cols, Q)[ok]] = True


# ---------------------------------------------------------------------------
# exact sign evaluation


def _power_table(n: int, points: Sequence[Fraction]) -> list[list[int]]:
    """table[k][j] = a_j^k b_j^(n-k) for points a_j / b_j."""
    return [[p.numerator**k * p.denominator ** (n - k) for p in points] for k in range(n + 1)]


def signs_at(rows: np.ndarray, points: Sequence[Fraction], Q: int) -> np.ndarray:
    """Exact signs of every row polynomial at every rational point."""
    n = rows.shape[1] - 1
    table = _power_table(n, points)
    bound = max(Q, 1) * max(sum(abs(table[k][j]) for k in range(n + 1)) for j in range(len(points)))
    if bound < _INT64_SAFE:
        vals = rows @ np.array(table, dtype=np.int64)
        return np.sign(vals).astype(np.int8)
    vals = rows.astype(object) @ np.array(table, dtype=object)
    return np.sign(vals).astype(np.int8)


def real_root_totals(rows: np.ndarray) -> np.ndarray:
    """Number of distinct real roots of each squarefree row polynomial."""
    n = rows.shape[1] - 1
    if n == 2:
        d = rows[:, 1] ** 2 - 4 * rows[:, 0]
        return np.where(d > 0, 2, 0).astype(np.int64)
    if n == 3:
        c, b, a = rows[:, 0], rows[:, 1], rows[:, 2]
        disc = 18 * a * b * c - 4 * a**3 * c + a**2 * b**2 - 4 * b**3 - 27 * c**2
        return np.where(disc > 0, 3, 1).astype(np.int64)
    out = np.empty(rows.shape[0], dtype=np.int64)
    for i, row in enumerate(rows.tolist()):
        chain = sturm_coeffs(tuple(row))
        out[i] = _variations_inf(chain, -1) - _variations_inf(chain, 1)
    return out


def _segment_counts_exact(coeffs: tuple[int, ...], points: Sequence[Fraction]) -> np.ndarray:
    chain = sturm_coeffs(coeffs)
    m = len(points) - 1
    out = np.zeros(m, dtype=np.int64)
    stack = [(0, m, _count_halfopen_chain(chain, points[0], points[m]))]
    while stack:
        i, j, k = stack.pop()
        if k == 0:
            continue
        if j - i == 1:
            out[i] = k
            continue
        mid = (i + j) // 2
        left = _count_halfopen_chain(chain, points[i], points[mid])
        stack.append((i, mid, left))
        stack.append((mid, j, k - left))
    return out


def segment_counts(rows: np.ndarray, points: Sequence[Fraction], Q: int, totals=None):
    """Per-row root counts in each segment [points[j], points[j+1]).

    Returns (counts, number of rows that needed the Sturm fallback).
    """
    if totals is None:
        totals = real_root_totals(rows)
    sg = signs_at(rows, points, Q)
    counts = (sg[:, :-1] != sg[:, 1:]).astype(np.int64)
    bad = np.flatnonzero(counts.sum(axis=1) != totals)
    for i in bad:
        counts[i] = _segment_counts_exact(tuple(int(x) for x in rows[i]), points)
    return counts, len(bad)


# ---------------------------------------------------------------------------
# census


@dataclass
class CensusTable:
    n: int
    Q: int
    bins: tuple[RationalInterval, ...]
    omega: list[int]
    N: list[list[int]]  # N[b][k-1]: polynomials with exactly k roots in bin b
    reducible_count: int
    irreducible_count: int
    max_abs_root_upper: Fraction
    roots_outside: int = 0
    fallbacks: int = 0

    @property
    def omega_total(self) -> int:
        return sum(self.omega)

    def check_invariants(self) -> None:
        for b, row in enumerate(self.N):
            if self.omega[b] != sum((k + 1) * x for k, x in enumerate(row)):
                raise AssertionError(f"Omega != sum k N(k) in bin {self.bins[b]}")
        if self.reducible_count + self.irreducible_count != (2 * self.Q + 1) ** self.n:
            raise AssertionError("reducible + irreducible != (2Q+1)^n")
        if self.roots_outside:
            raise AssertionError(f"{self.roots_outside} roots outside (-Q-1, Q+1)")
        if not self.max_abs_root_upper < self.Q + 1:
            raise AssertionError("max root bound not below Q + 1")


@dataclass
class _ShardResult:
    omega: np.ndarray
    N: np.ndarray
    reducible: int
    irreducible: int
    outside: int
    fallbacks: int
    inner_mag: Fraction  # largest lower magnitude over occupied segments
    extremal: list = field(default_factory=list)  # (coeffs, segment index, outer magnitude)


def _segment_points(Q: int, bins: Sequence[RationalInterval]):
    B = Fraction(Q + 1)
    pts = {Fraction(i) for i in range(-Q - 1, Q + 2)}
    for b in bins:
        for x in (b.lo, b.hi):
            if -B <= x <= B:
                pts.add(x)
    points = sorted(pts)
    where = {p: j for j, p in enumerate(points)}
    ranges = []
    for b in bins:
        lo, hi = max(b.lo, -B), min(b.hi, B)
        if lo >= hi:
            ranges.append((0, 0))
        else:
            ranges.append((where[lo], where[hi]))
    return points, ranges


def _census_shard(task) -> _ShardResult:
    n, Q, prefix, points, ranges = task
    rows = shard_rows(n, Q, prefix)
    red = reducible_mask(n, Q, prefix)
    irr = rows[~red]
    nb = len(ranges)
    omega = np.zeros(nb, dtype=np.int64)
    N = np.zeros((nb, n), dtype=np.int64)
    if irr.shape[0] == 0:
        return _ShardResult(omega, N, int(red.sum()), 0, 0, 0, Fraction(-1))
    totals = real_root_totals(irr)
    counts, nfall = segment_counts(irr, points, Q, totals)
    outside = int((totals - counts.sum(axis=1)).sum())
    cs = np.zeros((counts.shape[0], counts.shape[1] + 1), dtype=np.int64)
    np.cumsum(counts, axis=1, out=cs[:, 1:])
    for b, (j0, j1) in enumerate(ranges):
        per = cs[:, j1] - cs[:, j0]
        omega[b] = per.sum()
        for k in range(1, n + 1):
            N[b, k - 1] = int((per == k).sum())

    occupied = np.flatnonzero(counts.any(axis=0))
    inner = [Fraction(0) if points[j] < 0 < points[j + 1] else min(abs(points[j]), abs(points[j + 1])) for j in occupied]
    inner_mag = max(inner) if inner else Fraction(-1)
    extremal = []
    for j in occupied:
        outer = max(abs(points[j]), abs(points[j + 1]))
        if outer >= inner_mag:
            for i in np.flatnonzero(counts[:, j]):
                extremal.append((tuple(int(x) for x in irr[i]), int(j)))
    return _ShardResult(omega, N, int(red.sum()), int(irr.shape[0]), outside, nfall, inner_mag, extremal)


def _max_abs_root(extremal, points, inner_mag, Q) -> Fraction:
    bound = Fraction(0)
    eps = Fraction(1, 2**20)
    B = Q + 1
    for coeffs, j in extremal:
        if max(abs(points[j]), abs(points[j + 1])) < inner_mag:
            continue
        window = RationalInterval(points[j], points[j + 1])
        e = eps
        while True:
            ivs = isolate_in(coeffs, window, e)
            m = max(max(abs(iv.lo), abs(iv.hi)) for iv in ivs)
            if m < B:
                break
            e /= 2**8
        bound = max(bound, m)
    return bound


def run_census(
    n: int,
    Q: int,
    bins: Sequence[RationalInterval] | None = None,
    *,
    jobs: int | None = None,
    budget: int | None = None,
    shard_depth: int = 1,
) -> CensusTable:
    """Exact Omega_n(Q, bin) and N_n(Q, k, bin) for every bin."""
    check_budget(n, Q, budget)
    if bins is None:
        bins = uniform_bins(Q)
    bins = tuple(bins)
    validate_bins(bins)
    points, ranges = _segment_points(Q, bins)
    tasks = [(n, Q, pre, points, ranges) for pre in shard_prefixes(n, Q, shard_depth)]
    log.info("census n=%d Q=%d: %d shards, %d bins", n, Q, len(tasks), len(bins))
    results = _map(_census_shard, tasks, jobs)

    omega = sum(r.omega for r in results)
    N = sum(r.N for r in results)
    inner_mag = max(r.inner_mag for r in results)
    extremal = [e for r in results for e in r.extremal]
    table = CensusTable(
        n=n,
        Q=Q,
        bins=bins,
        omega=[int(x) for x in omega],
        N=[[int(x) for x in row] for row in N],
        reducible_count=sum(r.reducible for r in results),
        irreducible_count=sum(r.irreducible for r in results),
        max_abs_root_upper=_max_abs_root(extremal, points, inner_mag, Q) if extremal else Fraction(0),
        roots_outside=sum(r.outside for r in results),
        fallbacks=sum(r.fallbacks for r in results),
    )
    return table


# ---------------------------------------------------------------------------
# reducible counts


def _reducible_shard(task) -> int:
    n, Q, prefix = task
    return int(reducible_mask(n, Q, prefix).sum())


def count_reducible(n: int, Q: int, *, jobs: int | None = None, budget: int | None = None) -> int:
    """Exact number of reducible monic polynomials of degree n and height <= Q."""
    check_budget(n, Q, budget)
    tasks = [(n, Q, pre) for pre in shard_prefixes(n, Q, 1)]
    return sum(_map(_reducible_shard, tasks, jobs))


@dataclass(frozen=True)
class ResidualModel:
    """Predicted remainder order Q^(n-1) (ln Q)^delta(n)."""

    n: int

    @property
    def delta(self) -> int:
        return 1 if self.n <= 2 else 0

    def order(self, Q: int) -> float:
        return Q ** (self.n - 1) * math.log(Q) ** self.delta


# ---------------------------------------------------------------------------
# gaps around rationals


def _nearest_side(chain, x0: Fraction, window: Fraction, side: int, eps: Fraction):
    """Exact lower bound on the distance from x0 to the nearest root on one side."""
    if side > 0:
        lo, hi = x0, x0 + window
    else:
        lo, hi = x0 - window, x0
    if _count_halfopen_chain(chain, lo, hi) == 0:
        return None
    # shrink towards x0 keeping at least one root inside [lo, hi)
    while hi - lo > eps or (side > 0 and lo == x0) or (side < 0 and hi == x0):
        mid = (lo + hi) / 2
        near = (lo, mid) if side > 0 else (mid, hi)
        if _count_halfopen_chain(chain, *near) > 0:
            lo, hi = near
        else:
            lo, hi = (mid, hi) if side > 0 else (lo, mid)
    return lo - x0 if side > 0 else x0 - hi


def root_distance(coeffs: tuple[int, ...], x0, window, eps=Fraction(1, 10**10)):
    """Lower bound (within eps) on the distance from x0 to the nearest root within window."""
    chain = sturm_coeffs(tuple(coeffs))
    x0, window = Fraction(x0), Fraction(window)
    ds = [d for d in (_nearest_side(chain, x0, window, s, eps) for s in (1, -1)) if d is not None]
    return min(ds) if ds else None


def _gap_shard(task):
    n, Q, prefix, x0, window = task
    rows = shard_rows(n, Q, prefix)
    irr = rows[~reducible_mask(n, Q, prefix)]
    if irr.shape[0] == 0:
        return None, None
    b = x0.denominator
    table = np.array(_power_table(n, [x0]), dtype=object)[:, 0]
    px0 = np.abs((irr.astype(object) @ table).astype(float)) / float(b) ** n
    ks = np.arange(1, n + 1)
    absc = np.abs(irr[:, 1:]).astype(float) * ks

    def lower_bounds(idx, w):
        # a root within distance d <= w of x0 forces |p(x0)| <= d * max |p'| on that window
        y = float(abs(x0) + w)
        return px0[idx] / (absc[idx] * y ** (ks - 1)).sum(axis=1)

    best, best_poly = window, None
    todo = np.ones(irr.shape[0], dtype=bool)
    scan_window = window
    while True:
        idx = np.flatnonzero(todo)
        lb = lower_bounds(idx, scan_window)
        order = np.argsort(lb, kind="stable")
        restart = False
        for j in order:
            if lb[j] * (1 - 1e-9) >= best:
                break
            i = idx[j]
            todo[i] = False
            coeffs = tuple(int(x) for x in irr[i])
            d = root_distance(coeffs, x0, best)
            if d is not None and d < best:
                best, best_poly = d, coeffs
                if best < scan_window / 2:
                    # tighter window, tighter bounds for everything left
                    scan_window = best
                    restart = True
                    break
        if not restart:
            break
    return (best, best_poly) if best_poly is not None else (None, None)


def nearest_to_rational(n: int, Q: int, x0, *, jobs=None, budget=None, with_poly=False):
    """Distance from x0 to the nearest real algebraic integer of degree n, height <= Q.

    Returned as an exact rational lower bound, tight to 1e-10.
    """
    check_budget(n, Q, budget)
    x0 = Fraction(x0)
    window = Fraction(1)
    limit = 2 * (Q + 1) + abs(x0)
    prefixes = shard_prefixes(n, Q, 1)
    while True:
        results = _map(_gap_shard, [(n, Q, pre, x0, window) for pre in prefixes], jobs)
        found = [(d, p) for d, p in results if d is not None]
        if found:
            d, p = min(found, key=lambda t: (t[0], t[1]))
            return (d, p) if with_poly else d
        if window > limit:
            raise EmptyCensusError(f"no real algebraic integers of degree {n} and height <= {Q}")
        window *= 2


# ---------------------------------------------------------------------------
# root-bound certificate


def _taylor_positive(rows: np.ndarray, B: int) -> np.ndarray:
    """True where every Taylor coefficient of p at B is positive (no roots >= B)."""
    n = rows.shape[1] - 1
    shift = [[math.comb(j, k) * B ** (j - k) if j >= k else 0 for k in range(n + 1)] for j in range(n + 1)]
    bound = int(np.abs(rows).max()) * max(sum(abs(x) for x in col) for col in zip(*shift))
    if bound < _INT64_SAFE:
        t = rows @ np.array(shift, dtype=np.int64)
    else:
        t = rows.astype(object) @ np.array(shift, dtype=object)
    return (t > 0).all(axis=1)


def _root_bound_shard(task):
    n, Q, prefix = task
    rows = shard_rows(n, Q, prefix)
    irr = rows[~reducible_mask(n, Q, prefix)]
    flip = irr * np.array([(-1) ** (k + n) for k in range(n + 1)], dtype=np.int64)
    ok = _taylor_positive(irr, Q + 1) & _taylor_positive(flip, Q + 1)
    violations = 0
    B = Fraction(Q + 1)
    for i in np.flatnonzero(~ok):
        coeffs = tuple(int(x) for x in irr[i])
        chain = sturm_coeffs(coeffs)
        total = _variations_inf(chain, -1) - _variations_inf(chain, 1)
        if _count_halfopen_chain(chain, -B, B) != total:
            violations += 1
    return int(irr.shape[0]), violations, int((~ok).sum())


@dataclass(frozen=True)
class RootBoundReport:
    n: int
    Q: int
    checked: int
    violations: int
    fallbacks: int


def certify_root_bound(n: int, Q: int, *, jobs=None, budget=None) -> RootBoundReport:
    """Check exactly that every irreducible census polynomial has all roots in (-Q-1, Q+1)."""
    check_budget(n, Q, budget)
    res = _map(_root_bound_shard, [(n, Q, pre) for pre in shard_prefixes(n, Q, 1)], jobs)
    return RootBoundReport(n, Q, sum(r[0] for r in res), sum(r[1] for r in res), sum(r[2] for r in res))


# ---------------------------------------------------------------------------
# comparison with the density integral


@dataclass(frozen=True)
class ResidualRow:
    bin: RationalInterval
    omega: int
    integral: float  # int_bin omega_n(1/Q, t) dt
    integral_err: float
    residual: float  # Omega - Q^n * integral
    normalized: float  # residual / (Q^(n-1) (ln Q)^delta)
    refined: float | None = None  # n = 2: residual + 2Q int_{bin cap [-Q,Q]} dt / max(1,|t|)
    refined_normalized: float | None = None  # refined / Q


def compare_census_to_integral(table: CensusTable, integrals: Sequence) -> list[ResidualRow]:
    """Per-bin residuals of the exact counts against Q^n int omega.

    ``integrals`` holds, per bin, either a float or an object with
    ``value`` and ``err`` attributes, computed at xi = 1/Q.
    """
    from .density import inv_max_integral

    if len(integrals) != len(table.bins):
        raise ValueError(f"{len(integrals)} integrals for {len(table.bins)} bins")
    n, Q = table.n, table.Q
    model = ResidualModel(n)
    scale = model.order(Q) if Q > 1 else 1.0
    out = []
    for b, omega_count, item in zip(table.bins, table.omega, integrals):
        value = float(getattr(item, "value", item))
        err = float(getattr(item, "err", 0.0))
        E = omega_count - Q**n * value
        refined = refined_norm = None
        if n == 2:
            refined = E + 2 * Q * inv_max_integral(max(float(b.lo), -Q), min(float(b.hi), Q))
            refined_norm = refined / Q
        out.append(ResidualRow(b, omega_count, value, err, E, E / scale, refined, refined_norm))
    return out
