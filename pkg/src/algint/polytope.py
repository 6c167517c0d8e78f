"""Integrals of |affine function| over box-slab polytopes.

The region is {p in R^d : |p_i| <= 1, |c_w + w.p| <= 1}. The exact path
works entirely in Fractions (floats are converted exactly): it enumerates
vertices, splits the region along the zero set of the objective, triangulates
each part by pulling from one vertex per face, and sums simplex volume times
the mean of the objective at the simplex vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

import numpy as np

MAX_EXACT_DIM = 6
MC_SHARD = 1 << 16


class DimensionTooLargeError(ValueError):
    pass


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class SlabBoxPolytope:
    dim: int
    slab_normal: tuple
    slab_offset: object
    objective_gradient: tuple
    objective_offset: object

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.slab_normal) != self.dim or len(self.objective_gradient) != self.dim:
            raise ValueError("vector length does not match dimension")

    def exact(self) -> "SlabBoxPolytope":
        return SlabBoxPolytope(
            self.dim,
            tuple(_q(x) for x in self.slab_normal),
            _q(self.slab_offset),
            tuple(_q(x) for x in self.objective_gradient),
            _q(self.objective_offset),
        )

    def contains(self, p: Sequence) -> bool:
        if any(abs(x) > 1 for x in p):
            return False
        return abs(self.slab_offset + sum(a * x for a, x in zip(self.slab_normal, p))) <= 1


@dataclass(frozen=True)
class DensityPoint:
    n: int
    xi: float
    t: float
    value: float
    method: str
    err: float = 0.0
    exact: Fraction | None = None

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("density value must be nonnegative")
        if self.method == "exact" and self.err != 0:
            raise ValueError("exact evaluations carry no error bar")


# ---------------------------------------------------------------------------
# exact geometry


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Gaussian elimination; None when singular."""
    n = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] * inv
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _rank(rows: list[list[Fraction]]) -> int:
    M = [r[:] for r in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(rank + 1, len(M)):
            if M[r][col] != 0:
                f = M[r][col] / M[rank][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


def _det(rows: list[list[Fraction]]) -> Fraction:
    M = [r[:] for r in rows]
    n = len(M)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det


class _HPolytope:
    """Unit box plus extra halfspaces a.x <= b, all exact."""

    def __init__(self, d: int, extra: list[tuple[tuple[Fraction, ...], Fraction]]):
        self.d = d
        self.extra = extra
        self.vertices, self.tight = self._enumerate()

    def _constraint_value(self, k: int, p) -> tuple[Fraction, Fraction]:
        # box constraints 2i: x_i <= 1, 2i+1: -x_i <= 1; extra ones follow
        d = self.d
        if k < 2 * d:
            i, s = divmod(k, 2)
            return (-p[i] if s else p[i]), Fraction(1)
        a, b = self.extra[k - 2 * d]
        return sum(x * y for x, y in zip(a, p)), b

    def _enumerate(self):
        d, extra = self.d, self.extra
        found: dict[tuple, None] = {}
        for j in range(0, min(len(extra), d) + 1):
            for S in combinations(range(len(extra)), j):
                for free in combinations(range(d), j):
                    fixed = [i for i in range(d) if i not in free]
                    for signs in product((-1, 1), repeat=len(fixed)):
                        p = [Fraction(0)] * d
                        for i, s in zip(fixed, signs):
                            p[i] = Fraction(s)
                        if j:
                            A = [[extra[k][0][i] for i in free] for k in S]
                            rhs = [
                                extra[k][1] - sum(extra[k][0][i] * p[i] for i in fixed) for k in S
                            ]
                            sol = _solve(A, rhs)
                            if sol is None:
                                continue
                            for i, x in zip(free, sol):
                                p[i] = x
                        if self._feasible(p):
                            found[tuple(p)] = None
        verts = list(found)
        ncons = 2 * d + len(extra)
        tight = []
        for v in verts:
            ts = set()
            for k in range(ncons):
                lhs, rhs = self._constraint_value(k, v)
                if lhs == rhs:
                    ts.add(k)
            tight.append(frozenset(ts))
        return verts, tight

    def _feasible(self, p) -> bool:
        if any(abs(x) > 1 for x in p):
            return False
        return all(sum(x * y for x, y in zip(a, p)) <= b for a, b in self.extra)

    def _affine_dim(self, idx: Sequence[int]) -> int:
        if len(idx) <= 1:
            return len(idx) - 1
        base = self.vertices[idx[0]]
        rows = [[x - y for x, y in zip(self.vertices[i], base)] for i in idx[1:]]
        return _rank(rows)

    def simplices(self) -> list[tuple[int, ...]]:
        """Pulling triangulation into full-dimensional simplices (vertex indices)."""
        allv = tuple(range(len(self.vertices)))
        if not allv or self._affine_dim(allv) < self.d:
            return []
        ncons = 2 * self.d + len(self.extra)
        memo: dict[frozenset, list[tuple[int, ...]]] = {}

        def tri(face: tuple[int, ...], dim: int) -> list[tuple[int, ...]]:
            key = frozenset(face)
            if key in memo:
                return memo[key]
            if dim == 0:
                out = [(face[0],)]
            else:
                apex = face[0]
                out = []
                seen = set()
                for k in range(ncons):
                    if k in self.tight[apex]:
                        continue
                    sub = tuple(i for i in face if k in self.tight[i])
                    if len(sub) < dim or frozenset(sub) in seen:
                        continue
                    if self._affine_dim(sub) != dim - 1:
                        continue
                    seen.add(frozenset(sub))
                    out.extend((apex,) + s for s in tri(sub, dim - 1))
            memo[key] = out
            return out

        return tri(allv, self.d)

    def integrate_linear(self, grad: Sequence[Fraction], offset: Fraction) -> Fraction:
        """Exact integral of offset + grad.p over the polytope."""
        total = Fraction(0)
        d = self.d
        fact = math.factorial(d)
        for s in self.simplices():
            v0 = self.vertices[s[0]]
            vol = abs(_det([[x - y for x, y in zip(self.vertices[i], v0)] for i in s[1:]])) / fact
            if vol == 0:
                continue
            mean = sum(offset + sum(g * x for g, x in zip(grad, self.vertices[i])) for i in s) / (d + 1)
            total += vol * mean
        return total


def _slab_halfspaces(P: SlabBoxPolytope):
    """Halfspaces for the slab, or None if the region is empty."""
    if all(x == 0 for x in P.slab_normal):
        return [] if abs(P.slab_offset) <= 1 else None
    w = P.slab_normal
    return [
        (tuple(w), 1 - P.slab_offset),
        (tuple(-x for x in w), 1 + P.slab_offset),
    ]


def exact_volume(P: SlabBoxPolytope) -> Fraction:
    P = P.exact()
    _check_dim(P.dim)
    slab = _slab_halfspaces(P)
    if slab is None:
        return Fraction(0)
    return _HPolytope(P.dim, slab).integrate_linear((Fraction(0),) * P.dim, Fraction(1))


def exact_abs_integral(P: SlabBoxPolytope) -> Fraction:
    """Exact integral of |c_v + v.p| over the region."""
    P = P.exact()
    _check_dim(P.dim)
    slab = _slab_halfspaces(P)
    if slab is None:
        return Fraction(0)
    v, c = P.objective_gradient, P.objective_offset
    whole = _HPolytope(P.dim, slab)
    if not whole.vertices:
        return Fraction(0)
    if all(x == 0 for x in v):
        return abs(c) * whole.integrate_linear((Fraction(0),) * P.dim, Fraction(1))
    vals = [c + sum(a * x for a, x in zip(v, p)) for p in whole.vertices]
    if all(x >= 0 for x in vals):
        return whole.integrate_linear(v, c)
    if all(x <= 0 for x in vals):
        return -whole.integrate_linear(v, c)
    neg_v = tuple(-x for x in v)
    pos = _HPolytope(P.dim, slab + [(neg_v, c)])  # c + v.p >= 0
    neg = _HPolytope(P.dim, slab + [(tuple(v), -c)])  # c + v.p <= 0
    return pos.integrate_linear(v, c) - neg.integrate_linear(v, c)


def _check_dim(d: int) -> None:
    if d > MAX_EXACT_DIM:
        raise DimensionTooLargeError(f"exact method supports d <= {MAX_EXACT_DIM}, got {d}")


# ---------------------------------------------------------------------------
# Monte Carlo


def mc_abs_integral(P: SlabBoxPolytope, samples: int, seed: int) -> tuple[float, float]:
    """Estimate and 3-sigma error bar from uniform samples of the box.

    Samples are drawn in fixed-size shards with spawned seeds, so the result
    depends only on (samples, seed).
    """
    if samples <= 0:
        raise ValueError("Monte Carlo budget must be positive")
    if seed is None:
        raise ValueError("Monte Carlo requires an explicit seed")
    d = P.dim
    w = np.array([float(x) for x in P.slab_normal])
    v = np.array([float(x) for x in P.objective_gradient])
    cw, cv = float(P.slab_offset), float(P.objective_offset)
    nshards = -(-samples // MC_SHARD)
    children = np.random.SeedSequence(seed).spawn(nshards)
    s1 = s2 = 0.0
    left = samples
    for ss in children:
        m = min(MC_SHARD, left)
        left -= m
        x = np.random.default_rng(ss).uniform(-1.0, 1.0, size=(m, d))
        inside = np.abs(cw + x @ w) <= 1
        f = np.where(inside, np.abs(cv + x @ v), 0.0)
        s1 += f.sum()
        s2 += (f * f).sum()
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    scale = 2.0**d
    return scale * mean, 3.0 * scale * math.sqrt(var / samples)


def integrate_abs_affine(
    P: SlabBoxPolytope,
    method: str = "exact",
    mc_budget: int = 10**6,
    seed: int | None = None,
    *,
    n: int = 0,
    xi: float = 0.0,
    t: float = 0.0,
) -> DensityPoint:
    if method == "exact":
        val = exact_abs_integral(P)
        return DensityPoint(n, xi, t, float(val), "exact", 0.0, val)
    if method in ("mc", "montecarlo"):
        est, err = mc_abs_integral(P, mc_budget, seed)
        return DensityPoint(n, xi, t, est, "montecarlo", err)
    raise ValueError(f"unknown method {method!r}")
