"""Critical points in t where the shape of the omega regions changes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable


class NoRootError(ValueError):
    pass


@dataclass(frozen=True)
class ThresholdSet:
    n: int
    xi: float
    kind: str  # "quadratic": t1..t5, "general": t1, t2, t3
    values: tuple[float, ...]

    def __getitem__(self, i: int) -> float:
        """1-based access, ts[1] is t1."""
        return self.values[i - 1]


def quadratic_thresholds(xi: float) -> ThresholdSet:
    if not 0 < xi <= 0.25:
        raise NoRootError("quadratic thresholds need 0 < xi <= 1/4")
    r_plus = math.sqrt(1 + 4 * xi)
    r_minus = math.sqrt(max(0.0, 1 - 4 * xi))
    ts = (
        (r_plus - 1) / (2 * xi),
        (1 - r_minus) / (2 * xi),
        1 / math.sqrt(xi),
        (1 + r_minus) / (2 * xi),
        (1 + r_plus) / (2 * xi),
    )
    return ThresholdSet(2, xi, "quadratic", ts)


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    flo = f(lo)
    if flo == 0:
        return lo
    if (flo > 0) == (f(hi) > 0):
        raise NoRootError(f"no sign change on [{lo}, {hi}]")
    for _ in range(400):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def inner_equation(n: int, xi: float, t: float) -> float:
    """1 - sum_{k<n} t^-k - xi t; zero at t1 and t2."""
    return 1 - sum(t ** (-k) for k in range(1, n)) - xi * t


def outer_equation(n: int, xi: float, t: float) -> float:
    """1 + sum_{k<n} t^-k - xi t; zero at t3, beyond which omega vanishes."""
    return 1 + sum(t ** (-k) for k in range(1, n)) - xi * t


def outer_threshold(n: int, xi: float) -> float:
    if not 0 < xi < 1:
        raise NoRootError("need 0 < xi < 1")
    return _bisect(lambda t: outer_equation(n, xi, t), 1 / xi, 1 / xi + 1)


def general_thresholds(n: int, xi: float) -> ThresholdSet:
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 < xi < 0.125:
        raise NoRootError("general thresholds need 0 < xi < 1/8")
    f = lambda t: inner_equation(n, xi, t)  # noqa: E731
    t1 = _bisect(f, 1.0, 1 / (2 * xi))
    t2 = _bisect(f, 1 / (2 * xi), 1 / xi)
    t3 = outer_threshold(n, xi)
    ts = ThresholdSet(n, xi, "general", (t1, t2, t3))
    # t3 sits within ~xi^(n-1) of 1/xi + 1, below float resolution for small xi
    if not (1 < t1 < t2 < 1 / xi < t3 <= 1 / xi + 1):
        raise NoRootError(f"threshold ordering violated: {ts.values}")
    return ts


def thresholds(n: int, xi: float, kind: str | None = None) -> ThresholdSet:
    kind = kind or ("quadratic" if n == 2 else "general")
    if kind == "quadratic":
        if n != 2:
            raise ValueError("quadratic thresholds exist only for n = 2")
        return quadratic_thresholds(xi)
    if kind == "general":
        return general_thresholds(n, xi)
    raise ValueError(f"unknown threshold kind {kind!r}")
