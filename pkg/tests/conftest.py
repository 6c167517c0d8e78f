from itertools import product

import pytest

from algint.poly import MonicIntPoly


def _mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def brute_force_reducible(p: MonicIntPoly) -> bool:
    """Search every monic factor pair with coefficients bounded by 2 (1 + H)."""
    c = p.full_coeffs
    n = p.degree
    H = max(1, max(abs(x) for x in p.coeffs))
    B = 2 * (1 + H)
    rng = range(-B, B + 1)
    for k in range(1, n // 2 + 1):
        for f in product(rng, repeat=k):
            fc = f + (1,)
            # a monic cofactor of degree n - k is determined by long division
            rem = list(c)
            q = [0] * (n - k + 1)
            for i in range(n - k, -1, -1):
                q[i] = rem[i + k]
                for j in range(k + 1):
                    rem[i + j] -= q[i] * fc[j]
            if not any(rem) and _mul(fc, q) == c:
                return True
    return False


@pytest.fixture(scope="session")
def reducible_oracle():
    return brute_force_reducible


ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the acceptance summary."""

    def record(label: str, ok: bool, detail: str) -> bool:
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
