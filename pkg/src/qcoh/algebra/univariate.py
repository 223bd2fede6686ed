"""Dense univariate polynomials over Q (coefficient lists, low degree first)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as igcd
from typing import Sequence

from .matrix import ExactMatrix, determinant
from .poly import JetPolynomial


def trim(p: Sequence[Fraction]) -> list[Fraction]:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def from_jet(poly: JetPolynomial, var: str) -> list[Fraction]:
    """Coefficient list of a polynomial that involves only ``var``."""
    parts = poly.coefficients_in(var)
    if not parts:
        return []
    out = [Fraction(0)] * (max(parts) + 1)
    for k, c in parts.items():
        if k < 0:
            raise ValueError("negative power in univariate conversion")
        if not c.is_constant():
            raise ValueError(f"coefficient of {var}^{k} is not rational: {c}")
        out[k] = c.constant_term()
    return trim(out)


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def derivative(p: Sequence[Fraction]) -> list[Fraction]:
    return trim([k * c for k, c in enumerate(p)][1:])


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def divmod_poly(a: Sequence[Fraction], b: Sequence[Fraction]):
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        f = r[-1] / lead
        s = len(r) - len(b)
        q[s] += f
        for k, c in enumerate(b):
            r[s + k] -= f * c
        r = trim(r)
    return trim(q), r


def monic(p: Sequence[Fraction]) -> list[Fraction]:
    p = trim(p)
    if not p:
        return p
    return [c / p[-1] for c in p]


def gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a, b = trim(a), trim(b)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a)


def mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def resultant(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    """Determinant of the Sylvester matrix."""
    a, b = trim(a), trim(b)
    m, n = len(a) - 1, len(b) - 1
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0 and n == 0:
        return Fraction(1)
    size = m + n
    rows = []
    for i in range(n):
        row = [Fraction(0)] * size
        for k, c in enumerate(reversed(a)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [Fraction(0)] * size
        for k, c in enumerate(reversed(b)):
            row[i + k] = c
        rows.append(row)
    return determinant(ExactMatrix(rows))


@dataclass(frozen=True)
class SquarefreeReport:
    discriminant: Fraction
    is_squarefree: bool
    gcd_degree: int


def squarefree_discriminant(p: Sequence[Fraction]) -> SquarefreeReport:
    """Discriminant ``(-1)^(n(n-1)/2) res(p, p') / lc(p)`` and a gcd-based squarefree flag."""
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial has no discriminant")
    n = len(p) - 1
    dp = derivative(p)
    g = gcd(p, dp) if dp else monic(p)
    if n == 0:
        return SquarefreeReport(Fraction(1), True, 0)
    res = resultant(p, dp)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    disc = sign * res / p[-1]
    return SquarefreeReport(disc, len(g) - 1 == 0, len(g) - 1)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = set()
    k = 1
    while k * k <= n:
        if n % k == 0:
            out.add(k)
            out.add(n // k)
        k += 1
    return sorted(out)


def rational_roots(p: Sequence[Fraction]) -> list[Fraction]:
    """Distinct rational roots, by the rational root test on the integer primitive form."""
    p = trim(p)
    if len(p) <= 1:
        return []
    roots = []
    # strip zero roots
    while p and p[0] == 0:
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
        p = p[1:]
    if len(p) <= 1:
        return roots
    den = 1
    for c in p:
        den = den * c.denominator // igcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    for num in _divisors(ints[0]):
        for dd in _divisors(ints[-1]):
            for s in (1, -1):
                x = Fraction(s * num, dd)
                if x not in roots and evaluate(p, x) == 0:
                    roots.append(x)
    return sorted(roots)


def to_string(p: Sequence[Fraction], var: str = "x") -> str:
    p = trim(p)
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mag = -c if c < 0 else c
        coef = "" if (mag == 1 and k) else (str(mag.numerator) if mag.denominator == 1
                                             else f"{mag.numerator}/{mag.denominator}")
        mono = "" if k == 0 else (f"{var}^{k}")
        body = f"{coef}*{mono}" if coef and mono else (coef or mono)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)
