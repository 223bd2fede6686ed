"""Numerical roots with inclusion radii (Aberth iteration, Weierstrass-type bounds)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .univariate import trim


class PrecisionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RootReport:
    roots: tuple[complex, ...]
    radii: tuple[float, ...]
    separated: bool
    converged: bool
    digits: int

    @property
    def error_bound(self) -> float:
        return max(self.radii) if self.radii else 0.0


def _initial_guesses(coeffs, n):
    # points on a circle of Cauchy-bound radius, rotated off the real axis
    lead = abs(coeffs[-1])
    bound = 1 + max(abs(c) / lead for c in coeffs[:-1]) if n else 1
    return [bound * mpmath.expjpi(mpmath.mpf(2 * k) / n + mpmath.mpf(1) / (2 * n)) for k in range(n)]


def numeric_roots(p: Sequence[Fraction], digits: int = 30, max_iter: int = 500) -> RootReport:
    """All complex roots of a rational polynomial.

    Each root ``z_i`` carries the radius ``n * |p(z_i) / (lc * prod_{j!=i} (z_i - z_j))|``;
    when these disks are disjoint each holds exactly one true root.  The
    ``separated`` flag demands pairwise distances above twice the largest radius.
    """
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial")
    n = len(p) - 1
    if n == 0:
        return RootReport((), (), True, True, digits)
    with mpmath.workdps(digits + 10):
        c = [mpmath.mpf(x.numerator) / x.denominator for x in p]
        dc = [k * c[k] for k in range(1, n + 1)]
        z = _initial_guesses(c, n)
        tol = mpmath.mpf(10) ** (-digits)
        converged = False
        for _ in range(max_iter):
            biggest = 0
            new = list(z)
            for i in range(n):
                pv = mpmath.polyval(c[::-1], z[i])
                dv = mpmath.polyval(dc[::-1], z[i])
                if pv == 0:
                    continue
                ratio = pv / dv if dv != 0 else mpmath.mpf(10) ** digits
                s = mpmath.fsum(1 / (z[i] - z[j]) for j in range(n) if j != i and z[i] != z[j])
                w = ratio / (1 - ratio * s)
                new[i] = z[i] - w
                biggest = max(biggest, abs(w))
            z = new
            if biggest < tol * max(1, max(abs(x) for x in z)):
                converged = True
                break
        radii = []
        eps = mpmath.mpf(10) ** (-(digits + 10))
        for i in range(n):
            pv = mpmath.polyval(c[::-1], z[i])
            # Horner rounding error, so a vanishing residual cannot shrink the disk
            az = abs(z[i])
            pv = abs(pv) + 2 * (n + 1) * eps * mpmath.fsum(abs(ck) * az ** k for k, ck in enumerate(c))
            den = c[-1]
            for j in range(n):
                if j != i:
                    den *= (z[i] - z[j])
            if den == 0:
                radii.append(mpmath.inf)
            else:
                radii.append(n * abs(pv / den) + tol)
        for x in z:
            if not (mpmath.isfinite(x.real) and mpmath.isfinite(x.imag)):
                raise PrecisionError("root iteration produced non-finite values")
        worst = max(radii)
        separated = all(abs(z[i] - z[j]) > 2 * worst for i in range(n) for j in range(i + 1, n))
        roots = tuple(complex(x) for x in z)
        order = sorted(range(n), key=lambda i: (round(roots[i].real, 12), round(roots[i].imag, 12)))
        return RootReport(tuple(roots[i] for i in order),
                          tuple(float(radii[i]) for i in order),
                          bool(separated), converged, digits)
