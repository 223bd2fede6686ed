"""Square matrices over exact commutative rings: determinants and characteristic polynomials."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import JetPolynomial, Ring
from .quotient import QuotientElement


class NonSquareError(ValueError):
    pass


def _zero_like(x):
    if isinstance(x, JetPolynomial):
        return x.ring.zero()
    if isinstance(x, QuotientElement):
        return x.parent.zero()
    return Fraction(0)


def _one_like(x):
    if isinstance(x, JetPolynomial):
        return x.ring.one()
    if isinstance(x, QuotientElement):
        return x.parent.one()
    return Fraction(1)


def _is_zero(x) -> bool:
    if isinstance(x, (JetPolynomial, QuotientElement)):
        return x.is_zero()
    return x == 0


class ExactMatrix:
    """Immutable square matrix; ``rows[i][j]`` is the entry in row i, column j.

    Column ``j`` holds the image of basis vector ``j`` when the matrix
    represents a multiplication operator.
    """

    def __init__(self, rows: Sequence[Sequence]):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise NonSquareError("matrix must be square")
        self.rows = rows
        self.n = n

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "ExactMatrix":
        n = len(cols)
        if any(len(c) != n for c in cols):
            raise NonSquareError("matrix must be square")
        return cls([[cols[j][i] for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def column(self, j) -> list:
        return [self.rows[i][j] for i in range(self.n)]

    def map(self, fn) -> "ExactMatrix":
        return ExactMatrix([[fn(x) for x in r] for r in self.rows])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        n = self.n
        if other.n != n:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = _zero_like(self.rows[i][0])
                for k in range(n):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if _is_zero(a) or _is_zero(b):
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ExactMatrix(out)

    def apply(self, vec: Sequence) -> list:
        n = self.n
        out = []
        for i in range(n):
            acc = _zero_like(self.rows[i][0])
            for k in range(n):
                a, b = self.rows[i][k], vec[k]
                if _is_zero(a) or _is_zero(b):
                    continue
                acc = acc + a * b
            out.append(acc)
        return out

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c) -> "ExactMatrix":
        return self.map(lambda x: x * c)

    def identity_like(self) -> "ExactMatrix":
        one = _one_like(self.rows[0][0])
        zero = _zero_like(self.rows[0][0])
        return ExactMatrix([[one if i == j else zero for j in range(self.n)] for i in range(self.n)])

    def is_zero(self) -> bool:
        return all(_is_zero(x) for r in self.rows for x in r)

    def det(self):
        return determinant(self)


def determinant(m: ExactMatrix):
    """Bareiss elimination over integral domains, cofactor expansion otherwise."""
    sample = m.rows[0][0] if m.n else Fraction(1)
    if m.n == 0:
        return Fraction(1)
    if isinstance(sample, JetPolynomial) and sample.ring.jet_positions:
        return _cofactor_det(m)
    if isinstance(sample, QuotientElement):
        return _cofactor_det(m)
    return _bareiss_det(m)


def _exact_div(a, b):
    if isinstance(a, JetPolynomial):
        return a.exact_div(b)
    return a / b


def _bareiss_det(m: ExactMatrix):
    n = m.n
    a = [list(r) for r in m.rows]
    zero = _zero_like(a[0][0])
    sign = 1
    prev = _one_like(a[0][0])
    for k in range(n - 1):
        if _is_zero(a[k][k]):
            swap = next((i for i in range(k + 1, n) if not _is_zero(a[i][k])), None)
            if swap is None:
                return zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * piv - a[i][k] * a[k][j]
                a[i][j] = _exact_div(num, prev) if not _is_zero(num) else zero
            a[i][k] = zero
        prev = piv
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def _cofactor_det(m: ExactMatrix):
    """Laplace expansion along rows, memoised on the set of remaining columns."""
    n = m.n
    rows = m.rows
    zero = _zero_like(rows[0][0])
    memo: dict[int, object] = {}

    def minor(row: int, cols: int):
        if row == n:
            return _one_like(rows[0][0])
        if cols in memo:
            return memo[cols]
        acc = zero
        sign = 1
        for j in range(n):
            bit = 1 << j
            if cols & bit:
                x = rows[row][j]
                if not _is_zero(x):
                    sub = minor(row + 1, cols & ~bit)
                    term = x * sub
                    acc = acc + term if sign > 0 else acc - term
                sign = -sign
        memo[cols] = acc
        return acc

    return minor(0, (1 << n) - 1)


def _lift_entry(x, ring: Ring):
    if isinstance(x, JetPolynomial):
        return x.to_ring(ring)
    return ring.const(x)


def char_poly(m: ExactMatrix, var: str = "lam") -> JetPolynomial:
    """``det(var * id - m)`` as a polynomial in a ring extended by ``var``."""
    sample = m.rows[0][0]
    base = sample.ring if isinstance(sample, JetPolynomial) else Ring((), ())
    if isinstance(sample, QuotientElement):
        raise TypeError("use char_poly_coeffs for quotient-ring entries")
    ring = base.extend(poly=(var,)) if var not in base.index else base
    lam = ring.var(var)
    n = m.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            e = -_lift_entry(m.rows[i][j], ring)
            if i == j:
                e = e + lam
            row.append(e)
        rows.append(row)
    return determinant(ExactMatrix(rows))


def char_poly_coeffs(m: ExactMatrix) -> list:
    """Coefficients (low to high) of ``det(X id - m)`` via Faddeev-LeVerrier.

    Works over any commutative Q-algebra, including quotient and jet rings.
    """
    n = m.n
    ident = m.identity_like()
    coeffs = [None] * (n + 1)
    one = _one_like(m.rows[0][0])
    coeffs[n] = one
    mk = m
    for k in range(1, n + 1):
        tr = mk.rows[0][0]
        for i in range(1, n):
            tr = tr + mk.rows[i][i]
        c = tr * Fraction(-1, k)
        coeffs[n - k] = c
        if k < n:
            mk = m @ (mk + ident.scale(c))
    return coeffs


def evaluate_matrix_poly(coeffs: Sequence, m: ExactMatrix) -> ExactMatrix:
    """Horner evaluation of ``sum coeffs[k] m^k`` (coefficients low to high)."""
    ident = m.identity_like()
    acc = ident.scale(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = (acc @ m) + ident.scale(c)
    return acc
