"""Univariate quotient rings ``B[u]/(m(u))`` over a coefficient ring ``B``.

``B`` is either a :class:`~qcoh.algebra.poly.Ring` (coefficients are
:class:`JetPolynomial`) or another :class:`QuotientRing`, which gives towers
such as ``Q[q^±][u]/(m(u))[v]/(m(v)/(v-u))`` used to hold two distinct roots
of one characteristic polynomial at once.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import DivisionError, JetPolynomial, Ring


class NotInvertibleError(DivisionError):
    pass


def _base_zero(base):
    return base.zero()


def _base_coerce(base, x):
    if isinstance(base, Ring):
        if isinstance(x, JetPolynomial):
            if x.ring != base:
                return x.to_ring(base)
            return x
        return base.const(x)
    return base.coerce(x)


class QuotientRing:
    """``base[var] / (modulus)`` with a monic modulus.

    ``modulus`` is given low-to-high as coefficients in ``base``; the leading
    coefficient must be one.
    """

    def __init__(self, base, var: str, modulus: Sequence):
        self.base = base
        self.var = var
        coeffs = [_base_coerce(base, c) for c in modulus]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError("modulus must have positive degree")
        if coeffs[-1] != _base_coerce(base, 1):
            raise ValueError("modulus must be monic")
        self.modulus = tuple(coeffs)
        self.degree = len(coeffs) - 1

    @classmethod
    def from_poly(cls, base, var: str, poly: JetPolynomial, coeff_map=None):
        """Build from a JetPolynomial that is monic in ``var``."""
        parts = poly.coefficients_in(var)
        deg = max(parts)
        coeffs = []
        for k in range(deg + 1):
            c = parts.get(k, poly.ring.zero())
            coeffs.append(coeff_map(c) if coeff_map else c)
        return cls(base, var, coeffs)

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, QuotientRing) and self.var == other.var
                and self.base == other.base and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.var, self.modulus))

    def __repr__(self):
        return f"QuotientRing({self.var}, deg={self.degree})"

    # -- construction ---------------------------------------------------------

    def zero(self) -> "QuotientElement":
        return QuotientElement(self, ())

    def one(self) -> "QuotientElement":
        return self.coerce(1)

    def gen(self) -> "QuotientElement":
        b = self.base
        return self.element([_base_zero(b), _base_coerce(b, 1)])

    def element(self, coeffs) -> "QuotientElement":
        return QuotientElement(self, tuple(_base_coerce(self.base, c) for c in coeffs)).reduced()

    def coerce(self, x) -> "QuotientElement":
        if isinstance(x, QuotientElement):
            if x.parent == self:
                return x
            return QuotientElement(self, (_base_coerce(self.base, x),))._trim()
        return QuotientElement(self, (_base_coerce(self.base, x),))._trim()

    def base_ring(self) -> Ring:
        b = self.base
        while isinstance(b, QuotientRing):
            b = b.base
        return b

    def tower(self) -> list["QuotientRing"]:
        out = [self]
        b = self.base
        while isinstance(b, QuotientRing):
            out.append(b)
            b = b.base
        return out[::-1]


class QuotientElement:
    __slots__ = ("parent", "coeffs")

    def __init__(self, parent: QuotientRing, coeffs: tuple):
        self.parent = parent
        self.coeffs = coeffs

    def _trim(self) -> "QuotientElement":
        c = list(self.coeffs)
        while c and c[-1].is_zero():
            c.pop()
        return QuotientElement(self.parent, tuple(c))

    def reduced(self) -> "QuotientElement":
        p = self.parent
        c = list(self.coeffs)
        n = p.degree
        mod = p.modulus
        while len(c) > n:
            top = c.pop()
            if top.is_zero():
                continue
            shift = len(c) - n
            for k in range(n):
                c[shift + k] = c[shift + k] - top * mod[k]
        while c and c[-1].is_zero():
            c.pop()
        return QuotientElement(p, tuple(c))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def _other(self, other):
        if isinstance(other, QuotientElement) and other.parent == self.parent:
            return other
        try:
            return self.parent.coerce(other)
        except (TypeError, AttributeError):
            return NotImplemented

    def __eq__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        return hash(tuple(self._trim().coeffs))

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        n = max(len(a), len(b))
        z = _base_zero(self.parent.base)
        out = tuple((a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n))
        return QuotientElement(self.parent, out)._trim()

    __radd__ = __add__

    def __neg__(self):
        return QuotientElement(self.parent, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuotientElement(self.parent, tuple(c * other for c in self.coeffs))._trim()
        o = self._other(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return self.parent.zero()
        z = _base_zero(self.parent.base)
        out = [z] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x.is_zero():
                continue
            for j, y in enumerate(b):
                if y.is_zero():
                    continue
                out[i + j] = out[i + j] + x * y
        return QuotientElement(self.parent, tuple(out)).reduced()

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.parent.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    # -- inversion ------------------------------------------------------------

    def inverse(self) -> "QuotientElement":
        """Inverse via the extended Euclidean algorithm in ``base[var]``.

        Each division step needs a unit leading coefficient in ``base``; for the
        weighted-homogeneous moduli handled here those are monomials in the
        Novikov variable (or invertible elements of a lower tower level).
        """
        p = self.parent
        base = p.base
        if self.is_zero():
            raise NotInvertibleError("zero is not invertible")
        zero = _base_zero(base)
        one = _base_coerce(base, 1)

        def trim(c):
            c = list(c)
            while c and c[-1].is_zero():
                c.pop()
            return c

        def divmod_poly(a, b):
            a = list(a)
            lead_inv = _base_inverse(b[-1])
            q = [zero] * max(len(a) - len(b) + 1, 1)
            while len(a) >= len(b) and a:
                f = a[-1] * lead_inv
                s = len(a) - len(b)
                q[s] = q[s] + f
                for k in range(len(b)):
                    a[s + k] = a[s + k] - f * b[k]
                a = trim(a)
            return trim(q), a

        def sub(a, b):
            n = max(len(a), len(b))
            return trim([(a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero)
                         for i in range(n)])

        def mul(a, b):
            if not a or not b:
                return []
            out = [zero] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    out[i + j] = out[i + j] + x * y
            return trim(out)

        r0, r1 = list(p.modulus), trim(self.coeffs)
        s0, s1 = [], [one]
        while len(r1) > 1:
            q, r = divmod_poly(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, sub(s0, mul(q, s1))
            if not r1:
                raise NotInvertibleError("element shares a factor with the modulus")
        inv_c = _base_inverse(r1[0])
        return p.element([c * inv_c for c in s1])

    # -- misc -----------------------------------------------------------------

    def map_coeffs(self, fn, parent: QuotientRing | None = None) -> "QuotientElement":
        parent = parent or self.parent
        return parent.element([fn(c) for c in self.coeffs])

    def lift(self) -> list:
        """Representative coefficients, low to high, padded to the modulus degree."""
        z = _base_zero(self.parent.base)
        c = list(self.coeffs)
        c += [z] * (self.parent.degree - len(c))
        return c

    def __str__(self):
        v = self.parent.var
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            s = str(c)
            if k == 0:
                parts.append(f"({s})")
            else:
                parts.append(f"({s})*{v}^{k}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def _base_inverse(x):
    try:
        return x.inverse()
    except DivisionError as exc:
        raise NotInvertibleError(str(exc)) from exc


def quotient_ops(a: QuotientElement, b: QuotientElement | None, op: str) -> QuotientElement:
    """Dispatch ``add`` / ``mul`` / ``inverse`` on elements sharing one modulus."""
    if b is not None and b.parent != a.parent:
        raise ValueError("elements live in different quotient rings")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inverse":
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


def embed(x, target: QuotientRing):
    """Embed an element of any ring below ``target`` in its tower (or a rational)."""
    if isinstance(x, QuotientElement):
        if x.parent == target:
            return x
        if x.parent in target.tower():
            # climb one level at a time
            chain = target.tower()
            i = chain.index(x.parent)
            y = x
            for level in chain[i + 1:]:
                y = level.coerce(y)
            return y
        raise ValueError("element is not in the tower of the target ring")
    return target.coerce(_embed_base(x, target))


def _embed_base(x, target: QuotientRing):
    bottom = target.tower()[0]
    y = _base_coerce(bottom.base, x)
    return y


def synthetic_division(coeffs: Sequence, root) -> tuple[list, object]:
    """Divide ``sum coeffs[k] X^k`` by ``X - root``; return (quotient, remainder)."""
    n = len(coeffs) - 1
    q = [None] * n
    acc = coeffs[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = coeffs[k] + acc * root
    return q, acc
