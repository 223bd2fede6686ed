"""Truncated multivariate Laurent/jet polynomials with exact rational coefficients.

A :class:`Ring` names its generators and assigns each one a kind:

``laurent``
    group-like variable (Novikov variables ``q``, ``q0`` ... ``q8``); exponents
    may be negative.  Laurent variables are *exponential*: the derivation
    attached to them is ``q d/dq``.
``jet``
    nilpotent deformation coordinate.  All jet variables together generate an
    ideal ``J`` and monomials of total jet degree ``>= jet_order`` are dropped
    (default ``jet_order = 2``, so ``x2*x3 = z*x2 = 0``).
``poly``
    ordinary polynomial variable (``u``, ``lam``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Iterable, Mapping

KINDS = ("laurent", "jet", "poly")


class RingMismatchError(ValueError):
    pass


class DivisionError(ArithmeticError):
    """Raised when an exact division or inversion is impossible."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class Ring:
    names: tuple[str, ...]
    kinds: tuple[str, ...]
    jet_order: int = 2

    def __post_init__(self):
        if len(self.names) != len(self.kinds):
            raise ValueError("names and kinds differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        for k in self.kinds:
            if k not in KINDS:
                raise ValueError(f"unknown variable kind {k!r}")
        if self.jet_order < 1:
            raise ValueError("jet_order must be positive")

    @classmethod
    def build(cls, laurent=(), jet=(), poly=(), jet_order: int = 2) -> "Ring":
        names = tuple(laurent) + tuple(jet) + tuple(poly)
        kinds = ("laurent",) * len(laurent) + ("jet",) * len(jet) + ("poly",) * len(poly)
        return cls(names, kinds, jet_order)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    @cached_property
    def jet_positions(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.kinds) if k == "jet")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def zero(self) -> "JetPolynomial":
        return JetPolynomial(self, {})

    def one(self) -> "JetPolynomial":
        return self.const(1)

    def const(self, c) -> "JetPolynomial":
        c = as_fraction(c)
        if not c:
            return self.zero()
        return JetPolynomial(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "JetPolynomial":
        return self.monomial({name: 1})

    def monomial(self, exps: Mapping[str, int], coeff=1) -> "JetPolynomial":
        e = [0] * self.nvars
        for n, k in exps.items():
            i = self.index[n]
            if k < 0 and self.kinds[i] != "laurent":
                raise ValueError(f"negative exponent for non-Laurent variable {n}")
            e[i] = k
        return JetPolynomial(self, {tuple(e): as_fraction(coeff)})

    def gens(self) -> tuple["JetPolynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def extend(self, laurent=(), jet=(), poly=()) -> "Ring":
        """Ring with extra generators appended (existing exponent vectors stay valid)."""
        names = self.names + tuple(laurent) + tuple(jet) + tuple(poly)
        kinds = (self.kinds + ("laurent",) * len(laurent) + ("jet",) * len(jet)
                 + ("poly",) * len(poly))
        return Ring(names, kinds, self.jet_order)

    def jet_degree(self, exps: tuple[int, ...]) -> int:
        return sum(exps[i] for i in self.jet_positions)

    def parse(self, text: str) -> "JetPolynomial":
        return parse_poly(self, text)


class JetPolynomial:
    """Immutable element of a :class:`Ring`.

    ``terms`` maps exponent tuples to nonzero :class:`~fractions.Fraction`
    coefficients.  Terms whose jet degree reaches the ring's truncation order
    are never stored.
    """

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[tuple[int, ...], Fraction]):
        self.ring = ring
        jp = ring.jet_positions
        order = ring.jet_order
        clean = {}
        for e, c in terms.items():
            if not c:
                continue
            if jp and sum(e[i] for i in jp) >= order:
                continue
            clean[e] = c if isinstance(c, Fraction) else Fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "JetPolynomial":
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> Mapping[tuple[int, ...], Fraction]:
        return self._terms

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other) -> "JetPolynomial":
        if isinstance(other, JetPolynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring.names} vs {other.ring.names}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, JetPolynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return JetPolynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return JetPolynomial._raw(self.ring, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "JetPolynomial":
        c = as_fraction(c)
        if not c:
            return self.ring.zero()
        return JetPolynomial._raw(self.ring, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return jet_multiply(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / as_fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- structure -----------------------------------------------------------

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.ring.nvars, Fraction(0))

    def is_constant(self) -> bool:
        zero = (0,) * self.ring.nvars
        return all(e == zero for e in self._terms)

    def jet_part(self, degree: int) -> "JetPolynomial":
        """Terms of exactly the given total jet degree."""
        r = self.ring
        return JetPolynomial._raw(r, {e: c for e, c in self._terms.items()
                                      if r.jet_degree(e) == degree})

    def split_unit(self):
        """Return ``(monomial_part, nilpotent_part)`` if this is a unit, else raise.

        A unit is ``c * m + n`` with ``m`` a monomial in Laurent variables only
        and ``n`` of positive jet degree.
        """
        r = self.ring
        head = self.jet_part(0)
        if len(head) != 1:
            raise DivisionError(f"not a unit: {self}")
        (e, c), = head.items()
        for i, k in enumerate(r.kinds):
            if e[i] and k != "laurent":
                raise DivisionError(f"not a unit: {self}")
        return head, self - head

    def inverse(self) -> "JetPolynomial":
        head, nil = self.split_unit()
        (e, c), = head.items()
        inv_head = JetPolynomial._raw(self.ring, {tuple(-k for k in e): 1 / c})
        if nil.is_zero():
            return inv_head
        # (m + n)^-1 = m^-1 * sum_k (-n/m)^k, finite because n is nilpotent
        t = -(nil * inv_head)
        acc = self.ring.one()
        power = self.ring.one()
        for _ in range(self.ring.jet_order):
            power = power * t
            if power.is_zero():
                break
            acc = acc + power
        return inv_head * acc

    def degree_in(self, name: str) -> int:
        i = self.ring.index[name]
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def min_degree_in(self, name: str) -> int:
        i = self.ring.index[name]
        if not self._terms:
            raise ValueError("zero polynomial has no minimal degree")
        return min(e[i] for e in self._terms)

    def coefficients_in(self, name: str) -> dict[int, "JetPolynomial"]:
        """Split as ``sum_k c_k * name^k`` with ``c_k`` free of ``name``."""
        i = self.ring.index[name]
        out: dict[int, dict] = {}
        for e, c in self._terms.items():
            k = e[i]
            e2 = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[e2] = c
        return {k: JetPolynomial._raw(self.ring, t) for k, t in out.items()}

    def derivative(self, name: str) -> "JetPolynomial":
        """Derivation attached to a generator.

        For Laurent (exponential) variables this is ``q d/dq``; otherwise it is
        the ordinary partial derivative.
        """
        r = self.ring
        i = r.index[name]
        out = {}
        if r.kinds[i] == "laurent":
            for e, c in self._terms.items():
                if e[i]:
                    out[e] = c * e[i]
        else:
            for e, c in self._terms.items():
                k = e[i]
                if k:
                    out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return JetPolynomial(r, out)

    def subs(self, values: Mapping[str, object]) -> "JetPolynomial":
        """Substitute rational values for some generators (exponents zeroed)."""
        r = self.ring
        idx = [(r.index[n], as_fraction(v)) for n, v in values.items()]
        for i, v in idx:
            if v == 0 and r.kinds[i] == "laurent":
                if any(e[i] < 0 for e in self._terms):
                    raise ZeroDivisionError(f"negative power of {r.names[i]} at 0")
        out: dict = {}
        for e, c in self._terms.items():
            e2 = list(e)
            for i, v in idx:
                k = e[i]
                if k:
                    c = c * v ** k
                    e2[i] = 0
            if c:
                t = tuple(e2)
                s = out.get(t, 0) + c
                if s:
                    out[t] = s
                else:
                    out.pop(t, None)
        return JetPolynomial._raw(r, out)

    def substitute(self, values: Mapping[str, "JetPolynomial"]) -> "JetPolynomial":
        """Substitute ring elements for generators (negative powers need units)."""
        r = self.ring
        result = r.zero()
        cache: dict = {}

        def power(name, k):
            key = (name, k)
            if key not in cache:
                cache[key] = values[name] ** k
            return cache[key]

        for e, c in self._terms.items():
            term = r.const(c)
            e2 = list(e)
            for n in values:
                i = r.index[n]
                if e[i]:
                    term = term * power(n, e[i])
                    e2[i] = 0
            rest = JetPolynomial._raw(r, {tuple(e2): Fraction(1)})
            result = result + term * rest
        return result

    def map_exponents(self, fn, ring: Ring | None = None) -> "JetPolynomial":
        """Apply an exponent-vector map (used for torus substitutions and ring changes)."""
        ring = ring or self.ring
        out: dict = {}
        for e, c in self._terms.items():
            e2 = fn(e)
            if e2 in out:
                s = out[e2] + c
                if s:
                    out[e2] = s
                else:
                    del out[e2]
            else:
                out[e2] = c
        return JetPolynomial(ring, out)

    def to_ring(self, ring: Ring) -> "JetPolynomial":
        """Move into another ring by variable name; missing names must not occur."""
        src = self.ring
        pos = []
        for i, n in enumerate(src.names):
            pos.append(ring.index.get(n))
        def fn(e):
            out = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    j = pos[i]
                    if j is None:
                        raise RingMismatchError(f"variable {src.names[i]} absent from target ring")
                    out[j] = k
            return tuple(out)
        return self.map_exponents(fn, ring)

    def exact_div(self, other: "JetPolynomial") -> "JetPolynomial":
        """Exact quotient in an integral domain (no jet variables)."""
        other = self._coerce(other)
        r = self.ring
        if r.jet_positions:
            raise DivisionError("exact division is only defined without jet variables")
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        if len(other) == 1:
            (e, c), = other.items()
            q = {tuple(a - b for a, b in zip(x, e)): v / c for x, v in self._terms.items()}
            if any(k < 0 and r.kinds[i] != "laurent" for x in q for i, k in enumerate(x)):
                raise DivisionError("division is not exact")
            return JetPolynomial._raw(r, q)
        # shift both into the polynomial ring, then long division in lex order
        n = r.nvars
        lo_a = [min(e[i] for e in self._terms) for i in range(n)]
        lo_b = [min(e[i] for e in other._terms) for i in range(n)]
        shift = [min(0, a) for a in lo_a]
        bshift = [min(0, b) for b in lo_b]
        a = {tuple(x - s for x, s in zip(e, shift)): c for e, c in self._terms.items()}
        b = {tuple(x - s for x, s in zip(e, bshift)): c for e, c in other._terms.items()}
        lead_b = max(b)
        cb = b[lead_b]
        quot: dict = {}
        rem = dict(a)
        while rem:
            lead = max(rem)
            m = tuple(x - y for x, y in zip(lead, lead_b))
            if any(k < 0 for k in m):
                raise DivisionError("division is not exact")
            f = rem[lead] / cb
            quot[m] = quot.get(m, 0) + f
            for e, c in b.items():
                t = tuple(x + y for x, y in zip(e, m))
                s = rem.get(t, 0) - f * c
                if s:
                    rem[t] = s
                else:
                    rem.pop(t, None)
        net = [s - bs for s, bs in zip(shift, bshift)]
        q = {tuple(x + s for x, s in zip(e, net)): c for e, c in quot.items() if c}
        for e in q:
            for i, k in enumerate(e):
                if k < 0 and r.kinds[i] != "laurent":
                    raise DivisionError("quotient leaves the polynomial ring")
        return JetPolynomial._raw(r, q)

    # -- text ---------------------------------------------------------------

    def sorted_terms(self):
        """Terms in graded-lexicographic order (highest total degree first)."""
        return sorted(self._terms.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))

    def canonical(self) -> str:
        return format_poly(self)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"JetPolynomial({format_poly(self)!r})"


def jet_multiply(a: JetPolynomial, b: JetPolynomial) -> JetPolynomial:
    """Product in the common ring, discarding monomials beyond the jet order."""
    if a.ring != b.ring:
        raise RingMismatchError(f"{a.ring.names} vs {b.ring.names}")
    r = a.ring
    ta, tb = a._terms, b._terms
    if not ta or not tb:
        return r.zero()
    if len(ta) > len(tb):
        ta, tb = tb, ta
    jp = r.jet_positions
    order = r.jet_order
    out: dict = {}
    get = out.get
    if jp:
        jb = [(e, c, sum(e[i] for i in jp)) for e, c in tb.items()]
        for e1, c1 in ta.items():
            d1 = sum(e1[i] for i in jp)
            if d1 >= order:
                continue
            for e2, c2, d2 in jb:
                if d1 + d2 >= order:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
    else:
        for e1, c1 in ta.items():
            for e2, c2 in tb.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
    return JetPolynomial._raw(r, {e: c for e, c in out.items() if c})


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: JetPolynomial) -> str:
    """Canonical text: grlex order, explicit exponents, e.g. ``u^4 - 108*q^1*u^1``."""
    if p.is_zero():
        return "0"
    names = p.ring.names
    parts = []
    for e, c in p.sorted_terms():
        mono = "*".join(f"{names[i]}^{k}" for i, k in enumerate(e) if k)
        neg = c < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{_format_coeff(mag)}*{mono}"
        else:
            body = _format_coeff(mag)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def parse_poly(ring: Ring, text: str) -> JetPolynomial:
    """Inverse of :func:`format_poly` (accepts its output and simple variants)."""
    s = text.replace(" ", "")
    if s in ("", "0"):
        return ring.zero()
    # split into signed terms, keeping '^-' exponents intact
    terms = []
    buf = ""
    for i, ch in enumerate(s):
        if ch in "+-" and buf and s[i - 1] != "^":
            terms.append(buf)
            buf = ch
        else:
            buf += ch
    terms.append(buf)
    out: dict = {}
    for t in terms:
        sign = 1
        if t[0] in "+-":
            sign = -1 if t[0] == "-" else 1
            t = t[1:]
        coeff = Fraction(sign)
        e = [0] * ring.nvars
        for f in t.split("*"):
            if not f:
                continue
            if f[0].isdigit():
                coeff *= Fraction(f)
                continue
            if "^" in f:
                n, k = f.split("^")
                k = int(k)
            else:
                n, k = f, 1
            if n not in ring.index:
                raise ValueError(f"unknown variable {n!r} in {text!r}")
            e[ring.index[n]] += k
        key = tuple(e)
        out[key] = out.get(key, 0) + coeff
    return JetPolynomial(ring, out)


def multinomial_factor(exps: Iterable[int]) -> int:
    """Product of factorials of an exponent vector (``m!`` for multi-indices)."""
    f = 1
    for k in exps:
        f *= factorial(k)
    return f
