"""Quantum cohomology of Fano manifolds with one-dimensional H^{p,p} for every p.

Basis ``Delta_0 .. Delta_r`` with ``Delta_1`` the ample generator; the
correlator symbol ``[d; a_1, ..., a_k]`` is the genus-zero invariant with
insertions ``Delta_{a_i}`` in degree ``d`` against ``Delta_{r-1}``.  Insertions of
``Delta_1`` are absorbed by the divisor axiom and the Novikov variable is
identified with ``exp(x_1)``, so ``Delta_1`` acts on coefficient functions as
``q d/dq``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from math import factorial
from typing import Iterable, Mapping, Sequence

from .algebra.matrix import ExactMatrix, char_poly
from .algebra.poly import DivisionError, JetPolynomial, Ring, multinomial_factor
from .algebra.quotient import QuotientElement, QuotientRing, synthetic_division
from .algebra import univariate


class CorrelatorError(ValueError):
    pass


class InconsistentSeedsError(CorrelatorError):
    """An associativity constraint is violated by the supplied data."""


class UnderdeterminedError(CorrelatorError):
    def __init__(self, keys, rank=None):
        self.keys = tuple(keys)
        self.rank = rank
        super().__init__("undetermined correlators: " + ", ".join(str(k) for k in self.keys))


class IncompleteTableError(CorrelatorError):
    pass


class SymmetryError(ArithmeticError):
    pass


# -- manifolds ----------------------------------------------------------------


@dataclass(frozen=True)
class MinimalFano:
    """Fano manifold of dimension ``r`` with minimal (p,p)-cohomology.

    ``intersections`` maps sorted triples ``(a, b, c)`` with ``a + b + c = r`` to
    the triple intersection number of ``Delta_a, Delta_b, Delta_c``.
    """

    name: str
    r: int
    rho: int
    delta: int
    intersections: Mapping[tuple[int, int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if not self.intersections and self.r == 3:
            object.__setattr__(self, "intersections", {
                (0, 0, 3): Fraction(1), (0, 1, 2): Fraction(1), (1, 1, 1): Fraction(self.delta)})
        for (a, b, c) in self.intersections:
            if a + b + c != self.r:
                raise ValueError(f"intersection {(a, b, c)} has wrong total degree")

    def triple(self, a: int, b: int, c: int) -> Fraction:
        return self.intersections.get(tuple(sorted((a, b, c))), Fraction(0))

    def classical_cubic(self) -> dict[tuple[int, ...], Fraction]:
        """Coefficients of ``(sum x_p Delta_p)^3`` integrated, keyed by exponent vectors."""
        out: dict[tuple[int, ...], Fraction] = {}
        for a, b, c in itertools.product(range(self.r + 1), repeat=3):
            v = self.triple(a, b, c)
            if v:
                e = [0] * (self.r + 1)
                for i in (a, b, c):
                    e[i] += 1
                out[tuple(e)] = out.get(tuple(e), Fraction(0)) + v
        return out

    @property
    def dim(self) -> int:
        return self.r + 1

    def jet_names(self) -> tuple[str, ...]:
        return tuple(f"x{a}" for a in range(2, self.r + 1))

    @cached_property
    def coefficient_ring(self) -> Ring:
        """``Q[q^±]`` with jets ``x_2 .. x_r`` truncated modulo ``J^2``."""
        return Ring.build(laurent=("q",), jet=self.jet_names())

    @cached_property
    def novikov_ring(self) -> Ring:
        return Ring.build(laurent=("q",))


QUADRIC = MinimalFano("Q", 3, 3, 2)
V5 = MinimalFano("V5", 3, 2, 5)
V22 = MinimalFano("V22", 3, 1, 22)
BUILTIN = {m.name: m for m in (QUADRIC, V5, V22)}


def projective_space(n: int) -> MinimalFano:
    ints = {}
    for a in range(n + 1):
        for b in range(a, n + 1):
            c = n - a - b
            if c >= b:
                ints[(a, b, c)] = Fraction(1)
    return MinimalFano(f"P{n}", n, n + 1, 1, ints)


def get_manifold(name: str) -> MinimalFano:
    try:
        return BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown manifold {name!r}; expected one of {sorted(BUILTIN)}") from None


# -- correlator symbols -------------------------------------------------------


@dataclass(frozen=True, order=True)
class CorrelatorKey:
    d: int
    insertions: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "CorrelatorKey":
        s = text.strip().strip("[]").replace(" ", "")
        if ";" in s:
            d, rest = s.split(";", 1)
        else:
            d, rest = s, ""
        ins = tuple(int(x) for x in rest.split(",") if x)
        return cls(int(d), ins)

    @property
    def k(self) -> int:
        return len(self.insertions)

    def normal(self) -> "CorrelatorKey":
        return CorrelatorKey(self.d, tuple(sorted(self.insertions)))

    def __str__(self):
        return f"[{self.d};" + ",".join(str(a) for a in self.insertions) + "]"


def grading_admissible(m: MinimalFano, key: CorrelatorKey) -> bool:
    """Dimension constraint: ``d rho = sum (a_i - 1) + 3 - r`` with all ``a_i > 0``."""
    if key.d == 0:
        return True
    if not key.insertions:
        return False
    if any(a <= 0 or a > m.r for a in key.insertions):
        return False
    return key.d * m.rho == sum(a - 1 for a in key.insertions) + 3 - m.r


def normalize_symbol(key: CorrelatorKey) -> tuple[CorrelatorKey, Fraction]:
    """Strip divisor insertions (factor ``d`` each) and sort."""
    rest = []
    mult = Fraction(1)
    for a in key.insertions:
        if a == 1:
            if key.d == 0:
                raise CorrelatorError("divisor rule does not apply in degree 0")
            mult *= key.d
        else:
            rest.append(a)
    return CorrelatorKey(key.d, tuple(sorted(rest))), mult


def primitive_keys(m: MinimalFano, d: int, max_points: int) -> list[CorrelatorKey]:
    """All admissible primitive symbols of degree ``d`` with at most ``max_points`` insertions."""
    out = []
    for k in range(1, max_points + 1):
        for ins in itertools.combinations_with_replacement(range(2, m.r + 1), k):
            key = CorrelatorKey(d, ins)
            if grading_admissible(m, key):
                out.append(key)
    return out


def max_degree(m: MinimalFano, max_points: int) -> int:
    top = max_points * (m.r - 1) + 3 - m.r
    return max(top // m.rho, 0)


# -- tables and reconstruction ------------------------------------------------


@dataclass(frozen=True)
class DegreeStage:
    d: int
    unknowns: tuple[CorrelatorKey, ...]
    seeded: tuple[CorrelatorKey, ...]
    equations: int
    rank: int


@dataclass(frozen=True)
class CorrelatorTable:
    manifold: MinimalFano
    values: Mapping[CorrelatorKey, Fraction]
    provenance: Mapping[CorrelatorKey, str]
    max_points: int = 5
    stages: tuple[DegreeStage, ...] = ()

    def __getitem__(self, key) -> Fraction:
        if isinstance(key, str):
            key = CorrelatorKey.parse(key)
        return self.value(key)

    def value(self, key: CorrelatorKey) -> Fraction:
        """Value of any symbol, applying symmetry, divisor and grading rules."""
        if key.d == 0:
            raise CorrelatorError("degree-zero symbols are classical intersections")
        if any(a == 0 for a in key.insertions):
            return Fraction(0)
        if not grading_admissible(self.manifold, key):
            return Fraction(0)
        prim, mult = normalize_symbol(key)
        if prim.k > self.max_points:
            raise IncompleteTableError(f"{prim} exceeds the tabulated number of insertions")
        if prim not in self.values:
            raise IncompleteTableError(f"{prim} missing from table")
        return mult * self.values[prim]

    def primitive_entries(self, max_points: int | None = None) -> list[tuple[CorrelatorKey, Fraction]]:
        """Entries ordered by number of insertions, then degree."""
        keys = [k for k in self.values if max_points is None or k.k <= max_points]
        keys.sort(key=lambda k: (k.k, k.d, k.insertions))
        return [(k, self.values[k]) for k in keys]


class _Linear:
    """Affine form ``const + sum coeffs[key] * key`` in the unknowns of one degree."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const=Fraction(0), coeffs=None):
        self.const = const
        self.coeffs = coeffs or {}


def _jet_monomials(nvars: int, max_degree: int):
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield tuple(e)


def _sub_monomials(m: tuple[int, ...]):
    for parts in itertools.product(*(range(k + 1) for k in m)):
        yield parts, tuple(a - b for a, b in zip(m, parts))


class _WDVV:
    """Coefficients of third derivatives of the potential and the associativity residuals."""

    def __init__(self, m: MinimalFano, lookup):
        self.m = m
        self.lookup = lookup  # key -> Fraction | ("unknown", key)
        self.njet = m.r - 1

    def phi(self, a, b, c, d, mono):
        m = self.m
        if d == 0:
            if any(mono):
                return None
            v = m.triple(a, b, c)
            return v if v else None
        if 0 in (a, b, c):
            return None
        ins = []
        n1 = 0
        for x in (a, b, c):
            if x == 1:
                n1 += 1
            else:
                ins.append(x)
        for i, k in enumerate(mono):
            ins.extend([i + 2] * k)
        key = CorrelatorKey(d, tuple(sorted(ins)))
        if not grading_admissible(m, key):
            return None
        factor = Fraction(d ** n1, multinomial_factor(mono))
        val = self.lookup(key)
        if val is None:
            return None
        if isinstance(val, Fraction):
            return val * factor if val else None
        return (val, factor)

    def residual(self, a, b, c, f, D, mono) -> _Linear:
        r = self.m.r
        out = _Linear()
        for e in range(r + 1):
            for d1 in range(D + 1):
                d2 = D - d1
                for m1, m2 in _sub_monomials(mono):
                    for sign, (x1, x2) in ((1, ((a, b, e), (r - e, c, f))),
                                           (-1, ((b, c, e), (a, r - e, f)))):
                        p1 = self.phi(*x1, d1, m1)
                        if p1 is None:
                            continue
                        p2 = self.phi(*x2, d2, m2)
                        if p2 is None:
                            continue
                        _accumulate(out, sign, p1, p2)
        return out


def _accumulate(out: _Linear, sign, p1, p2):
    if isinstance(p1, Fraction) and isinstance(p2, Fraction):
        out.const += sign * p1 * p2
        return
    if isinstance(p1, Fraction):
        p1, p2 = p2, p1
    if not isinstance(p2, Fraction):
        raise AssertionError("product of two unknowns in one degree")
    key, factor = p1[0][1], p1[1]
    out.coeffs[key] = out.coeffs.get(key, Fraction(0)) + sign * factor * p2


def _solve(rows: list[_Linear], unknowns: Sequence[CorrelatorKey]):
    """Exact Gaussian elimination; returns (solution, rank, undetermined, inconsistent)."""
    idx = {k: i for i, k in enumerate(unknowns)}
    n = len(unknowns)
    mat = []
    for row in rows:
        vec = [Fraction(0)] * (n + 1)
        for k, c in row.coeffs.items():
            vec[idx[k]] += c
        vec[n] = -row.const
        if any(vec):
            mat.append(vec)
    rank = 0
    pivots = []
    for col in range(n):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pr = mat[rank]
        inv = 1 / pr[col]
        pr = [x * inv for x in pr]
        mat[rank] = pr
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], pr)]
        pivots.append(col)
        rank += 1
    inconsistent = any(all(x == 0 for x in row[:n]) and row[n] != 0 for row in mat[rank:])
    solution = {}
    for i, col in enumerate(pivots):
        row = mat[i]
        if all(row[j] == 0 for j in range(n) if j != col):
            solution[unknowns[col]] = row[n]
    undetermined = [unknowns[c] for c in range(n) if unknowns[c] not in solution]
    return solution, rank, undetermined, inconsistent


def reconstruct_correlators(m: MinimalFano, seeds: Mapping, max_points: int = 5) -> CorrelatorTable:
    """Determine all primitive correlators with ``<= max_points`` insertions from seeds.

    Degrees are processed upward.  At degree ``D`` the unknown correlators enter
    the associativity residuals linearly (paired with classical intersections),
    while products of two quantum terms only involve lower degrees.  All
    residual coefficients at ``q^D x^m`` with ``|m| <= max_points - 3`` are
    imposed; surplus equations must be consistent.
    """
    seeds = {(CorrelatorKey.parse(k) if isinstance(k, str) else k).normal(): Fraction(v)
             for k, v in seeds.items()}
    for key in seeds:
        if not grading_admissible(m, key) or key.d == 0 or any(a < 2 for a in key.insertions):
            raise CorrelatorError(f"seed {key} is not an admissible primitive symbol")
        if key.k > max_points:
            raise CorrelatorError(f"seed {key} has more than {max_points} insertions")
    known: dict[CorrelatorKey, Fraction] = {}
    provenance: dict[CorrelatorKey, str] = {}
    stages = []
    jet_degree = max(max_points - 3, 0)
    monos = list(_jet_monomials(m.r - 1, jet_degree))
    for D in range(1, max_degree(m, max_points) + 1):
        keys = primitive_keys(m, D, max_points)
        if not keys:
            continue
        unknown = [k for k in keys if k not in seeds]
        seeded = [k for k in keys if k in seeds]

        def lookup(key, D=D):
            if key.d < D:
                return known.get(key, Fraction(0)) if key.k <= max_points else _missing(key)
            if key.d > D:
                raise AssertionError("degree overflow")
            if key in seeds:
                return seeds[key]
            if key.k > max_points:
                return _missing(key)
            return ("unknown", key)

        wd = _WDVV(m, lookup)
        rows = []
        for a, b, c, f in itertools.product(range(m.r + 1), repeat=4):
            for mono in monos:
                rows.append(wd.residual(a, b, c, f, D, mono))
        solution, rank, undetermined, inconsistent = _solve(rows, unknown)
        if inconsistent:
            raise InconsistentSeedsError(f"associativity violated at degree {D} "
                                         f"(seeded: {', '.join(map(str, seeded)) or 'none'})")
        if undetermined:
            raise UnderdeterminedError(undetermined, rank)
        for k in seeded:
            known[k] = seeds[k]
            provenance[k] = "seed"
        for k in unknown:
            known[k] = solution[k]
            provenance[k] = "reconstructed"
        stages.append(DegreeStage(D, tuple(unknown), tuple(seeded), len(rows), rank))
    extra = set(seeds) - set(known)
    if extra:
        raise CorrelatorError(f"seeds outside the tabulated range: {sorted(map(str, extra))}")
    return CorrelatorTable(m, known, provenance, max_points, tuple(stages))


def _missing(key):
    raise IncompleteTableError(f"{key} needed but outside the tabulated range")


def associativity_residuals(table: CorrelatorTable, jet_degree: int | None = None) -> list[tuple]:
    """Nonzero residuals of WDVV over all degrees and jet monomials (empty when associative)."""
    m = table.manifold
    if jet_degree is None:
        jet_degree = max(table.max_points - 3, 0)

    def lookup(key):
        if key.k > table.max_points:
            return _missing(key)
        return table.values.get(key, Fraction(0))

    wd = _WDVV(m, lookup)
    bad = []
    top = max((k.d for k in table.values), default=0)
    for D in range(1, 2 * top + 1):
        for a, b, c, f in itertools.product(range(m.r + 1), repeat=4):
            for mono in _jet_monomials(m.r - 1, jet_degree):
                try:
                    res = wd.residual(a, b, c, f, D, mono)
                except IncompleteTableError:
                    continue
                if res.const or any(res.coeffs.values()):
                    bad.append((a, b, c, f, D, mono, res.const))
    return bad


# -- seed data ----------------------------------------------------------------


def load_seed_file(path=None) -> dict:
    if path is None:
        text = resources.files("qcoh.data").joinpath("fano_seeds.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def default_seeds(name: str, path=None) -> dict[CorrelatorKey, Fraction]:
    data = load_seed_file(path)
    try:
        entries = data["manifolds"][name]["seeds"]
    except KeyError:
        raise KeyError(f"no seeds for {name!r}") from None
    return {CorrelatorKey.parse(e["symbol"]): Fraction(e["value"]) for e in entries}


def build_table(name: str, seeds=None, max_points: int = 5) -> CorrelatorTable:
    m = get_manifold(name)
    if seeds is None:
        seeds = default_seeds(name)
    return reconstruct_correlators(m, seeds, max_points)


# -- quantum product in the first neighborhood of H^2 -------------------------


class FanoAlgebra:
    """Structure constants of the small quantum product to first order in ``x_2..x_r``."""

    def __init__(self, table: CorrelatorTable):
        self.table = table
        self.m = table.manifold
        self.ring = self.m.coefficient_ring
        self._consts = {}

    def _phi(self, a, b, c, d, mono):
        if d == 0:
            return self.m.triple(a, b, c) if not any(mono) else Fraction(0)
        if 0 in (a, b, c):
            return Fraction(0)
        ins = [x for x in (a, b, c) if x != 1]
        n1 = 3 - len(ins)
        for i, k in enumerate(mono):
            ins.extend([i + 2] * k)
        key = CorrelatorKey(d, tuple(sorted(ins)))
        if not grading_admissible(self.m, key):
            return Fraction(0)
        return Fraction(d ** n1) * self.table.value(key) / multinomial_factor(mono)

    def product_basis(self, a: int, b: int) -> list[JetPolynomial]:
        """Coefficients of ``Delta_a o Delta_b`` on ``Delta_0 .. Delta_r``."""
        key = (min(a, b), max(a, b))
        if key in self._consts:
            return self._consts[key]
        m, R = self.m, self.ring
        r = m.r
        njet = r - 1
        dmax = max((k.d for k in self.table.values), default=0)
        out = [R.zero() for _ in range(r + 1)]
        for c in range(r + 1):
            acc = R.const(m.triple(a, b, c))
            for d in range(1, dmax + 1):
                for mono in _jet_monomials(njet, 1):
                    v = self._phi(a, b, c, d, mono)
                    if v:
                        exps = {"q": d}
                        for i, k in enumerate(mono):
                            if k:
                                exps[f"x{i + 2}"] = k
                        acc = acc + R.monomial(exps, v)
            out[r - c] = out[r - c] + acc
        self._consts[key] = out
        return out

    def multiply(self, x: Sequence, y: Sequence) -> list:
        """Product of two elements given by coefficient lists (any coefficient ring)."""
        r = self.m.r
        zero = _zero_of(x, y, self.ring)
        out = [zero] * (r + 1)
        for a in range(r + 1):
            if _is_zero(x[a]):
                continue
            for b in range(r + 1):
                if _is_zero(y[b]):
                    continue
                xy = x[a] * y[b]
                consts = self.product_basis(a, b)
                for c in range(r + 1):
                    if consts[c].is_zero():
                        continue
                    out[c] = out[c] + xy * _coerce_like(consts[c], zero)
        return out

    def basis(self, a: int, ring=None) -> list:
        ring = ring or self.ring
        one, zero = ring.one(), ring.zero()
        return [one if i == a else zero for i in range(self.m.r + 1)]


def small_q_product(m: MinimalFano, table: CorrelatorTable, a: int, b: int) -> dict[int, JetPolynomial]:
    """``Delta_a o Delta_b`` as ``{index: coefficient}`` (zero coefficients omitted)."""
    if table.manifold != m:
        raise ValueError("table belongs to another manifold")
    coeffs = FanoAlgebra(table).product_basis(a, b)
    return {i: c for i, c in enumerate(coeffs) if not c.is_zero()}


def _is_zero(x) -> bool:
    if isinstance(x, (JetPolynomial, QuotientElement)):
        return x.is_zero()
    return x == 0


def _zero_of(x, y, ring):
    for v in list(x) + list(y):
        if isinstance(v, QuotientElement):
            return v.parent.zero()
        if isinstance(v, JetPolynomial):
            return v.ring.zero()
    return ring.zero()


def _coerce_like(poly: JetPolynomial, like):
    if isinstance(like, QuotientElement):
        return like.parent.coerce(poly)
    return poly


# -- Euler operator and spectral data -----------------------------------------


def euler_matrix(m: MinimalFano, table: CorrelatorTable, include_x0_shift: bool = False) -> ExactMatrix:
    """Matrix of ``E o`` on ``H^2`` (jets set to zero); column ``b`` is ``E o Delta_b``.

    With ``include_x0_shift`` the restriction keeps ``x_0`` (a polynomial
    variable), which adds ``x_0 * id``.
    """
    alg = FanoAlgebra(table)
    S = m.novikov_ring.extend(poly=("x0",)) if include_x0_shift else m.novikov_ring
    jets = {n: 0 for n in m.jet_names()}
    cols = []
    for b in range(m.r + 1):
        col = [c.subs(jets).to_ring(S) * m.rho for c in alg.product_basis(1, b)]
        if include_x0_shift:
            col[b] = col[b] + S.var("x0")
        cols.append(col)
    return ExactMatrix.from_columns(cols)


def characteristic_polynomial(m: MinimalFano, table: CorrelatorTable, include_x0_shift=False,
                              var: str = "u") -> JetPolynomial:
    return char_poly(euler_matrix(m, table, include_x0_shift), var)


@dataclass(frozen=True)
class Branch:
    """One irreducible-over-the-split factor of the characteristic polynomial.

    ``ring`` is ``coefficient_ring[u] / (factor)``; its generator is the
    eigenvalue ``u_i`` on this branch.
    """

    factor: JetPolynomial  # in Q[q^±][u]
    ring: QuotientRing

    @property
    def degree(self) -> int:
        return self.ring.degree

    @property
    def u(self) -> QuotientElement:
        return self.ring.gen()


def _homogeneity_weight(coeffs: dict[int, JetPolynomial], n: int):
    w = None
    for k, c in coeffs.items():
        if k == n or c.is_zero():
            continue
        if len(c) != 1:
            return None
        (exps,) = c.terms
        e = exps[c.ring.index["q"]]
        wk = Fraction(e, n - k)
        if w is None:
            w = wk
        elif w != wk:
            return None
    return w if w is not None else Fraction(0)


def split_branches(poly: JetPolynomial, var: str = "u") -> list[JetPolynomial]:
    """Split off rational linear factors ``u - t q^w`` of a weighted-homogeneous polynomial.

    The remaining cofactor is returned as a single branch.  Linear factors
    come first, ordered by ``t``.
    """
    R = poly.ring
    parts = poly.coefficients_in(var)
    n = max(parts)
    w = _homogeneity_weight(parts, n)
    if w is None:
        return [poly]
    dehom = [Fraction(0)] * (n + 1)
    for k, c in parts.items():
        dehom[k] = c.subs({"q": 1}).constant_term()
    roots = univariate.rational_roots(dehom)
    factors = []
    rest = poly
    u = R.var(var)
    for t in roots:
        if t != 0 and w.denominator != 1:
            continue
        lin = u - (R.monomial({"q": int(w)}, t) if t else R.zero())
        try:
            rest = rest.exact_div(lin)
        except DivisionError:
            continue
        factors.append(lin)
    if rest.degree_in(var) > 0:
        factors.append(rest)
    return factors


def is_squarefree_over_function_field(poly: JetPolynomial, var: str = "u") -> bool:
    """Squarefree over ``Q(q)``: check enough rational specializations of ``q``."""
    parts = poly.coefficients_in(var)
    spans = [c.degree_in("q") - c.min_degree_in("q") for c in parts.values() if not c.is_zero()]
    lo = min(c.min_degree_in("q") for c in parts.values() if not c.is_zero())
    hi = max(c.degree_in("q") for c in parts.values() if not c.is_zero())
    n = max(parts)
    bound = (2 * n) * (hi - lo + 1) + 1
    for t in range(1, bound + 2):
        coeffs = [Fraction(0)] * (n + 1)
        for k, c in parts.items():
            coeffs[k] = c.subs({"q": t}).constant_term()
        if univariate.squarefree_discriminant(coeffs).is_squarefree:
            return True
    return False


class SpectralData:
    """Characteristic polynomial, eigenvalue branches and idempotents for one manifold."""

    def __init__(self, table: CorrelatorTable):
        self.table = table
        self.m = table.manifold
        self.algebra = FanoAlgebra(table)
        self.matrix = euler_matrix(self.m, table)
        self.char_poly = char_poly(self.matrix, "u")
        if not is_squarefree_over_function_field(self.char_poly):
            raise CorrelatorError("characteristic polynomial is not squarefree")
        self.branches = [self._branch(f) for f in split_branches(self.char_poly)]

    def _branch(self, factor: JetPolynomial) -> Branch:
        base = self.m.coefficient_ring
        parts = factor.coefficients_in("u")
        n = max(parts)
        coeffs = [_drop_var(parts.get(k, factor.ring.zero()), "u", base) for k in range(n + 1)]
        return Branch(factor, QuotientRing(base, "u", coeffs))

    def to_quotient(self, poly: JetPolynomial, branch: Branch) -> QuotientElement:
        """Image of a polynomial in ``q, x_*, u`` in the branch ring (``u`` becomes ``u_i``)."""
        parts = poly.coefficients_in("u") if "u" in poly.ring.index else {0: poly}
        n = max(parts) if parts else 0
        coeffs = [_drop_var(parts[k], "u", branch.ring.base) if k in parts else branch.ring.base.zero()
                  for k in range(n + 1)]
        return branch.ring.element(coeffs)

    def char_coeffs_in(self, branch: Branch) -> list[QuotientElement]:
        parts = self.char_poly.coefficients_in("u")
        n = max(parts)
        return [branch.ring.coerce(_drop_var(parts[k], "u", branch.ring.base)) if k in parts
                else branch.ring.zero() for k in range(n + 1)]

    def base_idempotent(self, branch: Branch) -> list[QuotientElement]:
        """Eigenprojection of ``E o`` at the jet-free point, applied to ``Delta_0``."""
        QR = branch.ring
        u = QR.gen()
        chi = self.char_coeffs_in(branch)
        quo, rem = synthetic_division(chi, u)
        if not rem.is_zero():
            raise AssertionError("branch generator is not a root of the characteristic polynomial")
        dchi = QR.zero()
        for k in range(1, len(chi)):
            dchi = dchi + chi[k] * k * u ** (k - 1)
        scale = dchi.inverse()
        M = self.matrix.map(lambda x: QR.coerce(x.to_ring(self.m.coefficient_ring)))
        r = self.m.r
        v = [QR.one()] + [QR.zero()] * r
        acc = [QR.zero()] * (r + 1)
        for h in quo:
            acc = [s + h * t for s, t in zip(acc, v)]
            v = M.apply(v)
        return [x * scale for x in acc]

    def idempotent(self, branch: Branch) -> tuple[list, list]:
        """``(e^(0), e)`` with ``e = e^(0) + omega o (1 - 2 e^(0))`` to first order."""
        return self._idempotents[self.branches.index(branch)]

    @cached_property
    def _idempotents(self):
        out = []
        for br in self.branches:
            e0 = self.base_idempotent(br)
            sq = self.algebra.multiply(e0, e0)
            omega = [a - b for a, b in zip(sq, e0)]
            one = self.algebra.basis(0, br.ring)
            corr = self.algebra.multiply(omega, [o - 2 * x for o, x in zip(one, e0)])
            e = [a + b for a, b in zip(e0, corr)]
            check = self.algebra.multiply(e, e)
            if any(not (x - y).is_zero() for x, y in zip(check, e)):
                raise AssertionError("idempotent check failed")
            out.append((e0, e))
        return out

    # -- derivations and special coordinates ----------------------------------

    def eigenvalue_log_derivative(self, branch: Branch) -> QuotientElement:
        """``q d/dq`` of the branch eigenvalue, by implicit differentiation of the factor."""
        QR = branch.ring
        u = QR.gen()
        parts = branch.factor.coefficients_in("u")
        n = max(parts)
        dq = QR.zero()
        du = QR.zero()
        for k, c in parts.items():
            cc = QR.coerce(_drop_var(c, "u", QR.base))
            dq = dq + QR.coerce(_drop_var(c.derivative("q"), "u", QR.base)) * u ** k
            if k:
                du = du + cc * k * u ** (k - 1)
        return -(dq * du.inverse())

    def derive(self, func: QuotientElement, branch: Branch, a: int) -> QuotientElement:
        """Action of ``Delta_a`` on a coefficient function living in a branch ring."""
        QR = branch.ring
        if a == 0:
            return QR.zero()
        if a == 1:
            du = self.eigenvalue_log_derivative(branch)
            direct = QR.element([c.derivative("q") for c in func.coeffs])
            ddu = QR.element([c * k for k, c in enumerate(func.coeffs)][1:])
            return direct + ddu * du
        return QR.element([c.derivative(f"x{a}") for c in func.coeffs])

    def restrict(self, x: QuotientElement) -> QuotientElement:
        jets = {n: 0 for n in self.m.jet_names()}
        return x.map_coeffs(lambda c: c.subs(jets))

    def eta(self, branch: Branch) -> QuotientElement:
        e0, _ = self.idempotent(branch)
        return e0[self.m.r]

    def eta_diagonal(self, branch: Branch) -> QuotientElement:
        """``eta_ii``: ``e_i^(0)`` applied to the ``Delta_r`` coefficient of ``e_i``."""
        e0, e = self.idempotent(branch)
        f = e[self.m.r]
        acc = branch.ring.zero()
        for a in range(self.m.r + 1):
            if e0[a].is_zero():
                continue
            acc = acc + e0[a] * self.restrict(self.derive(f, branch, a))
        return acc

    def pair_ring(self, bi: Branch, bj: Branch, second_modulus=None) -> QuotientRing:
        """Tower holding ``u_i`` (variable ``u``) and a distinct root ``u_j`` (variable ``v``)."""
        QR = bi.ring
        if second_modulus is not None:
            mod = [QR.coerce(c) if not isinstance(c, QuotientElement) else c for c in second_modulus]
        elif bi is bj:
            coeffs = [QR.coerce(c) for c in QR.modulus]
            mod, rem = synthetic_division(coeffs, QR.gen())
            if not rem.is_zero():
                raise AssertionError("generator is not a root of its modulus")
        else:
            mod = [QR.coerce(c) for c in bj.ring.modulus]
        T = QuotientRing(QR, "v", mod)
        if second_modulus is not None and bi is bj:
            full = [QR.coerce(c) for c in QR.modulus]
            cof, _ = synthetic_division(full, QR.gen())
            if not T.element(cof).is_zero():
                raise CorrelatorError("second modulus does not divide the conjugate cofactor")
        return T

    def embed_first(self, x: QuotientElement, T: QuotientRing) -> QuotientElement:
        return T.coerce(x)

    def embed_second(self, x: QuotientElement, T: QuotientRing) -> QuotientElement:
        base = T.base
        return T.element([base.coerce(c) for c in x.coeffs])

    def eta_offdiagonal(self, bi: Branch, bj: Branch, second_modulus=None):
        """``(eta_ij, eta_ji)`` for ``u_i`` on branch ``bi`` and a distinct root on ``bj``."""
        T = self.pair_ring(bi, bj, second_modulus)
        r = self.m.r
        e0_i, e_i = self.idempotent(bi)
        e0_j, e_j = self.idempotent(bj)
        eta_ij = T.zero()
        eta_ji = T.zero()
        for a in range(r + 1):
            if not e0_i[a].is_zero():
                dfj = self.restrict(self.derive(e_j[r], bj, a))
                eta_ij = eta_ij + self.embed_first(e0_i[a], T) * self.embed_second(dfj, T)
            if not e0_j[a].is_zero():
                dfi = self.restrict(self.derive(e_i[r], bi, a))
                eta_ji = eta_ji + self.embed_second(e0_j[a], T) * self.embed_first(dfi, T)
        return eta_ij, eta_ji

    def pairing(self, x: Sequence, y: Sequence):
        r = self.m.r
        acc = None
        for p in range(r + 1):
            t = x[p] * y[r - p]
            acc = t if acc is None else acc + t
        return acc

    def trace(self, x: QuotientElement, branch: Branch) -> JetPolynomial:
        """Sum over the conjugate roots of the branch (trace of multiplication)."""
        QR = branch.ring
        u = QR.gen()
        acc = QR.base.zero()
        basis = QR.one()
        for i in range(QR.degree):
            prod = x * basis
            c = prod.lift()[i]
            acc = acc + c
            basis = basis * u
        return acc


def _drop_var(poly: JetPolynomial, var: str, target: Ring) -> JetPolynomial:
    """Move a ``var``-free polynomial into ``target``."""
    if var in poly.ring.index and poly.degree_in(var) > 0:
        raise ValueError(f"{var} still present")
    names = [n for n in poly.ring.names if n != var]
    src = poly.ring
    keep = [src.index[n] for n in names]
    tgt_pos = [target.index[n] for n in names]

    def fn(e):
        out = [0] * target.nvars
        for i, j in zip(keep, tgt_pos):
            out[j] = e[i]
        return tuple(out)

    return poly.map_exponents(fn, target)


@dataclass
class SpecialCoordinates:
    char_poly: JetPolynomial
    branches: list
    eta_i: list
    eta_ii: list
    eta_ij: dict


def special_coordinates(m: MinimalFano, table: CorrelatorTable) -> SpecialCoordinates:
    """Canonical coordinates, metric coefficients and their first derivatives on every branch.

    Raises :class:`SymmetryError` if some ``eta_ij != eta_ji``.
    """
    if table.manifold != m:
        raise ValueError("table belongs to another manifold")
    sd = SpectralData(table)
    eta_i = [sd.eta(b) for b in sd.branches]
    eta_ii = [sd.eta_diagonal(b) for b in sd.branches]
    eta_ij = {}
    for i, bi in enumerate(sd.branches):
        for j, bj in enumerate(sd.branches):
            if j < i or (i == j and bi.degree == 1):
                continue
            a, b = sd.eta_offdiagonal(bi, bj)
            if a != b:
                raise SymmetryError(f"eta not symmetric between branches {i} and {j}")
            eta_ij[(i, j)] = a
    return SpecialCoordinates(sd.char_poly, sd.branches, eta_i, eta_ii, eta_ij)


def idempotents(m: MinimalFano, table: CorrelatorTable) -> list[tuple[Branch, list, list]]:
    sd = SpectralData(table)
    return [(b,) + sd.idempotent(b) for b in sd.branches]
