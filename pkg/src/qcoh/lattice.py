"""The lattice N_r = Z^{1,r}, its Weyl group, orbits and the genus-zero invariants of del Pezzo surfaces.

A class ``beta = a l_0 - sum b_i l_i`` is stored as ``(a; b_1, ..., b_r)`` so that
``a = (beta, l_0)`` and ``b_i = (beta, l_i)``.  The anticanonical class is
``k_r = (3; 1, ..., 1)``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

MIN_RANK, MAX_RANK = 3, 8


class RankMismatchError(ValueError):
    pass


class UnsupportedDegreeError(ValueError):
    """Requested invariant needs data beyond anticanonical degree 3."""


class OrbitTooLargeError(RuntimeError):
    pass


class ReductionError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class LatticeVector:
    a: int
    b: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))

    @classmethod
    def parse(cls, text: str) -> "LatticeVector":
        s = text.strip().strip("()")
        a, _, rest = s.partition(";")
        return cls(int(a), tuple(int(x) for x in rest.split(",") if x.strip()))

    @classmethod
    def from_coords(cls, coords: Sequence[int]) -> "LatticeVector":
        return cls(coords[0], tuple(coords[1:]))

    @property
    def r(self) -> int:
        return len(self.b)

    @property
    def coords(self) -> tuple[int, ...]:
        return (self.a,) + self.b

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        _check(self, other)
        return LatticeVector(self.a + other.a, tuple(x + y for x, y in zip(self.b, other.b)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        _check(self, other)
        return LatticeVector(self.a - other.a, tuple(x - y for x, y in zip(self.b, other.b)))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(-self.a, tuple(-x for x in self.b))

    def __mul__(self, n: int) -> "LatticeVector":
        return LatticeVector(self.a * n, tuple(x * n for x in self.b))

    __rmul__ = __mul__

    def __str__(self):
        return f"({self.a};" + ",".join(str(x) for x in self.b) + ")"


def _check(x: LatticeVector, y: LatticeVector):
    if x.r != y.r:
        raise RankMismatchError(f"rank {x.r} vs {y.r}")


def pairing(x: LatticeVector, y: LatticeVector) -> int:
    _check(x, y)
    return x.a * y.a - sum(p * q for p, q in zip(x.b, y.b))


def canonical(r: int) -> LatticeVector:
    """The anticanonical class ``k_r``."""
    return LatticeVector(3, (1,) * r)


def degree(beta: LatticeVector) -> int:
    """Anticanonical degree ``k_r(beta) = 3a - sum b_i``."""
    return 3 * beta.a - sum(beta.b)


def basis_class(r: int, i: int) -> LatticeVector:
    """``l_0`` for ``i = 0``, otherwise the exceptional class ``l_i``."""
    if i == 0:
        return LatticeVector(1, (0,) * r)
    b = [0] * r
    b[i - 1] = -1
    return LatticeVector(0, tuple(b))


def vector_from_divisor(coeffs: Sequence) -> LatticeVector:
    """Class of ``sum c_i l_i`` (``c_0`` on ``l_0``)."""
    return LatticeVector(coeffs[0], tuple(-c for c in coeffs[1:]))


def divisor_coords(beta: LatticeVector) -> tuple[int, ...]:
    """Coefficients of ``beta`` on ``l_0, ..., l_r``."""
    return (beta.a,) + tuple(-x for x in beta.b)


# -- Weyl group -----------------------------------------------------------------


def cremona_reflect(beta: LatticeVector, i: int = 0, j: int = 1, k: int = 2) -> LatticeVector:
    """Cremona reflection on the (0-based) positions ``i, j, k`` of ``b``."""
    if len({i, j, k}) != 3:
        raise ValueError("Cremona indices must be distinct")
    if beta.r < 3:
        raise ValueError("Cremona reflection needs rank >= 3")
    d = beta.a - beta.b[i] - beta.b[j] - beta.b[k]
    b = list(beta.b)
    for t in (i, j, k):
        b[t] += d
    return LatticeVector(beta.a + d, tuple(b))


def transpose(beta: LatticeVector, i: int) -> LatticeVector:
    """Swap positions ``i`` and ``i + 1`` of ``b``."""
    b = list(beta.b)
    b[i], b[i + 1] = b[i + 1], b[i]
    return LatticeVector(beta.a, tuple(b))


def reflect(beta: LatticeVector, root: LatticeVector) -> LatticeVector:
    """Reflection ``beta + (beta, root) root`` in a root of square -2."""
    return beta + root * pairing(beta, root)


def generators(r: int) -> list[tuple[str, callable]]:
    """Adjacent transpositions and one Cremona reflection; each is an involution."""
    gens = [(f"s{i}", lambda v, i=i: transpose(v, i)) for i in range(r - 1)]
    gens.append(("cremona", cremona_reflect))
    return gens


def weyl_order(r: int) -> int:
    """``|W_r|`` from ``|W_2| = 2`` and the orbit-stabilizer step ``|W_r| = |I_r| |W_{r-1}|``."""
    if r == 2:
        return 2
    return len(orbit(r, "I")) * weyl_order(r - 1)


# -- normal forms and invariants ------------------------------------------------


@dataclass(frozen=True)
class NormalFormEntry:
    key: str
    vector: LatticeVector  # without trailing zeros
    degree: int
    value: Fraction


@lru_cache(maxsize=None)
def gw_table() -> tuple[NormalFormEntry, ...]:
    text = resources.files("qcoh.data").joinpath("delpezzo_gw.json").read_text(encoding="utf-8")
    data = json.loads(text)
    out = []
    for e in data["normal_forms"]:
        v = LatticeVector.parse(e["class"])
        out.append(NormalFormEntry(e["class"], v, degree(v), Fraction(e["value"])))
    return tuple(out)


def _padded(v: LatticeVector, r: int) -> LatticeVector | None:
    if v.r > r:
        if any(v.b[r:]):
            return None
        return LatticeVector(v.a, v.b[:r])
    return LatticeVector(v.a, v.b + (0,) * (r - v.r))


@dataclass(frozen=True)
class Reduction:
    normal_form: LatticeVector
    status: str  # "supported" | "vanishing"
    entry: NormalFormEntry | None
    steps: int


def weyl_reduce(beta: LatticeVector, max_steps: int = 10_000) -> Reduction:
    """Sort ``b`` descending and apply Cremona while ``a - b_1 - b_2 - b_3 < 0``.

    The result is matched against the normal-form list (padded with zeros);
    a match is ``supported``, anything else ``vanishing``.  The exceptional
    normal form is reported as ``(0; -1, 0, ..., 0)``.
    """
    r = beta.r
    if r < 3:
        raise ValueError("reduction needs rank >= 3")
    v = LatticeVector(beta.a, tuple(sorted(beta.b, reverse=True)))
    steps = 0
    while v.a - v.b[0] - v.b[1] - v.b[2] < 0:
        if steps >= max_steps:
            raise ReductionError(f"reduction of {beta} did not terminate")
        v = cremona_reflect(v)
        v = LatticeVector(v.a, tuple(sorted(v.b, reverse=True)))
        steps += 1
    for entry in gw_table():
        target = _padded(entry.vector, r)
        if target is None:
            continue
        if target.a == v.a and sorted(target.b, reverse=True) == list(v.b):
            return Reduction(target, "supported", entry, steps)
    return Reduction(v, "vanishing", None, steps)


def gw_invariant(beta: LatticeVector) -> Fraction:
    """``<Delta_2^{k-1}>_beta`` for anticanonical degree ``k`` in 1..3."""
    k = degree(beta)
    if k not in (1, 2, 3):
        raise UnsupportedDegreeError(f"k(beta) = {k} is outside the tabulated degrees 1..3")
    red = weyl_reduce(beta)
    return red.entry.value if red.entry is not None else Fraction(0)


# -- orbits ---------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSet:
    r: int
    representative: LatticeVector
    elements: frozenset
    label: str = "custom"

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, v):
        return v in self.elements

    def sorted(self) -> list[LatticeVector]:
        return sorted(self.elements, key=lambda v: v.coords)

    def translate(self, shift: LatticeVector, label: str | None = None) -> "OrbitSet":
        return OrbitSet(self.r, self.representative + shift,
                        frozenset(v + shift for v in self.elements),
                        label or f"{self.label}+{shift}")

    def dump(self) -> str:
        return "".join(f"{v}\n" for v in self.sorted())

    def is_closed(self) -> bool:
        return all(g(v) in self.elements for v in self.elements for _, g in generators(self.r))


def enumerate_orbit(r: int, seed: LatticeVector, cap: int = 100_000, label: str = "custom") -> OrbitSet:
    """Breadth-first closure of ``seed`` under the Weyl generators."""
    if not MIN_RANK <= r <= MAX_RANK:
        raise ValueError(f"rank must be in [{MIN_RANK}, {MAX_RANK}]")
    if seed.r != r:
        raise RankMismatchError("seed has the wrong rank")
    gens = [g for _, g in generators(r)]
    seen = {seed}
    queue = deque([seed])
    while queue:
        v = queue.popleft()
        for g in gens:
            w = g(v)
            if w not in seen:
                seen.add(w)
                if len(seen) > cap:
                    raise OrbitTooLargeError(f"orbit of {seed} exceeds {cap} elements")
                queue.append(w)
    return OrbitSet(r, seed, frozenset(seen), label)


def _seed(r: int, label: str) -> LatticeVector:
    z = [0] * r
    if label == "I":
        z[0] = -1
        return LatticeVector(0, tuple(z))
    if label == "F":
        z[0] = 1
        return LatticeVector(1, tuple(z))
    if label == "G":
        return LatticeVector(1, tuple(z))
    if label == "H":
        z[0] = z[1] = -1
        return LatticeVector(0, tuple(z))
    raise KeyError(label)


@lru_cache(maxsize=None)
def orbit(r: int, label: str) -> OrbitSet:
    """One of the named sets I, F, G, H or the root system R."""
    if label == "R":
        a = [0] * r
        a[0], a[1] = 1, -1
        b = [0] * r
        b[0] = b[1] = b[2] = 1
        o1 = enumerate_orbit(r, LatticeVector(0, tuple(a)))
        o2 = enumerate_orbit(r, LatticeVector(1, tuple(b)))
        return OrbitSet(r, o1.representative, o1.elements | o2.elements, "R")
    return enumerate_orbit(r, _seed(r, label), label=label)


def roots(r: int) -> list[LatticeVector]:
    return orbit(r, "R").sorted()


ORBIT_LABELS = ("R", "I", "F", "G", "H")


def cardinalities(r: int) -> dict[str, int]:
    out = {"W": weyl_order(r)}
    for label in ORBIT_LABELS:
        out[label] = len(orbit(r, label))
    return out


def recursion_checks(r: int) -> dict[str, bool]:
    """The three counting recursions relating rank ``r`` to rank ``r - 1``."""
    i_r, i_p = len(orbit(r, "I")), len(orbit(r - 1, "I"))
    return {
        "G": len(orbit(r, "G")) * r == i_r * len(orbit(r - 1, "G")),
        "F": len(orbit(r, "F")) * 2 * (r - 1) == i_r * len(orbit(r - 1, "F")),
        "H": len(orbit(r, "H")) * 2 == i_r * i_p,
    }


# -- support of the invariants ---------------------------------------------------


@lru_cache(maxsize=None)
def support_classes(r: int, c: int) -> tuple[tuple[LatticeVector, Fraction], ...]:
    """All classes of anticanonical degree ``c`` with nonzero invariant, with values."""
    if c not in (1, 2, 3):
        raise UnsupportedDegreeError(f"degree {c} is outside the tabulated degrees 1..3")
    if not MIN_RANK <= r <= MAX_RANK:
        raise ValueError(f"rank must be in [{MIN_RANK}, {MAX_RANK}]")
    k = canonical(r)
    base = {1: "I", 2: "F", 3: "G"}[c]
    parts: list[tuple[Iterable[LatticeVector], int]] = [(orbit(r, base).elements, 1)]
    if c == 1 and r == 8:
        parts.append(([k], 12))
    if c == 2:
        if r == 7:
            parts.append(([k], 12))
        if r == 8:
            parts.append((orbit(8, "I").translate(k).elements, 12))
            parts.append(([k * 2], 90))
    if c == 3:
        if r == 6:
            parts.append(([k], 12))
        if r == 7:
            parts.append((orbit(7, "I").translate(k).elements, 12))
        if r == 8:
            parts.append((orbit(8, "H").translate(k).elements, 12))
            parts.append((orbit(8, "F").translate(k).elements, 96))
            parts.append((orbit(8, "I").translate(k * 2).elements, 576))
            parts.append(([k * 3], 2880))
    out = {}
    for elems, value in parts:
        for v in elems:
            if v in out:
                raise AssertionError(f"{v} appears in two support orbits")
            out[v] = Fraction(value)
    return tuple(sorted(out.items(), key=lambda t: t[0].coords))


def support_orbits(r: int, c: int) -> list[tuple[str, frozenset, Fraction]]:
    """Support of degree ``c`` grouped into Weyl orbits (label, elements, value)."""
    k = canonical(r)
    base = {1: "I", 2: "F", 3: "G"}[c]
    out = [(f"{base}_{r}", orbit(r, base).elements, Fraction(1))]
    I, F, H = (lambda: orbit(r, "I")), (lambda: orbit(r, "F")), (lambda: orbit(r, "H"))
    extra = {
        (1, 8): lambda: [("k_8", frozenset([k]), 12)],
        (2, 7): lambda: [("k_7", frozenset([k]), 12)],
        (2, 8): lambda: [("k_8+I_8", I().translate(k).elements, 12), ("2k_8", frozenset([k * 2]), 90)],
        (3, 6): lambda: [("k_6", frozenset([k]), 12)],
        (3, 7): lambda: [("k_7+I_7", I().translate(k).elements, 12)],
        (3, 8): lambda: [("k_8+H_8", H().translate(k).elements, 12),
                         ("k_8+F_8", F().translate(k).elements, 96),
                         ("2k_8+I_8", I().translate(k * 2).elements, 576),
                         ("3k_8", frozenset([k * 3]), 2880)],
    }
    for label, elems, value in extra.get((c, r), list)():
        out.append((label, elems, Fraction(value)))
    return out


# -- sums over orbits -------------------------------------------------------------


def _rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def lattice_rank(vectors: Sequence[LatticeVector]) -> int:
    return _rank([v.coords for v in vectors]) if vectors else 0


def orthogonal_roots(rho: LatticeVector) -> list[LatticeVector]:
    return [x for x in roots(rho.r) if pairing(x, rho) == 0]


def orthogonal_root_rank(rho: LatticeVector) -> tuple[int, bool]:
    """Rank of the span of roots orthogonal to ``rho``, and whether they lie in ``k^perp``."""
    orth = orthogonal_roots(rho)
    k = canonical(rho.r)
    return lattice_rank(orth), all(pairing(x, k) == 0 for x in orth)


def _vsum(vectors: Iterable[tuple[int, LatticeVector]], r: int) -> list[Fraction]:
    acc = [Fraction(0)] * (r + 1)
    for w, v in vectors:
        for i, x in enumerate(v.coords):
            acc[i] += w * x
    return acc


@dataclass(frozen=True)
class MomentCheck:
    name: str
    computed: tuple
    expected: tuple

    @property
    def ok(self) -> bool:
        return self.computed == self.expected


def orbit_moment_sums(S: OrbitSet, rho: LatticeVector, rho2: LatticeVector,
                      max_power: int = 3) -> list[MomentCheck]:
    """Direct sums over an orbit compared with their closed forms.

    a) sum beta; b) sum (rho,beta) beta; c) sum (rho,beta)^m (rho',beta) and
    sum (rho,beta)^{2m+1}; d) sum (rho,beta)^2 beta (rank >= 5);
    e) sum (rho,beta)(rho',beta) beta.
    """
    r = S.r
    if pairing(rho, rho) != -2 or pairing(rho2, rho2) != -2 or degree(rho) or degree(rho2):
        raise ValueError("rho and rho' must be roots")
    if pairing(rho, rho2) != 0:
        raise ValueError("rho and rho' must be orthogonal")
    elems = S.sorted()
    k = canonical(r)
    kS = degree(S.representative)
    p = {v: pairing(rho, v) for v in elems}
    p2 = {v: pairing(rho2, v) for v in elems}
    n = len(elems)
    out = []
    out.append(MomentCheck("a", tuple(_vsum(((1, v) for v in elems), r)),
                           tuple(Fraction(kS * n, 9 - r) * x for x in k.coords)))
    sq = sum(p[v] ** 2 for v in elems)
    out.append(MomentCheck("b", tuple(_vsum(((p[v], v) for v in elems), r)),
                           tuple(Fraction(-sq, 2) * x for x in rho.coords)))
    mixed = tuple(sum(p[v] ** m * p2[v] for v in elems) for m in range(max_power + 1))
    odd = tuple(sum(p[v] ** (2 * m + 1) for v in elems) for m in range(max_power + 1))
    out.append(MomentCheck("c", mixed + odd, (0,) * (2 * (max_power + 1))))
    if r >= 5:
        out.append(MomentCheck("d", tuple(_vsum(((p[v] ** 2, v) for v in elems), r)),
                               tuple(Fraction(kS * sq, 9 - r) * x for x in k.coords)))
    out.append(MomentCheck("e", tuple(_vsum(((p[v] * p2[v], v) for v in elems), r)),
                           (Fraction(0),) * (r + 1)))
    return out


def mu_from_orbit(r: int, rho: LatticeVector | None = None) -> Fraction:
    """``-1/2 sum <>_beta (rho,beta)^2 k(beta)`` over degree-one classes."""
    rho = rho or roots(r)[0]
    return -Fraction(1, 2) * sum(val * pairing(rho, b) ** 2 * degree(b) for b, val in support_classes(r, 1))
