from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qcoh import lattice as L
from qcoh.lattice import LatticeVector as V

GRID = {
    # r: (R, I, F, G, H)
    3: (8, 6, 3, 2, 6),
    4: (20, 10, 5, 5, 30),
    5: (40, 16, 10, 16, 80),
    6: (72, 27, 27, 72, 216),
    7: (126, 56, 126, 576, 756),
    8: (240, 240, 2160, 17280, 6720),
}


def test_pairing_and_canonical():
    for r in range(3, 9):
        k = L.canonical(r)
        assert L.pairing(k, k) == 9 - r
    assert L.degree(V.parse("(0;-1,0,0,0,0)")) == 1
    assert L.pairing(V.parse("(1;1,1,0,0,0)"), V.parse("(0;-1,1,0,0,0)")) == 0


def test_rank_mismatch():
    with pytest.raises(L.RankMismatchError):
        L.pairing(V(1, (0, 0, 0)), V(1, (0, 0, 0, 0)))


def test_cremona_examples():
    assert L.cremona_reflect(V.parse("(0;-1,0,0)")) == V.parse("(1;0,1,1)")
    assert L.cremona_reflect(V.parse("(1;1,1,1,0,0)")) == V.parse("(-1;-1,-1,-1,0,0)")


def test_divisor_coordinates_round_trip():
    beta = V.parse("(2;1,0,-1,1)")
    assert L.vector_from_divisor(L.divisor_coords(beta)) == beta


vectors = st.integers(3, 8).flatmap(
    lambda r: st.builds(V, st.integers(-6, 6), st.tuples(*[st.integers(-4, 4)] * r)))


@settings(max_examples=100, deadline=None)
@given(vectors, st.data())
def test_generators_are_isometries(beta, data):
    other = data.draw(st.builds(V, st.integers(-6, 6), st.tuples(*[st.integers(-4, 4)] * beta.r)))
    for _, g in L.generators(beta.r):
        assert L.pairing(g(beta), g(other)) == L.pairing(beta, other)
        assert L.degree(g(beta)) == L.degree(beta)
        assert g(g(beta)) == beta


def test_weyl_orders():
    assert [L.weyl_order(r) for r in range(3, 9)] == [12, 120, 1920, 51840, 2903040, 696729600]


# -- reduction and invariants ---------------------------------------------------


def test_reduction_examples():
    red = L.weyl_reduce(V.parse("(0;0,0,0,0,-1)"))
    assert red.status == "supported" and red.normal_form == V.parse("(0;-1,0,0,0,0)")
    red = L.weyl_reduce(V.parse("(9;3,3,3,3,3,3,3,3)"))
    assert red.status == "supported" and red.normal_form == V.parse("(9;3,3,3,3,3,3,3,3)")
    assert L.weyl_reduce(V.parse("(2;1,1,1,1,1,0,0,0)")).status == "supported"
    assert L.weyl_reduce(V.parse("(1;1,1,1,0,0)")).status == "vanishing"


def test_gw_examples():
    assert L.gw_invariant(V.parse("(3;1,1,1,1,1,1,1,1)")) == 12
    assert L.gw_invariant(V.parse("(1;1,0,0,0)")) == 1
    assert L.gw_invariant(V.parse("(2;1,1,1,1,1,0,0,0)")) == 1
    assert L.gw_invariant(V.parse("(9;3,3,3,3,3,3,3,3)")) == 2880
    with pytest.raises(L.UnsupportedDegreeError):
        L.gw_invariant(V.parse("(4;1,1,1,1,1,1,1,1)"))


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 7), st.data())
def test_invariants_are_weyl_invariant(r, data):
    beta, _ = data.draw(st.sampled_from(L.support_classes(r, data.draw(st.sampled_from([1, 2, 3])))))
    name, g = data.draw(st.sampled_from(L.generators(r)))
    assert L.gw_invariant(g(beta)) == L.gw_invariant(beta)


# -- orbits -------------------------------------------------------------------------


@pytest.mark.parametrize("r", range(3, 9))
def test_cardinality_grid(r):
    c = L.cardinalities(r)
    assert tuple(c[x] for x in L.ORBIT_LABELS) == GRID[r]


@pytest.mark.parametrize("r", range(4, 9))
def test_recursions(r):
    assert all(L.recursion_checks(r).values())


def test_orbit_examples():
    assert len(L.enumerate_orbit(5, V.parse("(0;-1,0,0,0,0)"))) == 16
    assert len(L.enumerate_orbit(8, V(1, (0,) * 8))) == 17280
    assert len(L.enumerate_orbit(4, V.parse("(0;-1,-1,0,0)"))) == 30


def test_orbit_cap():
    with pytest.raises(L.OrbitTooLargeError):
        L.enumerate_orbit(8, V(1, (0,) * 8), cap=100)


def test_orbits_closed_and_classes_correct():
    for r in (5, 6):
        I = L.orbit(r, "I")
        assert I.is_closed()
        assert all(L.pairing(v, v) == -1 and L.degree(v) == 1 for v in I)
        assert all(L.pairing(v, v) == -2 and L.degree(v) == 0 for v in L.orbit(r, "R"))


def test_support_classes():
    c1 = L.support_classes(5, 1)
    assert len(c1) == 16 and all(v == 1 for _, v in c1)
    c8 = dict(L.support_classes(8, 1))
    assert len(c8) == 241 and c8[L.canonical(8)] == 12
    c6 = dict(L.support_classes(6, 3))
    assert len(c6) == 73 and c6[L.canonical(6)] == 12
    assert sum(1 for v in c6.values() if v == 1) == 72


def test_orbit_dump_is_sorted():
    text = L.orbit(3, "I").dump()
    lines = text.splitlines()
    assert len(lines) == 6
    assert lines == [str(v) for v in sorted(L.orbit(3, "I").elements, key=lambda v: v.coords)]


# -- moment sums -------------------------------------------------------------------


def _orthogonal_pair(r):
    rho = L.roots(r)[0]
    rho2 = next(x for x in L.roots(r) if L.pairing(x, rho) == 0 and x != rho and x != -rho)
    return rho, rho2


@pytest.mark.parametrize("r", [4, 5, 6])
@pytest.mark.parametrize("label", ["I", "F", "G"])
def test_moment_identities(r, label):
    rho, rho2 = _orthogonal_pair(r)
    checks = L.orbit_moment_sums(L.orbit(r, label), rho, rho2)
    assert {c.name for c in checks} >= {"a", "b", "c", "e"}
    assert all(c.ok for c in checks), [c for c in checks if not c.ok]


@pytest.mark.parametrize("r", [5, 6, 7, 8])
def test_second_moment_high_rank(r):
    rho, rho2 = _orthogonal_pair(r)
    for label in ("I", "F", "G"):
        (d,) = [c for c in L.orbit_moment_sums(L.orbit(r, label), rho, rho2) if c.name == "d"]
        assert d.ok


def test_odd_moment_on_f5_vanishes():
    rho, _ = _orthogonal_pair(5)
    assert sum(L.pairing(rho, b) for b in L.orbit(5, "F")) == 0


def test_moment_rejects_non_roots():
    with pytest.raises(ValueError):
        L.orbit_moment_sums(L.orbit(5, "I"), V.parse("(0;-1,0,0,0,0)"), L.roots(5)[0])


@pytest.mark.parametrize("r, mu", [(4, -3), (5, -4), (6, -6), (7, -12), (8, -60)])
def test_mu_from_orbits(r, mu):
    assert L.mu_from_orbit(r) == mu
    assert L.mu_from_orbit(r, L.roots(r)[-1]) == mu


def test_orthogonal_root_rank():
    rank, in_perp = L.orthogonal_root_rank(L.roots(6)[0])
    assert in_perp and rank == 5
