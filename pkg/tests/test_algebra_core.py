from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qcoh.algebra import univariate
from qcoh.algebra.matrix import ExactMatrix, NonSquareError, char_poly, char_poly_coeffs, determinant, \
    evaluate_matrix_poly
from qcoh.algebra.poly import DivisionError, JetPolynomial, Ring, RingMismatchError, format_poly, parse_poly
from qcoh.algebra.quotient import NotInvertibleError, QuotientRing
from qcoh.algebra.roots import numeric_roots

R = Ring.build(laurent=("q",), jet=("x2", "x3"))
P = Ring.build(laurent=("q",), poly=("u",))


def poly(text, ring=R):
    return parse_poly(ring, text)


# -- jet polynomials -------------------------------------------------------------


def test_jet_truncation_drops_cross_terms():
    assert poly("1 + x2") * poly("1 + x3") == poly("1 + x2 + x3")
    assert poly("x2") * poly("x2") == R.zero()


def test_laurent_identity():
    assert poly("q^-1") * poly("q") == R.one()


def test_cross_term_dropped_in_hand_expansion():
    assert poly("2 + q*x3") * poly("3 + q*x2") == poly("6 + 3*q*x3 + 2*q*x2")


def test_format_parse_round_trip():
    p = poly("-3/4*q^-2*x2 + 5*q^3 - 1")
    assert parse_poly(R, format_poly(p)) == p


def test_ring_mismatch():
    other = Ring.build(laurent=("t",))
    with pytest.raises(RingMismatchError):
        R.var("q") + other.var("t")


def test_negative_power_of_polynomial_variable_rejected():
    with pytest.raises(ValueError):
        P.monomial({"u": -1})


def test_unit_inverse_and_non_unit():
    x = poly("2*q^3 + q^3*x2")
    assert x * x.inverse() == R.one()
    with pytest.raises(DivisionError):
        poly("q + 1").inverse()


def test_derivative_in_laurent_variable():
    # q d/dq on the exponential variable
    assert poly("q^-2 + 3*q*x2").derivative("q") == poly("-2*q^-2 + 3*q*x2")
    assert poly("q*x2 + x3").derivative("x2") == poly("q")


def test_exact_division():
    a = parse_poly(P, "u^2 - q^2")
    assert a.exact_div(parse_poly(P, "u - q")) == parse_poly(P, "u + q")
    with pytest.raises(DivisionError):
        a.exact_div(parse_poly(P, "u - 2*q"))


# -- hypothesis: ring axioms ----------------------------------------------------

coef = st.fractions(min_value=-5, max_value=5, max_denominator=6)
exps = st.tuples(st.integers(-2, 2), st.integers(0, 1), st.integers(0, 1))


@st.composite
def jets(draw):
    terms = draw(st.dictionaries(exps, coef, max_size=5))
    return JetPolynomial(R, terms)


@settings(max_examples=60, deadline=None)
@given(jets(), jets(), jets())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == R.zero()
    assert a * R.one() == a


@settings(max_examples=40, deadline=None)
@given(jets())
def test_no_term_exceeds_jet_order(a):
    for e in (a * a * a).terms:
        assert R.jet_degree(e) < R.jet_order


# -- matrices and characteristic polynomials -------------------------------------


def test_identity_char_poly():
    lam = Ring.build(poly=("lam",))
    assert char_poly(ExactMatrix([[1, 0], [0, 1]])) == parse_poly(lam, "lam^2 - 2*lam + 1")


def test_non_square_rejected():
    with pytest.raises(NonSquareError):
        ExactMatrix([[1, 2]])


small_int = st.integers(-6, 6)


@st.composite
def int_matrices(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return [[Fraction(draw(small_int)) for _ in range(n)] for _ in range(n)]


@settings(max_examples=50, deadline=None)
@given(int_matrices())
def test_cayley_hamilton(rows):
    m = ExactMatrix(rows)
    assert evaluate_matrix_poly(char_poly_coeffs(m), m).is_zero()


@settings(max_examples=50, deadline=None)
@given(int_matrices())
def test_char_poly_matches_sympy(rows):
    lam = sympy.Symbol("lam")
    expected = sympy.Poly(sympy.Matrix(rows).charpoly(lam).as_expr(), lam).all_coeffs()[::-1]
    got = char_poly_coeffs(ExactMatrix(rows))
    assert got == [Fraction(int(c.p), int(c.q)) for c in expected]
    dense = char_poly(ExactMatrix(rows))
    assert univariate.from_jet(dense, "lam") == got


@settings(max_examples=50, deadline=None)
@given(int_matrices())
def test_determinant_matches_sympy(rows):
    assert determinant(ExactMatrix(rows)) == int(sympy.Matrix(rows).det())


def test_char_poly_over_laurent_ring():
    L = Ring.build(laurent=("q",))
    m = ExactMatrix([[L.zero(), L.var("q")], [L.one(), L.zero()]])
    assert char_poly(m, "u") == parse_poly(P, "u^2 - q")
    assert char_poly_coeffs(m) == [-L.var("q"), L.zero(), L.one()]


# -- squarefree tests ------------------------------------------------------------


def test_double_root_cubic_not_squarefree():
    rep = univariate.squarefree_discriminant([-192, -80, -4, 1])
    assert not rep.is_squarefree and rep.discriminant == 0
    assert univariate.rational_roots([-192, -80, -4, 1]) == [-4, 12]


def test_simple_squarefree_examples():
    assert univariate.squarefree_discriminant([-1, 0, 1]).is_squarefree
    assert univariate.squarefree_discriminant([0, -108, 0, 0, 1]).is_squarefree


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-8, 8), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
def test_squarefree_matches_sympy(cs):
    x = sympy.Symbol("x")
    p = sympy.Poly(list(reversed(cs)), x)
    rep = univariate.squarefree_discriminant([Fraction(c) for c in cs])
    assert rep.is_squarefree == (sympy.degree(sympy.gcd(p, p.diff(x)), x) == 0)
    assert rep.discriminant == int(sympy.discriminant(p, x))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=4))
def test_rational_roots_recovered(rs):
    cs = [Fraction(1)]
    for t in rs:
        cs = univariate.mul(cs, [Fraction(-t), Fraction(1)])
    assert univariate.rational_roots(cs) == sorted(set(rs))


# -- quotient rings --------------------------------------------------------------


def test_cube_root_tower():
    Qr = QuotientRing(Ring.build(laurent=("q",)), "xi", [poly("-4*q", Ring.build(laurent=("q",))), 0, 0, 1])
    xi = Qr.gen()
    assert xi * xi * xi == Qr.coerce(poly("4*q", Ring.build(laurent=("q",))))
    assert Qr.one().inverse() == Qr.one()
    assert xi * xi.inverse() == Qr.one()


def test_v22_cubic_reduction():
    base = Ring.build(laurent=("q",))
    q = base.var("q")
    Qr = QuotientRing(base, "u", [q ** 3 * -76, q ** 2 * -56, q * -8, 1])
    u = Qr.gen()
    assert (u * u).coeffs == (base.zero(), base.zero(), base.one())
    assert u ** 3 == Qr.element([q ** 3 * 76, q ** 2 * 56, q * 8])


def test_zero_divisor_not_invertible():
    base = Ring.build(laurent=("q",))
    Qr = QuotientRing(base, "u", [base.const(-1), 0, 1])  # u^2 - 1 splits
    with pytest.raises(NotInvertibleError):
        (Qr.gen() - 1).inverse()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=3, max_size=3).filter(any))
def test_field_inverse(cs):
    base = Ring((), ())
    Qr = QuotientRing(base, "t", [base.const(-2), 0, 0, 1])  # t^3 - 2 is irreducible
    x = Qr.element([base.const(c) for c in cs])
    assert x * x.inverse() == Qr.one()


# -- numeric roots ---------------------------------------------------------------


def test_cube_root_of_108():
    rep = numeric_roots([Fraction(-108), 0, 0, 1])
    real = [z for z in rep.roots if abs(z.imag) < 1e-20]
    assert len(real) == 1 and abs(real[0].real - 4.762203155904598) < 1e-12
    assert rep.separated and rep.error_bound < 1e-25


def test_double_roots_not_separated():
    assert not numeric_roots([0, 0, Fraction(1)]).separated
    rep = numeric_roots([Fraction(-192), -80, -4, 1])
    assert not rep.separated
    assert sorted(round(z.real, 6) for z in rep.roots) == [-4, -4, 12]
