import random
from fractions import Fraction

import pytest

from qcoh import lattice as L
from qcoh import surface as S
from qcoh.algebra import univariate


def test_mask_contents():
    r = 4
    d2 = r + 2
    mask = S.uncertified_mask(r)
    for i in range(1, r + 2):
        assert mask[(i, d2)] == {0: [1]}
    assert mask[(d2, d2)] == {0: [0, 1], **{i: [1] for i in range(1, r + 2)}}
    assert len(mask) == r + 2


def test_uncertified_product_raises():
    with pytest.raises(S.UncertifiedError):
        S.quantum_product(4, 6, 6)
    coeffs = S.quantum_product(4, 6, 6, allow_uncertified=True)
    assert coeffs[0].unknown


def test_unit_and_commutativity():
    alg = S.surface_algebra(4)
    for i in range(alg.dim):
        expected = [Fraction(int(t == i)) for t in range(alg.dim)]
        assert [c.value.constant_term() if c.value.is_constant() else None
                for c in alg.product(0, i)] == expected
    for i in range(1, alg.dim):
        for j in range(1, alg.dim):
            assert [c.value for c in alg.product(i, j)] == [c.value for c in alg.product(j, i)]


def test_curve_free_part_of_k_square():
    for r in (3, 5):
        alg = S.surface_algebra(r)
        k = alg.from_rational(S._k_vector(alg))
        top = alg.multiply(k, k)[r + 2].value
        # terms with no Novikov variable are the cup product
        cup = sum((c for e, c in top.terms.items() if not any(e)), Fraction(0))
        assert cup == 9 - r


# -- symmetric point -----------------------------------------------------------------


@pytest.mark.parametrize("r", range(3, 9))
def test_symmetric_point_checks(r):
    rep = S.symmetric_point_analysis(r)
    assert rep.ok, {k: v for k, v in rep.checks.items() if not v}


def test_r5_cubic():
    rep = S.symmetric_point_analysis(5)
    assert rep.R == [-192, -80, -4, 1]
    assert univariate.mul([4, 1], univariate.mul([4, 1], [-12, 1])) == rep.R
    assert rep.mu_double_root == rep.mu_orbit == -4


def test_r7_double_root():
    rep = S.symmetric_point_analysis(7)
    assert rep.R == [-7488, -1104, -28, 1]
    assert univariate.evaluate(rep.R, -12) == 0
    assert univariate.evaluate(univariate.derivative(rep.R), -12) == 0


def test_r8_trace_erratum():
    rep = S.symmetric_point_analysis(8)
    assert rep.B == 252 and rep.B_printed == 240
    assert rep.mu_double_root == -60
    assert any("252" in d for d in rep.diagnostics)


@pytest.mark.parametrize("r, nu", [(5, -2), (6, -6), (7, -36), (8, -1800)])
def test_gamma_normalization(r, nu):
    rep = S.symmetric_point_analysis(r)
    assert rep.nu == nu
    assert rep.gamma[r + 2] == 1 and rep.gamma[0] == nu


# -- root subtori --------------------------------------------------------------------


@pytest.mark.parametrize("r", [3, 4, 5])
def test_subtorus(r):
    rho = L.roots(r)[0]
    rep = S.root_subtorus_check(r, rho, seed=3)
    assert S.on_subtorus(rho, rep.point)
    assert rep.ok, {k: v for k, v in rep.checks.items() if not v}


def test_off_subtorus_point_rejected():
    rho = L.roots(5)[0]
    pt = list(S.torus_point_on_subtorus(rho, random.Random(0)))
    pt[-1] *= 2
    pt[0] *= 3
    assert not S.on_subtorus(rho, pt)
    with pytest.raises(S.TorusPointError):
        S.root_subtorus_check(5, rho, sample=pt)


def test_proportionality_fails_off_subtorus():
    # negative control: the odd sums only vanish where q^rho = 1
    r = 5
    rho = L.roots(r)[0]
    pt = S.torus_point_on_subtorus(rho, random.Random(1))
    pt = tuple(p * (2 if i == 1 else 1) for i, p in enumerate(pt))
    qp = S._PowerCache(pt)
    total = sum(L.pairing(rho, b) * qp(b) for b, _ in L.support_classes(r, 1))
    assert total != 0


@pytest.mark.parametrize("seed", range(4))
def test_random_subtorus_points(seed):
    rho = L.roots(4)[seed]
    assert S.on_subtorus(rho, S.torus_point_on_subtorus(rho, random.Random(seed)))


# -- boundary -------------------------------------------------------------------------


@pytest.mark.parametrize("r", [4, 5])
def test_boundary(r):
    mod = S.boundary_extension(r)
    assert not mod.negative_powers
    assert mod.ok, {k: v for k, v in mod.checks.items() if not v}


def test_boundary_rank_range():
    with pytest.raises(ValueError):
        S.boundary_extension(3)


# -- certificates ---------------------------------------------------------------------


def test_r3_unit_point():
    c = S.semisimplicity_certificate(3)
    assert c.status == "semisimple-at-point" and c.point == S.ones(3)
    assert c.squarefree and c.separated and c.root_radius < 1e-20
    # k o alone has a repeated eigenvalue here
    assert not c.given_point_tame
    assert univariate.gcd(c.given_point_char_poly, univariate.derivative(c.given_point_char_poly)) != [1]


@pytest.mark.parametrize("r", [5, 6])
def test_unit_point_not_semisimple_witness(r):
    c = S.semisimplicity_certificate(r)
    assert c.status == "witness-at-probe"
    assert not c.given_point_tame
    assert not univariate.squarefree_discriminant(c.given_point_char_poly).is_squarefree
    assert c.point[-1] < Fraction(1, 100)
    assert c.squarefree and c.separated


def test_r5_double_eigenvalue_at_unit_point():
    c = S.semisimplicity_certificate(5)
    cp = c.given_point_char_poly
    q, rem = univariate.divmod_poly(cp, [16, 8, 1])
    assert not any(rem)


def test_r5_prime_point():
    pt = (2, 3, 5, 7, 11, Fraction(1, 1000))
    c = S.semisimplicity_certificate(5, pt)
    assert c.status == "semisimple-at-point" and c.given_point_tame
    assert c.separated


def test_certificate_is_deterministic():
    a = S.semisimplicity_certificate(5)
    b = S.semisimplicity_certificate(5)
    assert (a.point, a.operator, a.char_poly) == (b.point, b.operator, b.char_poly)
    c = S.semisimplicity_certificate(5, probe_seed=7)
    assert c.probe_seed == 7


def test_certificate_wrong_point_length():
    with pytest.raises(S.TorusPointError):
        S.semisimplicity_certificate(5, (1, 1, 1))


def test_empty_budget_is_inconclusive():
    c = S.semisimplicity_certificate(6, points=0, operators=1)
    assert c.status == "inconclusive" and not c.witness


# -- equivariance and associativity ---------------------------------------------------


@pytest.mark.parametrize("r", [3, 4, 5])
def test_equivariance(r):
    assert S.equivariance_check(r, draws=50) == []


def test_equivariance_needs_torus_substitution():
    r = 4
    alg = S.surface_algebra(r)
    bad = 0
    for name, w in L.generators(r):
        for i in range(1, alg.dim):
            x = S.act_on_element(alg, w, alg.from_rational(alg.basis_vector(i)))
            lhs = alg.multiply(x, x)
            rhs = S.act_on_element(alg, w, alg.product(i, i))
            bad += any(not a.agrees_with(b) for a, b in zip(lhs, rhs))
    assert bad > 0


@pytest.mark.parametrize("r", [3, 4])
def test_associativity(r):
    failures, compared = S.associativity_failures(r)
    assert failures == [] and compared > 0
