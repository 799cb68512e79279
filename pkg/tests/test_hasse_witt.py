import random

import pytest
from hypothesis import given, settings, strategies as st

from hwperiods.errors import BudgetExceeded, MalformedInput, NonUnitDeterminant
from hwperiods.hasse_witt import (
    HypersurfaceFamily, alpha_matrix, alpha_with_derivative, cartier_tau,
    connection_matrix_1param, frobenius_unit_root_matrix, hw_complete_intersection,
    hw_matrix_toric, hw_scalar_cy, verify_congruences,
)
from hwperiods.laurent import LaurentPoly, multiply, power
from hwperiods.lattice import polytope_from_toric
from hwperiods.rings import PadicMatrix, ParamPoly, teichmuller_lift
from hwperiods.zeta import count_points_toric, unit_root_from_counts

from conftest import P1, P1xP1, P2, P3, QUARTIC, hesse_family


def numeric_family(toric, rng, M):
    P = polytope_from_toric(toric)
    return HypersurfaceFamily(P, {u: rng.randrange(M) for u in P.lattice_points}, toric=toric)


def test_p1_symbolic_hw(p1_universal):
    A = hw_matrix_toric(p1_universal, 3)
    assert A.shape == (1, 1)
    assert A[0, 0].to_text() == "a0^2+2*a-1*a1"


def test_alpha_zero_is_identity(quartic_universal):
    assert alpha_matrix(quartic_universal, 5, 0, 2) == PadicMatrix.identity(3, 5, 2)


@pytest.mark.parametrize("toric,p,s", [(P2, 3, 2), (QUARTIC, 3, 1), (P1xP1, 5, 1), (QUARTIC, 5, 1)])
def test_alpha_matches_definition(toric, p, s):
    rng = random.Random(p * 10 + s)
    F = numeric_family(toric, rng, p**s)
    A = alpha_matrix(F, p, s)
    full = power(F.f, p**s - 1, p**s)
    for i, ui in enumerate(F.interior):
        for j, uj in enumerate(F.interior):
            target = tuple(p**s * a - b for a, b in zip(uj, ui))
            assert A[i, j] == full.coefficient(target) % p**s


def test_exponent_outside_polytope():
    with pytest.raises(MalformedInput):
        HypersurfaceFamily.from_toric(P2, {(3, 0): 1})


def test_hw_entries_are_degree_p_minus_1(quartic_universal):
    A = hw_matrix_toric(quartic_universal, 3)
    for i in range(3):
        for j in range(3):
            assert A[i, j].is_homogeneous(2)


def test_cy_scalar_via_tau():
    rng = random.Random(11)
    for toric in (P1, P2, P1xP1):
        for p in (3, 5):
            F = numeric_family(toric, rng, p)
            g = F.f.shift((1,) * F.dimension)
            via_tau = cartier_tau(power(g, p - 1, p), p).coefficient((0,) * F.dimension) % p
            assert hw_scalar_cy(g, p, p) % p == via_tau == alpha_matrix(F, p, 1)[0, 0]


def random_laurent(rng, n, k, span):
    return LaurentPoly(n, {tuple(rng.randint(-span, span) for _ in range(n)): rng.randint(-9, 9)
                           for _ in range(k)})


def frobenius_substitute(G, p):
    return LaurentPoly(G.n, {tuple(p * x for x in e): c for e, c in G.terms.items()})


def test_tau_semilinearity_1000_pairs():
    rng = random.Random(1000)
    for _ in range(1000):
        p = rng.choice([2, 3, 5, 7])
        n = rng.randint(1, 3)
        G = random_laurent(rng, n, rng.randint(1, 3), 2)
        h = random_laurent(rng, n, rng.randint(1, 5), 3 * p)
        h2 = random_laurent(rng, n, rng.randint(1, 5), 3 * p)
        assert cartier_tau(multiply(frobenius_substitute(G, p), h), p) == multiply(G, cartier_tau(h, p))
        assert cartier_tau(h + h2, p) == cartier_tau(h, p) + cartier_tau(h2, p)


def test_complete_intersection_single_factor_matches_toric():
    rng = random.Random(5)
    F = numeric_family(QUARTIC, rng, 3)
    assert hw_complete_intersection([F.f], F.interior, 3) == hw_matrix_toric(F, 3)


def test_complete_intersection_two_factors():
    # f1 f2 with f1 = 1 + t, f2 = 1 + 1/t: the product is t + 2 + 1/t
    f1 = LaurentPoly(1, {(0,): 1, (1,): 1})
    f2 = LaurentPoly(1, {(0,): 1, (-1,): 1})
    A = hw_complete_intersection([f1, f2], [(0,)], 5)
    assert A[0, 0] == power(multiply(f1, f2), 4).coefficient((0,)) % 5


def lam_family(toric, rng, p):
    P = polytope_from_toric(toric)
    polys = {u: [rng.randrange(p**3), rng.randrange(p**3)] for u in P.lattice_points}
    return HypersurfaceFamily.one_parameter(P, polys, toric=toric)


def invertible_point(F, p, rng):
    for _ in range(8 * p):
        lam0 = rng.randrange(p**3)
        if alpha_matrix(F.at(lam0, p), p, 1, 1).det().is_unit():
            return lam0
    return None


@pytest.mark.parametrize("toric,p", [(P1, 3), (P2, 3), (QUARTIC, 3), (P1xP1, 5)])
def test_congruences_random_lambda_family(toric, p):
    rng = random.Random(p + len(toric.rays))
    while True:
        F = lam_family(toric, rng, p)
        lam0 = invertible_point(F, p, rng)
        if lam0 is not None:
            break
    r = verify_congruences(F, p, 3, point=lam0)
    assert r.all_hold
    assert set(r.part1) == {1, 2, 3} and set(r.part2) == {1, 2}
    assert all(r.exponents[f"part2_s{s}"] >= s for s in (1, 2))
    assert all(r.exponents[f"part3_s{s}_m{m}"] >= s + m for s in (1, 2) for m in (0, 1))


def test_congruences_numeric_family():
    rng = random.Random(9)
    F = numeric_family(QUARTIC, rng, 125)
    r = verify_congruences(F, 5, 2)
    assert all(r.part1.values())
    assert r.part3 == {}
    if r.part2.get(1) is not None:
        assert r.part2[1]


def test_congruences_non_invertible_alpha1():
    # t^-1 + lam + t at lam = 1 over F_3: alpha_1 = 1 + 2 lam^2 vanishes
    P = polytope_from_toric(P1)
    F = HypersurfaceFamily.one_parameter(P, {(-1,): [1], (0,): [0, 1], (1,): [1]}, toric=P1)
    r = verify_congruences(F, 3, 2, point=1)
    assert all(r.part1.values())
    assert r.part2 == {1: None}
    assert r.notes


def test_congruence_report_dict_is_sorted():
    P = polytope_from_toric(P1)
    F = HypersurfaceFamily.one_parameter(P, {(-1,): [1], (0,): [0, 1], (1,): [1]}, toric=P1)
    d = verify_congruences(F, 3, 2, point=0).to_dict()
    assert d["all_hold"] is True
    assert list(d["part3"]) == sorted(d["part3"])


def test_connection_matrix_p1():
    # alpha_1 = lam^2 + 2 over Z/3: D alpha / alpha = 2 lam / (lam^2 + 2)
    P = polytope_from_toric(P1)
    F = HypersurfaceFamily.one_parameter(P, {(-1,): [1], (0,): [0, 1], (1,): [1]}, toric=P1)
    C = connection_matrix_1param(F, 3, 1, point=0)
    lam = ParamPoly.symbol(("lam",), "lam")
    assert C.numerator[0, 0] == 2 * lam
    assert C.denominator == lam**2 + 2
    assert C.value.rows == ((0,),)
    with pytest.raises(NonUnitDeterminant):
        connection_matrix_1param(F, 3, 1, point=1)


def test_alpha_with_derivative_matches_finite_symbolic():
    rng = random.Random(3)
    F = lam_family(P2, rng, 3)
    A, DA = alpha_with_derivative(F, 3, 2, 2, 4)
    sym = alpha_matrix(F, 3, 2, 2)
    lam = F.lam
    assert A[0, 0] == sym[0, 0].evaluate({lam: 4}, 9)
    assert DA[0, 0] == sym[0, 0].derivative(lam).evaluate({lam: 4}, 9)


def test_frobenius_ladder_p2():
    # a0 = 3 is an ordinary smooth fibre over F_7 (a0^3 = -27 is the singular locus);
    # the ladder sees the unit root only at the Teichmuller lift of the coefficient
    F = hesse_family(teichmuller_lift(3, 7, 2).value)
    lad = frobenius_unit_root_matrix(F, 7, 2)
    R, prec = lad
    assert prec >= 2 and lad.agreements[-1] == prec
    # independent oracle: unit root of T^2 - aT + 7 from the point count
    N = count_points_toric(hesse_family(3), 7).total
    assert R[0, 0] == unit_root_from_counts(N, 7, 2).value.value


def test_frobenius_ladder_off_teichmuller_is_a_different_map():
    naive = frobenius_unit_root_matrix(hesse_family(3), 7, 2).matrix
    lifted = frobenius_unit_root_matrix(hesse_family(teichmuller_lift(3, 7, 2).value), 7, 2).matrix
    assert naive.reduce(1) == lifted.reduce(1)
    assert naive != lifted


def test_frobenius_ladder_errors():
    F = hesse_family(0)
    with pytest.raises(NonUnitDeterminant):
        frobenius_unit_root_matrix(F, 5, 2)
    with pytest.raises(BudgetExceeded) as exc:
        frobenius_unit_root_matrix(hesse_family(3), 5, 3, budget_terms=10)
    partial = exc.value.partial
    assert partial.levels == 0 and partial.agreements == []
    assert partial.matrix == alpha_matrix(hesse_family(3), 5, 1, 3)


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=30, deadline=None)
def test_congruence_part1_property(a, b, c):
    F = HypersurfaceFamily.from_toric(P2, {(0, 0): a + 1, (1, 0): b, (0, 1): c, (-1, -1): 1})
    r = verify_congruences(F, 3, 2)
    assert all(r.part1.values())
    assert all(v is not False for v in r.part2.values())


def test_hesse_symbolic_hw():
    # [t^0] (a + t1 + t2 + 1/(t1 t2))^4 = a^4 + 4!/(1! 1! 1!) a
    F = hesse_family(None)
    a0 = ParamPoly.symbol(F.names, "a0")
    assert alpha_matrix(F, 5, 1, 25)[0, 0] == a0**4 + 24 * a0
    assert hw_matrix_toric(F, 5)[0, 0] == a0**4 + 4 * a0


def test_alpha_independent_of_term_order():
    rng = random.Random(21)
    P = polytope_from_toric(QUARTIC)
    coeffs = {u: rng.randrange(125) for u in P.lattice_points}
    items = list(coeffs.items())
    rng.shuffle(items)
    F = HypersurfaceFamily(P, coeffs, toric=QUARTIC)
    G = HypersurfaceFamily(P, dict(items), toric=QUARTIC)
    assert alpha_matrix(F, 5, 2, 3) == alpha_matrix(G, 5, 2, 3)


def test_alpha_level_one_is_hw(quartic_universal):
    assert alpha_matrix(quartic_universal, 3, 1, 1) == hw_matrix_toric(quartic_universal, 3)
