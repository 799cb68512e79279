from fractions import Fraction
from math import comb

import pytest

from hwperiods.errors import NonOrdinary, NonUnitVertexCoefficient
from hwperiods.hasse_witt import HypersurfaceFamily, hw_matrix_toric
from hwperiods.lattice import polytope_from_toric
from hwperiods.periods import (
    check_truncation_relation, dwork_family_specialization, dwork_ratio, hypergeometric_dwork,
    invertibility_certificate, period_matrix, period_series, truncate_series,
)
from hwperiods.rings import ParamPoly

from conftest import P1, P1xP1, P2, QUARTIC, hesse_family


def test_p1_layers(p1_universal):
    P = period_series(p1_universal, N=4)
    names = P.names
    a_1, a1 = (ParamPoly.symbol(names, n) for n in ("a-1", "a1"))
    expected = [1, 0, 2 * a_1 * a1, 0, 6 * a_1**2 * a1**2]
    assert [layer == e for layer, e in zip(P.layers, expected)] == [True] * 5
    assert P.is_graded()


def test_p1_series_is_central_binomial(p1_universal):
    # 1/(a-1/t + 1 + a1 t): layer 2k is binom(2k, k) (a-1 a1)^k, odd layers vanish
    P = period_series(p1_universal, N=10)
    a_1, a1 = (ParamPoly.symbol(P.names, n) for n in ("a-1", "a1"))
    for k in range(11):
        expected = comb(k, k // 2) * (a_1 * a1) ** (k // 2) if k % 2 == 0 else 0
        assert P.layers[k] == expected


def test_truncation_bounds(p1_universal):
    P = period_series(p1_universal, N=4)
    assert truncate_series(P, 0) == 1
    with pytest.raises(ValueError):
        truncate_series(P, 5)


def test_period_matrix_shape(quartic_universal):
    M = period_matrix(quartic_universal, 2)
    assert len(M) == 3 and all(len(row) == 3 for row in M)
    # diagonal series start with 1, off-diagonal with 0
    for i in range(3):
        for j in range(3):
            assert M[i][j].layers[0] == (1 if i == j else 0)
            assert M[i][j].is_graded()


@pytest.mark.parametrize("toric", [P1, P2, P1xP1])
@pytest.mark.parametrize("p", [3, 5])
def test_truncation_relation_reflexive(toric, p):
    F = HypersurfaceFamily.universal(polytope_from_toric(toric), toric=toric)
    res = check_truncation_relation(F, p)
    assert res.holds and res.witness is None


def test_truncation_relation_reports_witness(monkeypatch):
    import hwperiods.periods as periods
    real = periods.hw_matrix_toric

    def perturbed(F, p):
        A = real(F, p)
        return A.map(lambda x: x + ParamPoly.symbol(F.names, "a1"))

    monkeypatch.setattr(periods, "hw_matrix_toric", perturbed)
    F = HypersurfaceFamily.universal(polytope_from_toric(P1), toric=P1)
    res = check_truncation_relation(F, 3)
    assert not res
    assert res.witness["entry"] == [0, 0]
    assert res.witness["monomial"] == {"a-1": 0, "a0": 0, "a1": 1}
    assert res.witness["hw"] == 1 and res.witness["truncated"] == 0


def test_invertibility_triangle_p3(quartic_universal):
    assert invertibility_certificate(quartic_universal, 3) == 1


def test_hypergeometric_values():
    assert hypergeometric_dwork(4, 1)[1] == Fraction(24, 625)
    assert hypergeometric_dwork(1, 3) == [1, Fraction(1, 2), Fraction(3, 8), Fraction(5, 16)]
    with pytest.raises(ValueError):
        hypergeometric_dwork(0, 2)


@pytest.mark.parametrize("n,toric", [(1, P1), (2, P2)])
def test_dwork_specialisation(n, toric):
    F = HypersurfaceFamily.universal(polytope_from_toric(toric), toric=toric)
    coeffs, stray = dwork_family_specialization(F, 3)
    assert stray is None
    assert coeffs == hypergeometric_dwork(n, 3)


def test_dwork_ratio_errors():
    with pytest.raises(NonUnitVertexCoefficient):
        dwork_ratio(hesse_family(0), 5, 2)
    # a0 = 1 over F_5 is supersingular: the truncated period vanishes mod 5
    with pytest.raises(NonOrdinary):
        dwork_ratio(hesse_family(1), 5, 2)
    with pytest.raises(ValueError):
        F = HypersurfaceFamily.universal(polytope_from_toric(QUARTIC), toric=QUARTIC)
        dwork_ratio(F, 5, 2)


def test_dwork_ratio_stabilises():
    # consecutive ratios at a Teichmuller point agree to the lower precision
    from hwperiods.rings import teichmuller_lift
    F = hesse_family(teichmuller_lift(3, 5, 3).value)
    g2, g3 = dwork_ratio(F, 5, 2), dwork_ratio(F, 5, 3)
    assert g3.reduce(2) == g2


def test_normalisation_needs_coefficient():
    F = HypersurfaceFamily.from_toric(P1, {(1,): 1, (-1,): 1})
    with pytest.raises(NonUnitVertexCoefficient):
        period_series(F, N=2)


def test_hesse_period_layers():
    # P = sum (-1)^k (3k)!/(k!)^3 (a1 a2 a3)^k
    F = hesse_family(None, (None, None, None))
    P = period_series(F, N=6)
    a1, a2, a3 = (ParamPoly.symbol(P.names, f"a{i}") for i in (1, 2, 3))
    assert P.layers[3] == -6 * a1 * a2 * a3
    assert P.layers[6] == 90 * (a1 * a2 * a3) ** 2
    assert all(P.layers[k] == 0 for k in (1, 2, 4, 5))


def _teichmuller_cy(toric, p, s, rng):
    from hwperiods.hasse_witt import alpha_matrix
    from hwperiods.rings import teichmuller_lift
    P = polytope_from_toric(toric)
    while True:
        c = {u: teichmuller_lift(rng.randrange(p), p, s).value for u in P.lattice_points}
        c[(0,) * toric.dimension] = 1
        F = HypersurfaceFamily(P, c, toric=toric)
        if alpha_matrix(F, p, 1, 1)[0, 0] % p:
            return F


def _truncated_period(F, K, M):
    """sum_(k<=K) (-1)^k [t^0] h^k mod M for f = 1 + h (coefficient 1 at the origin)."""
    from hwperiods.laurent import LaurentPoly, power_coefficients_by_step
    origin = (0,) * F.dimension
    h = LaurentPoly(F.dimension, {u: c % M for u, c in F.coeffs.items() if u != origin})
    steps = power_coefficients_by_step(h, K, [origin], M)
    return sum((-1) ** k * row[0] for k, row in enumerate(steps)) % M


@pytest.mark.parametrize("toric", [P1, P2, P1xP1])
@pytest.mark.parametrize("p", [3, 5])
def test_alpha_against_truncated_period_at_teichmuller_points(toric, p):
    import random
    from hwperiods.hasse_witt import alpha_matrix
    rng = random.Random(p * 7 + len(toric.rays))
    for _ in range(4):
        F = _teichmuller_cy(toric, p, 2, rng)
        M = p**2
        alpha = [alpha_matrix(F, p, s, 2)[0, 0] for s in (1, 2)]
        trunc = [_truncated_period(F, p**s - 1, M) for s in (1, 2)]
        # the two sequences agree mod p, and their level-2 ratios mod p^2
        assert all((a - t) % p == 0 for a, t in zip(alpha, trunc))
        assert alpha[1] * pow(alpha[0], -1, M) % M == dwork_ratio(F, p, 2).value


def test_alpha_and_truncated_period_can_differ_mod_p_squared():
    # t^-1 + 1 + t at p = 5: [t^0] f^24 = 6 and sum_(j<=12) binom(2j, j) = 16 mod 25
    F = HypersurfaceFamily.from_toric(P1, {(-1,): 1, (0,): 1, (1,): 1})
    from hwperiods.hasse_witt import alpha_matrix
    assert alpha_matrix(F, 5, 2)[0, 0] == 6
    assert _truncated_period(F, 24, 25) == 16


def test_dwork_ratio_precision_one_vs_two():
    from hwperiods.rings import teichmuller_lift
    for a0 in (3, 4):
        F = hesse_family(teichmuller_lift(a0, 5, 2).value)
        assert dwork_ratio(F, 5, 2).reduce(1) == dwork_ratio(F, 5, 1)
