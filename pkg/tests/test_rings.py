import random
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from hwperiods.errors import NonUnitDeterminant, PrecisionMismatch
from hwperiods.rings import (
    QQ, ZZ, FrobeniusEndo, IntMod, Matrix, PadicMatrix, ParamPoly, PolyRing, Zmod,
    apply_frobenius, matrix_inverse, multinomial, teichmuller_lift, valuation,
)

PRIMES = [2, 3, 5, 7, 11]


def test_teichmuller_examples():
    assert teichmuller_lift(1, 5, 3) == 1
    assert teichmuller_lift(0, 7, 2) == 0
    assert teichmuller_lift(2, 5, 2).value == 7


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_teichmuller_fixed_point_all_residues(p, s):
    for a in range(p):
        w = teichmuller_lift(a, p, s)
        assert w.value % p == a
        assert w**p == w
        if a:
            assert w ** (p - 1) == 1


def test_teichmuller_rejects_out_of_range():
    with pytest.raises(ValueError):
        teichmuller_lift(5, 5, 2)


def test_intmod_arithmetic_and_units():
    x = IntMod(7, 5, 2)
    assert x + 20 == IntMod(2, 5, 2)
    assert (x * x.inverse()).value == 1
    assert not IntMod(10, 5, 2).is_unit()
    with pytest.raises(ZeroDivisionError):
        IntMod(10, 5, 2).inverse()
    assert str(IntMod(-1, 3, 3)) == "26"


def test_intmod_precision_mismatch():
    with pytest.raises(PrecisionMismatch):
        IntMod(1, 5, 2) + IntMod(1, 5, 3)
    with pytest.raises(PrecisionMismatch):
        IntMod(1, 5, 2) * IntMod(1, 3, 2)


@given(st.integers(), st.integers(), st.integers(), st.sampled_from(PRIMES), st.integers(1, 4))
def test_zmod_ring_axioms(a, b, c, p, s):
    R = Zmod(p, s)
    x, y, z = R(a), R(b), R(c)
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x + (-x) == R.zero
    assert x * R.one == x
    assert R.from_text(R.to_text(x)) == x
    assert R.is_unit(x) == (a % p != 0)


@given(st.fractions(), st.fractions())
def test_rational_ring_text_round_trip(a, b):
    assert QQ.from_text(QQ.to_text(a + b)) == a + b
    if b:
        assert QQ.inverse(b) * b == 1


def test_integer_ring_units():
    assert ZZ.inverse(-1) == -1
    with pytest.raises(ZeroDivisionError):
        ZZ.inverse(2)
    assert ZZ.from_text(ZZ.to_text(-12345678901234567890)) == -12345678901234567890


NAMES = ("a-1", "a0", "a1")
exps = st.tuples(*[st.integers(-2, 3)] * 3)
polys = st.dictionaries(exps, st.integers(-5, 5), max_size=5).map(lambda d: ParamPoly(NAMES, d))


@given(polys, polys, polys)
@settings(max_examples=60)
def test_parampoly_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f - f == 0
    assert all(c != 0 for c in (f * g).terms.values())


@given(polys)
def test_parampoly_text_round_trip(f):
    assert ParamPoly.from_text(NAMES, f.to_text()) == f


def test_parampoly_canonical_text():
    a_1, a0, a1 = (ParamPoly.symbol(NAMES, n) for n in NAMES)
    assert (a0**2 + 2 * a_1 * a1).to_text() == "a0^2+2*a-1*a1"
    assert ParamPoly(NAMES).to_text() == "0"
    assert (a0 - 1).to_text() == "-1+a0"


def test_parampoly_degree_and_homogeneity():
    a_1, a0, a1 = (ParamPoly.symbol(NAMES, n) for n in NAMES)
    f = a0**2 + 2 * a_1 * a1
    assert f.degree() == 2 and f.is_homogeneous(2)
    assert not (f + a0).is_homogeneous()
    assert f.homogeneous_part(2) == f
    assert (f + 3).truncate(0) == 3


def test_poly_ring_descriptor():
    R = PolyRing(Zmod(5, 2), ("x", "y"))
    x, y = R.gens()
    f = x * y + R(3)
    assert R.from_text(R.to_text(f)) == f
    assert R.is_unit(R(2)) and not R.is_unit(x)


def test_multinomial_examples():
    assert multinomial(2, [1, 1]) == 2
    assert multinomial(4, [2, 2]) == 6
    assert multinomial(25, [5]) == 53130
    assert valuation(53130, 5) == 1


def test_multinomial_rejects_bad_parts():
    with pytest.raises(ValueError):
        multinomial(3, [-1])
    with pytest.raises(ValueError):
        multinomial(3, [2, 2])


@given(st.integers(0, 30), st.lists(st.integers(0, 10), max_size=4))
def test_multinomial_matches_factorials(k, parts):
    if sum(parts) > k:
        return
    expected = factorial(k)
    for q in parts + [k - sum(parts)]:
        expected //= factorial(q)
    assert multinomial(k, parts) == expected


def test_multinomial_valuation_bound():
    # k = p^s: nu_p(multinomial) >= s - min nu_p(part), over all parts incl. the last
    rng = random.Random(20261014)
    cases = 0
    while cases < 1200:
        p = rng.choice([2, 3, 5, 7])
        s = rng.randint(1, 3)
        k = p**s
        parts = [rng.randint(0, k) for _ in range(rng.randint(1, 3))]
        if sum(parts) > k:
            continue
        full = parts + [k - sum(parts)]
        nonzero = [q for q in full if q]
        if len(nonzero) < 2:
            continue
        bound = s - min(valuation(q, p) for q in nonzero)
        assert valuation(multinomial(k, parts), p) >= bound
        cases += 1


def test_truncation_congruence_mod_p():
    # multinomial(p^s-1; parts, p^s-1-k) = (-1)^k multinomial(k; parts) mod p
    rng = random.Random(7)
    for _ in range(600):
        p = rng.choice([3, 5, 7])
        s = rng.randint(1, 3)
        e = p**s - 1
        k = rng.randint(0, e)
        parts = [rng.randint(0, k) for _ in range(rng.randint(0, 3))]
        if sum(parts) > k:
            continue
        lhs = multinomial(e, parts + [e - k]) if parts else comb(e, k)
        assert (lhs - (-1) ** k * multinomial(k, parts)) % p == 0


def test_truncation_congruence_fails_termwise_mod_p_squared():
    # The congruence is only a mod-p statement term by term; mod p^s it can fail.
    p, s, k, parts = 3, 2, 3, [3]
    lhs = multinomial(p**s - 1, parts + [p**s - 1 - k])
    rhs = (-1) ** k * multinomial(k, parts)
    assert lhs == 56
    assert (lhs - rhs) % p == 0
    assert (lhs - rhs) % p**s != 0


def test_matrix_inverse_examples():
    I = PadicMatrix.identity(3, 5, 2)
    assert matrix_inverse(I) == I
    assert matrix_inverse(PadicMatrix([[2]], 5, 2)).rows == ((13,),)
    with pytest.raises(NonUnitDeterminant):
        matrix_inverse(PadicMatrix([[5]], 5, 2))


@pytest.mark.parametrize("seed", range(30))
def test_random_unit_matrix_inverse(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5, 7])
    s = rng.randint(1, 4)
    r = rng.randint(1, 6)
    while True:
        M = PadicMatrix([[rng.randrange(p**s) for _ in range(r)] for _ in range(r)], p, s)
        if M.det().is_unit():
            break
    Minv = matrix_inverse(M)
    assert M * Minv == PadicMatrix.identity(r, p, s)
    assert Minv * M == PadicMatrix.identity(r, p, s)


def test_padic_det_matches_leibniz():
    rng = random.Random(3)
    for _ in range(40):
        r = rng.randint(1, 4)
        rows = [[rng.randrange(27) for _ in range(r)] for _ in range(r)]
        assert PadicMatrix(rows, 3, 3).det().value == Matrix(rows).det() % 27


def test_frobenius_examples():
    sigma = FrobeniusEndo(5)
    I = PadicMatrix.identity(2, 5, 3)
    assert apply_frobenius(I, sigma) == I
    a1 = ParamPoly.symbol(("a1",), "a1")
    assert apply_frobenius(3 * a1**2, sigma) == 3 * a1**10
    w = teichmuller_lift(3, 5, 3)
    assert sigma(w) == w == w**5


@given(polys, st.sampled_from([2, 3, 5]))
@settings(max_examples=40)
def test_frobenius_is_p_power_mod_p(f, p):
    # sigma(x) = x^p mod p on integer-coefficient polynomials
    assert (f.frobenius(p) - f**p) % p == 0


def test_symbolic_matrix_frobenius_entrywise():
    a = ParamPoly.symbol(("a",), "a")
    M = Matrix([[a, 1], [0, a + 1]])
    S = apply_frobenius(M, FrobeniusEndo(3))
    assert S.rows == ((a**3, 1), (0, a**3 + 1))
