"""Truncated period series and the identities tying them to alpha matrices.

With the coefficient at u_j set to 1, write f = t^{u_j}(1 + h).  The period
P_i is the coefficient of t^{-u_i} in 1/f, i.e. sum_k (-1)^k [t^{u_j-u_i}] h^k,
and layer k is homogeneous of degree k in the remaining coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import NonOrdinary, NonUnitVertexCoefficient
from .hasse_witt import hw_matrix_toric, param_name
from .laurent import LaurentPoly, power_coefficients_by_step, shifted_tail
from .rings import IntMod, ParamPoly

__all__ = [
    "PeriodSeries", "TruncationCheck", "period_series", "period_matrix", "truncate_series",
    "check_truncation_relation", "invertibility_certificate", "dwork_ratio",
    "hypergeometric_dwork", "dwork_family_specialization", "constant_term_of_product",
]


@dataclass(frozen=True)
class PeriodSeries:
    """Layers 0..N of the period expanded around the monomial at ``j``."""

    j: tuple
    row: tuple
    order: int
    layers: tuple
    names: tuple

    def is_graded(self):
        return all(layer.is_homogeneous(k) for k, layer in enumerate(self.layers))


def _normalized(F, j):
    """f with the coefficient at u_j replaced by 1 (symbol) or divided out (unit)."""
    j = tuple(j)
    c = F.coeffs.get(j, 0)
    names = F.names
    if isinstance(c, ParamPoly) and c.is_monomial() and not c.is_constant():
        (e, coef), = c.terms.items()
        if coef == 1 and sum(e) == 1 and min(e) == 0:
            name = names[e.index(1)]
            return F.f.map_coefficients(
                lambda x: x.subs({name: 1}) if isinstance(x, ParamPoly) else x), names
    if c == 0:
        raise NonUnitVertexCoefficient(f"no coefficient at the normalization point {list(j)}")
    return F.f, names


def _layers(h, K, target):
    out = power_coefficients_by_step(h, K, [target])
    return [col[0] for col in out]


def period_series(F, j=None, N=4, row=None):
    """Period P_row normalised at u_j, through grade N.

    For a Calabi-Yau family the defaults pick the unique interior point for
    both ``j`` and ``row``.
    """
    if j is None:
        if len(F.interior) != 1:
            raise ValueError("normalization point required when the interior has several points")
        j = F.interior[0]
    j = tuple(j)
    row = j if row is None else tuple(row)
    f, names = _normalized(F, j)
    _, _, h = shifted_tail(f, j)
    target = tuple(a - b for a, b in zip(j, row))
    raw = _layers(h, N, target)
    layers = []
    for k, c in enumerate(raw):
        if not isinstance(c, ParamPoly):
            c = ParamPoly.constant(names, c)
        layers.append(c if k % 2 == 0 else -c)
    return PeriodSeries(j, row, N, tuple(layers), names)


def period_matrix(F, N):
    """Matrix of series, entry (i, j) = P_i normalised at interior point u_j."""
    return [[period_series(F, uj, N, ui) for uj in F.interior] for ui in F.interior]


def truncate_series(P, k):
    if not 0 <= k <= P.order:
        raise ValueError(f"truncation degree {k} outside 0..{P.order}")
    acc = ParamPoly(P.names)
    for layer in P.layers[:k + 1]:
        acc = acc + layer
    return acc


@dataclass
class TruncationCheck:
    holds: bool
    witness: dict | None
    hw: list
    truncated: list

    def __bool__(self):
        return self.holds


def check_truncation_relation(F, p):
    """Compare the normalised Hasse-Witt matrix with truncated periods mod p.

    Column j is normalised by setting its own coefficient to 1.  On failure
    the witness names the entry and the first differing parameter monomial.
    """
    r = F.rank
    hw_rows = [[None] * r for _ in range(r)]
    tr_rows = [[None] * r for _ in range(r)]
    for jj, uj in enumerate(F.interior):
        f, names = _normalized(F, uj)
        Fj = F._like(dict(f.terms), lam=F.lam)
        A = hw_matrix_toric(Fj, p)
        for ii, ui in enumerate(F.interior):
            lhs = A[ii, jj]
            rhs = truncate_series(period_series(Fj, uj, p - 1, ui), p - 1) % p
            if not isinstance(lhs, ParamPoly):
                lhs = ParamPoly.constant(names, lhs)
            hw_rows[ii][jj], tr_rows[ii][jj] = lhs, rhs
            diff = (lhs - rhs) % p
            if not diff.is_zero():
                e, c = diff.sorted_terms()[0]
                witness = {"entry": [ii, jj], "monomial": dict(zip(names, e)),
                           "hw": lhs.coefficient(e), "truncated": rhs.coefficient(e)}
                return TruncationCheck(False, witness, hw_rows, tr_rows)
    return TruncationCheck(True, None, hw_rows, tr_rows)


def constant_term_of_product(polys):
    """Coefficient of the empty monomial in a product of Laurent ParamPolys.

    Multiplies all but the last factor, then looks up the cancelling
    exponents in the last one.
    """
    if not polys:
        return 1
    acc = polys[0]
    for q in polys[1:-1]:
        acc = acc * q
    if len(polys) == 1:
        return acc.constant_term()
    last = polys[-1].terms
    total = 0
    for e, c in acc.terms.items():
        c2 = last.get(tuple(-x for x in e))
        if c2 is not None:
            total += c * c2
    return total


def _sign(perm):
    inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    return -1 if inv % 2 else 1


def invertibility_certificate(F, p):
    """Parameter-free term of det B, B_ij = truncated P_i(a_I / a_j)."""
    r = F.rank
    names = F.names
    B = [[None] * r for _ in range(r)]
    for jj, uj in enumerate(F.interior):
        slot = names.index(param_name(uj))
        for ii, ui in enumerate(F.interior):
            t = truncate_series(period_series(F, uj, p - 1, ui), p - 1)
            terms = {}
            for e, c in t.terms.items():
                e = list(e)
                e[slot] = -sum(e)
                terms[tuple(e)] = c
            B[ii][jj] = ParamPoly(names, terms)
    total = 0
    for perm in itertools.permutations(range(r)):
        total += _sign(perm) * constant_term_of_product([B[i][perm[i]] for i in range(r)])
    return total


def _normalized_numeric(F, p, s):
    """Tail h of f / (a_0 t^{u_0}) with integer coefficients mod p^s."""
    M = p**s
    u0 = F.interior[0]
    c0 = F.coeffs.get(u0, 0) % M
    if c0 % p == 0:
        raise NonUnitVertexCoefficient("coefficient at the interior point is not a unit")
    inv = pow(c0, -1, M)
    h = {tuple(a - b for a, b in zip(u, u0)): c * inv % M
         for u, c in F.coeffs.items() if u != u0 and c % M}
    return LaurentPoly(F.dimension, h), u0


def _truncated_value(h, K, M):
    """sum_{k<=K} (-1)^k [t^0] h^k mod M."""
    if h.is_zero():
        return 1 % M
    col = power_coefficients_by_step(h, K, [(0,) * h.n], M)
    return sum((-1) ** k * c[0] for k, c in enumerate(col)) % M


def dwork_ratio(F, p, s):
    """Truncated-period ratio P_{(p^s-1)}(a) / P_{(p^(s-1)-1)}(sigma a) mod p^s."""
    if len(F.interior) != 1:
        raise ValueError("Dwork ratios are defined here for a unique interior point")
    M = p**s
    h, _ = _normalized_numeric(F, p, s)
    num = _truncated_value(h, p**s - 1, M)
    sig_h = h.map_coefficients(lambda c: pow(c, p, M))
    if sig_h == h:
        den_sum = power_coefficients_by_step(h, p ** (s - 1) - 1, [(0,) * h.n], M) if not h.is_zero() else [[1]]
        den = sum((-1) ** k * c[0] for k, c in enumerate(den_sum)) % M
    else:
        den = _truncated_value(sig_h, p ** (s - 1) - 1, M)
    if den % p == 0:
        raise NonOrdinary("truncated period vanishes mod p at the point")
    return IntMod(num * pow(den, -1, M), p, s)


def _pochhammer(x, r):
    acc = Fraction(1)
    for i in range(r):
        acc *= x + i
    return acc


def hypergeometric_dwork(n, order):
    """Coefficients prod_j (j/(n+1))_r / (r!)^n for r = 0..order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for r in range(order + 1):
        c = Fraction(1)
        for j in range(1, n + 1):
            c *= _pochhammer(Fraction(j, n + 1), r)
        out.append(c / factorial(r) ** n)
    return out


def dwork_family_specialization(F, order):
    """lambda-coefficients of the period of the anticanonical P^n family.

    The interior coefficient becomes -(n+1)t, the vertex coefficients 1 and
    the rest 0; the series in 1/t is re-read in lambda = t^-(n+1).  Returns
    the coefficients together with the largest layer that failed to vanish
    off multiples of n+1 (None when all do).
    """
    n = F.dimension
    N = (n + 1) * order
    P = period_series(F, None, N)
    vert = {param_name(v) for v in F.polytope.integral_vertices()}
    point = {name: (1 if name in vert else 0) for name in P.names}
    coeffs = []
    stray = None
    for k, layer in enumerate(P.layers):
        val = layer.evaluate(point)
        if k % (n + 1):
            if val != 0:
                stray = k
            continue
        coeffs.append(Fraction(val) * Fraction((-1) ** k, (n + 1) ** k))
    return coeffs, stray
