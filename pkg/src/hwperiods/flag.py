"""The Grassmannian G(2,4) on its Bott-Samelson torus chart.

Schubert-cell coordinates (a, b, c, d) pull back to t_1..t_4 by

    a = 1/(t1 t3),  b = -(t1 + t4)/(t1 t2 t3 t4),  c = 1/t1,  d = -1/(t1 t2),

and Pluecker coordinates are x12 = ad - bc, x13 = -c, x14 = a, x23 = -d,
x24 = b, x34 = 1.  A section written in (a, b, c, d) represents
f = sec (da db dc dd)^-1; its chart function is g = sec(psi(t)) / J with J
the Jacobian of the substitution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonLaurentResult
from .laurent import LaurentPoly, coefficient_of_power, divide_exact, power_coefficients_by_step
from .periods import PeriodSeries
from .rings import ParamPoly

__all__ = [
    "RationalFunction", "ChartSection", "PLUCKER", "chart_map", "jacobian",
    "substitute_raw", "g24_pullback", "hw_flag_g24", "alpha_flag_g24",
    "period_series_flag_g24", "section_family", "S0", "plucker_relation",
]

N_T = 4
U0 = (1, 1, 1, 1)


class RationalFunction:
    """num/den with Laurent numerator and denominator; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        den = LaurentPoly.constant(num.n, 1) if den is None else den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = num, den

    @classmethod
    def constant(cls, c):
        return cls(LaurentPoly.constant(N_T, c))

    def __add__(self, other):
        other = _as_rf(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __mul__(self, other):
        other = _as_rf(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __pow__(self, k):
        if k < 0:
            return RationalFunction(self.den, self.num) ** (-k)
        return RationalFunction(self.num**k, self.den**k)

    def __eq__(self, other):
        other = _as_rf(other)
        return self.num * other.den == other.num * self.den

    def __repr__(self):
        return f"RationalFunction({self.num.to_text()} / {self.den.to_text()})"

    def derivative(self, i):
        n2 = self.num.derivative(i) * self.den - self.num * self.den.derivative(i)
        return RationalFunction(n2, self.den * self.den)

    def to_laurent(self):
        return divide_exact(self.num, self.den)


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFunction(x)
    return RationalFunction.constant(x)


def _mono(*e, c=1):
    return LaurentPoly(N_T, {tuple(e): c})


def chart_map():
    """(a, b, c, d) as rational functions of t."""
    a = RationalFunction(_mono(-1, 0, -1, 0))
    b = RationalFunction(-(_mono(1, 0, 0, 0) + _mono(0, 0, 0, 1)), _mono(1, 1, 1, 1))
    c = RationalFunction(_mono(-1, 0, 0, 0))
    d = RationalFunction(_mono(-1, -1, 0, 0, c=-1))
    return a, b, c, d


def jacobian():
    """det d(a,b,c,d)/d(t1..t4) as an exact Laurent polynomial."""
    funcs = chart_map()
    M = [[f.derivative(i) for i in range(N_T)] for f in funcs]
    total = RationalFunction.constant(0)
    for perm in itertools.permutations(range(N_T)):
        inv = sum(1 for x, y in itertools.combinations(perm, 2) if x > y)
        term = RationalFunction.constant(-1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            term = term * M[i][j]
        total = total + term
    return total.to_laurent()


# section polynomials live in LaurentPoly(4) over variables (a, b, c, d)
def _var(i):
    return LaurentPoly.variable(4, i)


A, B, C, D = (_var(i) for i in range(4))
PLUCKER = {
    (1, 2): A * D - B * C,
    (1, 3): -C,
    (1, 4): A,
    (2, 3): -D,
    (2, 4): B,
    (3, 4): LaurentPoly.constant(4, 1),
}
S0 = PLUCKER[(1, 2)] * PLUCKER[(2, 3)] * PLUCKER[(3, 4)] * PLUCKER[(1, 4)]


@dataclass(frozen=True)
class ChartSection:
    """A (Laurent) polynomial in the chart coordinates (a, b, c, d)."""

    poly: LaurentPoly

    @classmethod
    def s0(cls):
        return cls(S0)

    @classmethod
    def from_plucker(cls, monomials):
        """Sum of c * prod x_ij^k given as [(c, {(i, j): k, ...}), ...]."""
        acc = LaurentPoly(4)
        for c, exps in monomials:
            term = LaurentPoly.constant(4, c)
            for pair, k in exps.items():
                term = term * PLUCKER[tuple(sorted(pair))] ** k
            acc = acc + term
        return cls(acc)

    @classmethod
    def from_terms(cls, terms):
        """[(exponents in (a,b,c,d), coefficient)]."""
        return cls(LaurentPoly(4, {tuple(e): c for e, c in terms}))


def plucker_relation():
    """x12 x34 - x13 x24 + x14 x23, which must vanish identically."""
    X = PLUCKER
    return X[(1, 2)] * X[(3, 4)] - X[(1, 3)] * X[(2, 4)] + X[(1, 4)] * X[(2, 3)]


def substitute_raw(sec):
    """sec(psi(t)) as a rational function, with no volume factor."""
    poly = sec.poly if isinstance(sec, ChartSection) else sec
    coords = chart_map()
    total = RationalFunction.constant(0)
    # group by a common denominator so additions stay cheap
    for e, c in poly.sorted_terms():
        term = RationalFunction.constant(c)
        for f, k in zip(coords, e):
            if k:
                term = term * f**k
        total = total + term
    return total


def g24_pullback(sec):
    """Chart function g with psi^*(sec (da db dc dd)^-1) = g (dt1..dt4)^-1."""
    poly = sec.poly if isinstance(sec, ChartSection) else sec
    if poly.is_zero():
        return LaurentPoly(N_T)
    J = jacobian()
    rf = substitute_raw(poly)
    try:
        num = rf.to_laurent()
    except NonLaurentResult:
        raise NonLaurentResult("pullback of the section is not a Laurent polynomial on the chart")
    return divide_exact(num, J)


def _mod_coefficient(c, modulus):
    if isinstance(c, ParamPoly):
        return c.map_coefficients(lambda x: _mod_coefficient(x, modulus))
    if isinstance(c, Fraction):
        return c.numerator * pow(c.denominator, -1, modulus) % modulus
    return c % modulus


def alpha_flag_g24(g, p, s=1, modulus=None):
    """Coefficient of (t1 t2 t3 t4)^(p^s-1) in g^(p^s-1), mod p^s by default."""
    modulus = p**s if modulus is None else modulus
    gm = g.map_coefficients(lambda c: _mod_coefficient(c, modulus))
    e = p**s - 1
    return coefficient_of_power(gm, e, [(e,) * N_T], modulus)[0]


def hw_flag_g24(sec, p):
    """Hasse-Witt value of an integral section on the G(2,4) chart, mod p."""
    g = g24_pullback(sec) if isinstance(sec, ChartSection) else sec
    return alpha_flag_g24(g, p, 1, p)


def section_family(sections, names=None):
    """Chart function of s0 + sum a_m sec_m with symbolic a_m; returns (g, names)."""
    names = tuple(names or [f"a{m + 1}" for m in range(len(sections))])
    g = g24_pullback(ChartSection.s0()).map_coefficients(lambda c: ParamPoly.constant(names, c))
    for name, sec in zip(names, sections):
        gm = g24_pullback(sec)
        sym = ParamPoly.symbol(names, name)
        g = g + gm.map_coefficients(lambda c: sym * c)
    return g, names


def period_series_flag_g24(sections, N, names=None):
    """Period of 1/g for g = pullback of s0 + sum a_m sec_m, expanded at t1t2t3t4."""
    g, names = section_family(sections, names)
    # g = t^u0 (1 + h), h of positive degree in the a_m
    h = g.shift(tuple(-x for x in U0)) - ParamPoly.constant(names, 1)
    if h.is_zero():
        layers = [ParamPoly.constant(names, 1)] + [ParamPoly(names)] * N
    else:
        raw = power_coefficients_by_step(h, N, [(0,) * N_T])
        layers = [c[0] if k % 2 == 0 else -c[0] for k, c in enumerate(raw)]
    return PeriodSeries(U0, U0, N, tuple(layers), names)
