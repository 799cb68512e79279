"""Hasse-Witt matrices, the higher matrices alpha_s and their congruences.

Rows of every matrix are indexed by interior points u_i and columns by u_j
(both in lexicographic order); entry (i, j) of alpha_s is the coefficient of
t^(p^s u_j - u_i) in f^(p^s - 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded, MalformedInput, NonUnitDeterminant
from .lattice import LatticePolytope, ToricData, polytope_from_toric
from .laurent import LaurentPoly, coefficient_of_power, multiply
from .rings import IntMod, Matrix, PadicMatrix, ParamPoly, valuation

__all__ = [
    "HypersurfaceFamily", "CongruenceReport", "FrobeniusLadder", "ConnectionMatrix",
    "param_name", "alpha_matrix", "alpha_with_derivative", "hw_matrix_toric",
    "cartier_tau", "hw_scalar_cy", "hw_complete_intersection",
    "verify_congruences", "frobenius_unit_root_matrix", "connection_matrix_1param",
]


def param_name(u):
    """Name of the universal coefficient attached to lattice point ``u``."""
    return "a" + "_".join(str(x) for x in u)


class HypersurfaceFamily:
    """A section f = sum c_u t^u supported on the lattice points of a polytope.

    Coefficients are integers (a numeric point), or ParamPoly values: either
    in the universal symbols a_u, or in a single parameter ``lam`` for a
    one-parameter family.
    """

    def __init__(self, polytope, coeffs, toric=None, interior=None, lam=None):
        self.polytope = polytope
        self.toric = toric
        self.points = list(polytope.lattice_points)
        self.interior = list(interior) if interior is not None else list(polytope.interior_points)
        pts = set(self.points)
        clean = {}
        for u, c in coeffs.items():
            u = tuple(u)
            if u not in pts:
                raise MalformedInput(f"exponent {list(u)} lies outside the polytope")
            if isinstance(c, IntMod):
                c = c.value
            clean[u] = c
        self.coeffs = clean
        self.lam = lam
        self.f = LaurentPoly(polytope.dimension, clean)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_toric(cls, toric, coeffs, **kw):
        return cls(polytope_from_toric(toric), coeffs, toric=toric, **kw)

    @classmethod
    def universal(cls, polytope, toric=None, fixed=None):
        """Every lattice point gets its own symbol, except those in ``fixed``."""
        fixed = dict(fixed or {})
        free = [u for u in polytope.lattice_points if u not in fixed]
        names = tuple(param_name(u) for u in free)
        coeffs = {u: ParamPoly.constant(names, c) for u, c in fixed.items()}
        for u in free:
            coeffs[u] = ParamPoly.symbol(names, param_name(u))
        return cls(polytope, coeffs, toric=toric)

    @classmethod
    def one_parameter(cls, polytope, polys, lam="lam", toric=None):
        """``polys`` maps u -> list of lambda-coefficients [c0, c1, ...]."""
        names = (lam,)
        coeffs = {u: ParamPoly(names, {(k,): c for k, c in enumerate(cs)}) for u, cs in polys.items()}
        return cls(polytope, coeffs, toric=toric, lam=lam)

    def _like(self, coeffs, lam=None):
        return HypersurfaceFamily(self.polytope, coeffs, toric=self.toric,
                                  interior=self.interior, lam=lam)

    # -- structure --------------------------------------------------------
    @property
    def dimension(self):
        return self.polytope.dimension

    @property
    def rank(self):
        return len(self.interior)

    @property
    def is_symbolic(self):
        return any(isinstance(c, ParamPoly) for c in self.coeffs.values())

    @property
    def is_one_parameter(self):
        return self.lam is not None

    @property
    def names(self):
        for c in self.coeffs.values():
            if isinstance(c, ParamPoly):
                return c.names
        return ()

    def at(self, lam_value, modulus=None):
        """Numeric family at lambda = lam_value."""
        if not self.is_one_parameter:
            raise ValueError("not a one-parameter family")
        out = {}
        for u, c in self.coeffs.items():
            v = c.evaluate({self.lam: lam_value}) if isinstance(c, ParamPoly) else c
            out[u] = v % modulus if modulus else v
        return self._like(out)

    def derivative(self):
        """Coefficient-wise d/dlambda, as a one-parameter family."""
        if not self.is_one_parameter:
            raise ValueError("not a one-parameter family")
        out = {u: c.derivative(self.lam) for u, c in self.coeffs.items() if isinstance(c, ParamPoly)}
        return self._like(out, lam=self.lam)

    def substitute(self, values):
        """Specialise universal symbols (dict name -> value)."""
        out = {}
        for u, c in self.coeffs.items():
            out[u] = c.subs(values) if isinstance(c, ParamPoly) else c
        return self._like(out, lam=self.lam)

    def frobenius_twist(self, p, modulus=None, times=1):
        """sigma^times: numeric c -> c^(p^times); symbols a -> a^(p^times)."""
        q = p**times
        out = {}
        for u, c in self.coeffs.items():
            if isinstance(c, ParamPoly):
                out[u] = c.frobenius(q)
            elif modulus is not None:
                out[u] = pow(c, q, modulus)
            else:
                out[u] = c**q
        return self._like(out, lam=self.lam)

    def targets(self, p, s):
        q = p**s
        return [tuple(q * a - b for a, b in zip(uj, ui)) for ui in self.interior for uj in self.interior]


# ---------------------------------------------------------------------------
# alpha matrices


def _assemble(F, values, modulus, p, s):
    r = F.rank
    rows = [values[i * r:(i + 1) * r] for i in range(r)]
    if any(isinstance(v, ParamPoly) for v in values):
        return Matrix(rows, modulus)
    return PadicMatrix(rows, p, s)


def alpha_matrix(F, p, s, m=None, budget_terms=None):
    """alpha_s of F with coefficients reduced mod p^m (default m = s)."""
    if s < 0:
        raise ValueError("level s must be >= 0")
    m = s if m is None else m
    if m < 1:
        raise ValueError("precision m must be >= 1")
    if s == 0:
        return PadicMatrix.identity(F.rank, p, m)
    modulus = p**m
    values = coefficient_of_power(F.f, p**s - 1, F.targets(p, s), modulus, budget_terms)
    return _assemble(F, values, modulus, p, m)


def alpha_with_derivative(F, p, s, m, point):
    """(alpha_s, d alpha_s / d lambda) of a one-parameter family at lambda = point.

    Both come out of one pruned run of f^(e-1), e = p^s - 1:
    [t^T] f^e = sum_u f_u [t^(T-u)] f^(e-1) and
    [t^T] D(f^e) = e sum_u f'_u [t^(T-u)] f^(e-1).
    """
    modulus = p**m
    r = F.rank
    if s == 0:
        return PadicMatrix.identity(r, p, m), PadicMatrix([[0] * r for _ in range(r)], p, m)
    e = p**s - 1
    Fp = F.at(point, modulus)
    Dp = F.derivative().at(point, modulus)
    f_num = {u: c % modulus for u, c in Fp.coeffs.items() if c % modulus}
    d_num = {u: c % modulus for u, c in Dp.coeffs.items() if c % modulus}
    support = sorted(set(f_num) | set(d_num))
    base = F.targets(p, s)
    shifted = sorted({tuple(a - b for a, b in zip(T, u)) for T in base for u in support})
    if not f_num:
        vals = {t: int(e == 1 and not any(t)) for t in shifted}
    else:
        fl = LaurentPoly(F.dimension, f_num)
        vals = dict(zip(shifted, coefficient_of_power(fl, e - 1, shifted, modulus)))
    A, D = [], []
    for T in base:
        a = d = 0
        for u in support:
            c = vals[tuple(x - y for x, y in zip(T, u))]
            if c:
                a += f_num.get(u, 0) * c
                d += d_num.get(u, 0) * c
        A.append(a % modulus)
        D.append(e * d % modulus)
    return _assemble(F, A, modulus, p, m), _assemble(F, D, modulus, p, m)


def hw_matrix_toric(F, p):
    """The Hasse-Witt matrix mod p in the basis of interior points."""
    return alpha_matrix(F, p, 1, 1)


def cartier_tau(g, p):
    """Keep exponents congruent to (p-1,...,p-1) mod p and divide them by p."""
    out = {}
    for e, c in g.terms.items():
        shifted = [x - (p - 1) for x in e]
        if all(x % p == 0 for x in shifted):
            out[tuple(x // p for x in shifted)] = c
    return LaurentPoly(g.n, out)


def hw_scalar_cy(g, p, modulus=None):
    """Coefficient of (t_1...t_n)^(p-1) in g^(p-1)."""
    target = (p - 1,) * g.n
    return coefficient_of_power(g, p - 1, [target], modulus)[0]


def hw_complete_intersection(fs, basis_pts, p, modulus=None):
    """Hasse-Witt matrix of a complete intersection from its factor sections.

    The product section replaces f; ``basis_pts`` index rows and columns.
    """
    if not fs:
        raise ValueError("need at least one factor")
    prod_f = fs[0]
    for g in fs[1:]:
        prod_f = multiply(prod_f, g)
    modulus = p if modulus is None else modulus
    targets = [tuple(p * a - b for a, b in zip(uj, ui)) for ui in basis_pts for uj in basis_pts]
    values = coefficient_of_power(prod_f, p - 1, targets, modulus)
    r = len(basis_pts)
    rows = [values[i * r:(i + 1) * r] for i in range(r)]
    if any(isinstance(v, ParamPoly) for v in values):
        return Matrix(rows, modulus)
    return PadicMatrix(rows, p, valuation(modulus, p))


# ---------------------------------------------------------------------------
# congruences


@dataclass
class CongruenceReport:
    p: int
    s_max: int
    precision: int
    part1: dict = field(default_factory=dict)
    part2: dict = field(default_factory=dict)
    part3: dict = field(default_factory=dict)
    exponents: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def all_hold(self):
        vals = list(self.part1.values()) + list(self.part2.values()) + list(self.part3.values())
        return all(v is not False for v in vals)

    def to_dict(self):
        def keyed(d):
            return {str(k): v for k, v in sorted(d.items(), key=lambda kv: str(kv[0]))}
        return {
            "p": self.p, "s_max": self.s_max, "precision": self.precision,
            "part1": keyed(self.part1), "part2": keyed(self.part2), "part3": keyed(self.part3),
            "exponents": keyed(self.exponents), "notes": list(self.notes), "all_hold": self.all_hold,
        }


def _agreement(A, B):
    """Largest k <= precision with A = B mod p^k."""
    return (A - B).min_valuation()


def _point_family(F, point, modulus):
    return F.at(point, modulus) if F.is_one_parameter else F


def verify_congruences(F, p, s_max, m=None, point=None, twists=(0, 1)):
    """Check the three congruences satisfied by alpha_1..alpha_{s_max}.

    ``F`` is numeric, or one-parameter together with ``point`` (a value of
    lambda).  sigma acts on numeric coefficients by c -> c^p and on lambda by
    lambda -> lambda^p; the derivative part runs only for one-parameter
    families.
    """
    if F.is_one_parameter and point is None:
        raise ValueError("one-parameter family needs an evaluation point")
    if not F.is_one_parameter and F.is_symbolic:
        raise ValueError("verify_congruences expects a numeric or one-parameter family")
    prec = s_max if m is None else max(m, s_max)
    M = p**prec
    report = CongruenceReport(p, s_max, prec)
    base = _point_family(F, point, M)

    def sigma(k):
        # family at the sigma^k-twisted point
        if F.is_one_parameter:
            return F.at(pow(point, p**k, M), M)
        return base.frobenius_twist(p, M, times=k)

    alpha = {0: PadicMatrix.identity(F.rank, p, prec)}
    for s in range(1, s_max + 1):
        alpha[s] = alpha_matrix(base, p, s, prec)
    twisted_alpha1 = {0: alpha[1].reduce(1)}
    for k in range(1, s_max):
        twisted_alpha1[k] = alpha_matrix(sigma(k), p, 1, 1)

    # (1) alpha_s = alpha_1 sigma(alpha_1) ... sigma^(s-1)(alpha_1) mod p
    for s in range(1, s_max + 1):
        prod_m = PadicMatrix.identity(F.rank, p, 1)
        for k in range(s):
            prod_m = prod_m * twisted_alpha1[k]
        report.part1[s] = alpha[s].reduce(1) == prod_m

    invertible = alpha[1].reduce(1).det().is_unit()
    if not invertible:
        report.notes.append("alpha_1 is not invertible mod p; parts 2 and 3 not applicable")
        for s in range(1, s_max):
            report.part2[s] = None
        return report

    # (2) alpha_{s+1} sigma(alpha_s)^-1 = alpha_s sigma(alpha_{s-1})^-1 mod p^s
    if s_max >= 2:
        sig = sigma(1)
        sig_alpha = {0: PadicMatrix.identity(F.rank, p, prec)}
        for s in range(1, s_max):
            sig_alpha[s] = alpha_matrix(sig, p, s, prec)
        for s in range(1, s_max):
            lhs = (alpha[s + 1] * sig_alpha[s].inverse()).reduce(s)
            rhs = (alpha[s] * sig_alpha[s - 1].inverse()).reduce(s)
            report.part2[s] = lhs == rhs
            report.exponents[f"part2_s{s}"] = _agreement(
                alpha[s + 1] * sig_alpha[s].inverse(), alpha[s] * sig_alpha[s - 1].inverse())

    # (3) D(sigma^m alpha_{s+1}) sigma^m(alpha_{s+1})^-1 congruent to the same at s, mod p^(s+m)
    if F.is_one_parameter and s_max >= 2:
        for tw in twists:
            P = s_max - 1 + tw
            Mt = p**P
            mu = pow(point, p**tw, Mt)
            scale = p**tw * pow(point, p**tw - 1, Mt) % Mt
            conn = {}
            for s in range(1, s_max + 1):
                A, DA = alpha_with_derivative(F, p, s, P, mu)
                conn[s] = DA * scale * A.inverse()
            for s in range(1, s_max):
                tgt = s + tw
                report.part3[(s, tw)] = conn[s + 1].reduce(tgt) == conn[s].reduce(tgt)
                report.exponents[f"part3_s{s}_m{tw}"] = _agreement(conn[s + 1], conn[s])
    return report


# ---------------------------------------------------------------------------
# Frobenius ladder and connection matrices


@dataclass
class FrobeniusLadder:
    matrix: PadicMatrix
    precision: int
    agreements: list
    levels: int

    def __iter__(self):
        yield self.matrix
        yield self.precision


def frobenius_unit_root_matrix(F, p, s, max_level=None, budget_terms=None, point=None):
    """Ladder R_k = alpha_{k+1} sigma(alpha_k)^-1 until R_k = R_{k-1} mod p^s.

    The precision returned is the observed agreement exponent of the last
    two rungs, never an assumed one.  ``max_level`` caps k (default s).
    """
    max_level = s if max_level is None else max_level
    fam = _point_family(F, point, p**s) if F.is_one_parameter else F
    sig = fam.frobenius_twist(p, p**s)
    if not alpha_matrix(fam, p, 1, 1).det().is_unit():
        raise NonUnitDeterminant("alpha_1 is not invertible mod p")
    rungs = []
    agreements = []
    prev_alpha = alpha_matrix(fam, p, 1, s, budget_terms)
    rungs.append(prev_alpha)    # R_0 = alpha_1 sigma(alpha_0)^-1 = alpha_1
    k = 0
    while True:
        if k >= max_level:
            partial = FrobeniusLadder(rungs[-1], agreements[-1] if agreements else 0, agreements, k)
            raise BudgetExceeded(f"no agreement mod {p}^{s} by level {k}", partial=partial)
        k += 1
        try:
            nxt = alpha_matrix(fam, p, k + 1, s, budget_terms)
        except BudgetExceeded as exc:
            exc.partial = FrobeniusLadder(rungs[-1], agreements[-1] if agreements else 0, agreements, k - 1)
            raise
        sig_k = alpha_matrix(sig, p, k, s, budget_terms)
        R = nxt * sig_k.inverse()
        agreements.append(_agreement(R, rungs[-1]))
        rungs.append(R)
        if agreements[-1] >= s:
            return FrobeniusLadder(R, agreements[-1], agreements, k)


@dataclass
class ConnectionMatrix:
    """D(alpha_s) adj(alpha_s) / det(alpha_s) over Z/p^m[lambda], optionally at a point."""

    level: int
    numerator: Matrix
    denominator: ParamPoly
    value: PadicMatrix | None = None
    agreement: int | None = None


def _adjugate(M):
    n = M.shape[0]
    if n == 1:
        one = M[0, 0] * 0 + 1
        return Matrix([[one]], M.modulus)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = Matrix([[M[a, b] for b in range(n) if b != i] for a in range(n) if a != j], M.modulus)
            row.append(minor.det() * (-1) ** (i + j))
        rows.append(row)
    return Matrix(rows, M.modulus)


def connection_matrix_1param(F, p, s, m=None, point=None):
    """Connection matrix D(alpha_s) alpha_s^-1 of a one-parameter family, D = d/dlambda."""
    if not F.is_one_parameter:
        raise ValueError("connection matrices need a one-parameter family")
    m = s if m is None else m
    modulus = p**m
    A = alpha_matrix(F, p, s, m)
    if not isinstance(A, Matrix) or isinstance(A, PadicMatrix):
        A = Matrix([[ParamPoly.constant((F.lam,), x) for x in r] for r in A.rows], modulus)
    DA = A.map(lambda x: x.derivative(F.lam) % modulus if isinstance(x, ParamPoly) else 0)
    num = DA * _adjugate(A)
    den = A.det()
    result = ConnectionMatrix(s, num, den)
    if point is not None:
        d = den.evaluate({F.lam: point}, modulus) if isinstance(den, ParamPoly) else den % modulus
        if d % p == 0:
            raise NonUnitDeterminant(f"det alpha_{s} vanishes mod {p} at lambda={point}")
        Av, Dv = alpha_with_derivative(F, p, s, m, point)
        result.value = Dv * Av.inverse()
        if s > 1:
            Ap, Dp = alpha_with_derivative(F, p, s - 1, m, point)
            result.agreement = _agreement(result.value, Dp * Ap.inverse())
    return result
