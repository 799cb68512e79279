"""Exact coefficient rings, matrices over them, and p-adic helpers.

Elements are plain Python objects: ``int`` for the integers, ``Fraction``
for the rationals, :class:`IntMod` for residues modulo ``p**s`` and
:class:`ParamPoly` for (Laurent) polynomials in named parameters.  The ring
descriptors (:data:`ZZ`, :data:`QQ`, :class:`Zmod`, :class:`PolyRing`)
supply zero/one, coercion, inverses and a canonical text form for each.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from math import factorial, prod

from .errors import NonUnitDeterminant, PrecisionMismatch

__all__ = [
    "IntMod", "ParamPoly", "Matrix", "PadicMatrix", "FrobeniusEndo",
    "ZZ", "QQ", "Zmod", "PolyRing",
    "valuation", "teichmuller_lift", "multinomial", "matrix_inverse",
    "apply_frobenius", "format_number",
]


def valuation(n, p, cap=None):
    """p-adic valuation of a non-zero integer or rational.

    ``valuation(0, p)`` returns ``cap``; without a cap it raises ``ValueError``.
    """
    if isinstance(n, IntMod):
        cap = n.s if cap is None else min(cap, n.s)
        n = n.value
    if n == 0:
        if cap is None:
            raise ValueError("valuation of zero")
        return cap
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v if cap is None else min(v, cap)


class IntMod:
    """Residue class modulo ``p**s``, stored as the least non-negative residue."""

    __slots__ = ("value", "p", "s", "modulus")

    def __init__(self, value, p, s):
        if s < 1:
            raise ValueError("precision s must be >= 1")
        m = p**s
        if isinstance(value, Fraction):
            value = value.numerator * pow(value.denominator, -1, m)
        self.value = int(value) % m
        self.p = p
        self.s = s
        self.modulus = m

    def _coerce(self, other):
        if isinstance(other, IntMod):
            if other.p != self.p or other.s != self.s:
                raise PrecisionMismatch(
                    f"mod {self.p}^{self.s} combined with mod {other.p}^{other.s}")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.modulus)
        return NotImplemented

    def _new(self, v):
        return IntMod(v, self.p, self.s)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return self._new(pow(self.value, e, self.modulus))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self._new(o).inverse()

    def __mod__(self, m):
        return self if m == self.modulus else IntMod(self.value % m, self.p, self.s)

    def __eq__(self, other):
        if isinstance(other, IntMod):
            return (self.p, self.s, self.value) == (other.p, other.s, other.value)
        if isinstance(other, (int, Fraction)):
            return self.value == IntMod(other, self.p, self.s).value
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p, self.s))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"IntMod({self.value}, p={self.p}, s={self.s})"

    def __str__(self):
        return str(self.value)

    def is_unit(self):
        return self.value % self.p != 0

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.value} is not a unit mod {self.p}^{self.s}")
        return self._new(pow(self.value, -1, self.modulus))

    def reduce(self, s):
        """The image in Z/p^s for s <= self.s."""
        return IntMod(self.value, self.p, s)


def format_number(c):
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def _parse_number(text):
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return int(text)


class ParamPoly:
    """Polynomial in named parameters with exact coefficients.

    Exponent vectors have one slot per name and may be negative (Laurent
    monomials are needed for normalised period matrices).  Zero
    coefficients are never stored.
    """

    __slots__ = ("names", "terms", "_hash")

    def __init__(self, names, terms=None):
        self.names = tuple(names)
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def symbol(cls, names, name, power=1):
        names = tuple(names)
        e = [0] * len(names)
        e[names.index(name)] = power
        return cls(names, {tuple(e): 1})

    @classmethod
    def constant(cls, names, c):
        return cls(names, {(0,) * len(tuple(names)): c})

    def _lift(self, other):
        if isinstance(other, ParamPoly):
            if other.names != self.names:
                raise ValueError(f"parameter names differ: {self.names} vs {other.names}")
            return other
        if isinstance(other, (int, Fraction, IntMod)):
            return ParamPoly.constant(self.names, other)
        return None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return ParamPoly(self.names, t)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.names, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return ParamPoly(self.names, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            (e, c), = self.terms.items()
            inv = Fraction(1, c) if isinstance(c, int) else c ** -1
            return ParamPoly(self.names, {tuple(-x for x in e): inv}) ** (-k)
        result = ParamPoly.constant(self.names, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __mod__(self, m):
        return ParamPoly(self.names, {e: c % m for e, c in self.terms.items()})

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.names, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"ParamPoly({self.to_text()!r})"

    __str__ = lambda self: self.to_text()

    # -- structure --------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def is_monomial(self):
        return len(self.terms) == 1

    def constant_term(self):
        return self.terms.get((0,) * len(self.names), 0)

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), 0)

    def degree(self):
        """Largest total degree of a stored term (-1 for zero)."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, k=None):
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (k is None or degs == {k})

    def homogeneous_part(self, k):
        return ParamPoly(self.names, {e: c for e, c in self.terms.items() if sum(e) == k})

    def truncate(self, k):
        """Terms of total degree <= k."""
        return ParamPoly(self.names, {e: c for e, c in self.terms.items() if sum(e) <= k})

    def map_coefficients(self, fn):
        return ParamPoly(self.names, {e: fn(c) for e, c in self.terms.items()})

    def frobenius(self, p):
        """Replace every parameter by its p-th power; coefficients are fixed."""
        return ParamPoly(self.names, {tuple(p * x for x in e): c for e, c in self.terms.items()})

    def derivative(self, name):
        i = self.names.index(name)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                t[e2] = t.get(e2, 0) + e[i] * c
        return ParamPoly(self.names, t)

    def subs(self, values):
        """Substitute some parameters; the result keeps the full name tuple."""
        idx = [(self.names.index(n), v) for n, v in values.items()]
        out = ParamPoly(self.names)
        for e, c in self.terms.items():
            e = list(e)
            term = c
            for i, v in idx:
                k = e[i]
                e[i] = 0
                if k:
                    term = term * (v**k if k > 0 else _inverse_of(v) ** (-k))
            mono = ParamPoly(self.names, {tuple(e): 1})
            out = out + mono * term
        return out

    def evaluate(self, values, modulus=None):
        """Value at a point given for every parameter (dict name -> value)."""
        vals = [values[n] for n in self.names]
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(vals, e):
                if k > 0:
                    term = term * (pow(v, k, modulus) if modulus and isinstance(v, int) else v**k)
                elif k < 0:
                    inv = pow(v, -1, modulus) if modulus and isinstance(v, int) else _inverse_of(v)
                    term = term * inv ** (-k)
            total = total + term
            if modulus and isinstance(total, int):
                total %= modulus
        return total

    def sorted_terms(self):
        return sorted(self.terms.items())

    # -- text -------------------------------------------------------------
    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(self.names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            mono = "*".join(factors)
            neg = _is_negative(c)
            mag = format_number(-c if neg else c)
            if not mono:
                body = mag
            elif mag == "1":
                body = mono
            else:
                body = f"{mag}*{mono}"
            if parts:
                parts.append(("-" if neg else "+") + body)
            else:
                parts.append(("-" if neg else "") + body)
        return "".join(parts)

    @classmethod
    def from_text(cls, names, text):
        names = tuple(names)
        text = text.replace(" ", "")
        if text == "0":
            return cls(names)
        by_len = sorted(names, key=len, reverse=True)
        pos = 0
        terms = {}
        num = re.compile(r"\d+(?:/\d+)?")
        expo = re.compile(r"\^(-?\d+)")
        while pos < len(text):
            sign = 1
            if text[pos] in "+-":
                sign = -1 if text[pos] == "-" else 1
                pos += 1
            coeff = 1
            m = num.match(text, pos)
            if m and not any(text.startswith(n, pos) for n in by_len):
                coeff = _parse_number(m.group())
                pos = m.end()
                if pos < len(text) and text[pos] == "*":
                    pos += 1
                else:
                    e = (0,) * len(names)
                    terms[e] = terms.get(e, 0) + sign * coeff
                    continue
            e = [0] * len(names)
            while True:
                name = next((n for n in by_len if text.startswith(n, pos)), None)
                if name is None:
                    raise ValueError(f"cannot parse {text[pos:]!r}")
                pos += len(name)
                k = 1
                m = expo.match(text, pos)
                if m:
                    k = int(m.group(1))
                    pos = m.end()
                e[names.index(name)] += k
                if pos < len(text) and text[pos] == "*":
                    pos += 1
                    continue
                break
            terms[tuple(e)] = terms.get(tuple(e), 0) + sign * coeff
        return cls(names, terms)


def _is_negative(c):
    return isinstance(c, (int, Fraction)) and c < 0


def _inverse_of(v):
    if isinstance(v, int):
        return Fraction(1, v)
    if isinstance(v, ParamPoly):
        return v ** -1
    return v**-1


# ---------------------------------------------------------------------------
# ring descriptors


class IntegerRing:
    name = "ZZ"
    zero, one = 0, 1

    def __call__(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def is_unit(self, x):
        return x in (1, -1)

    def inverse(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit in ZZ")
        return x

    def to_text(self, x):
        return str(x)

    def from_text(self, text):
        return int(text)


class RationalField:
    name = "QQ"
    zero, one = Fraction(0), Fraction(1)

    def __call__(self, x):
        return Fraction(x)

    def is_unit(self, x):
        return x != 0

    def inverse(self, x):
        return 1 / Fraction(x)

    def to_text(self, x):
        return format_number(Fraction(x))

    def from_text(self, text):
        return Fraction(text)


class Zmod:
    """The ring Z/p^s."""

    def __init__(self, p, s):
        self.p, self.s = p, s
        self.modulus = p**s
        self.name = f"Z/{p}^{s}"
        self.zero = IntMod(0, p, s)
        self.one = IntMod(1, p, s)

    def __call__(self, x):
        if isinstance(x, IntMod):
            if x.p != self.p or x.s < self.s:
                raise PrecisionMismatch(f"cannot view {x!r} in {self.name}")
            return IntMod(x.value, self.p, self.s)
        return IntMod(x, self.p, self.s)

    def __eq__(self, other):
        return isinstance(other, Zmod) and (self.p, self.s) == (other.p, other.s)

    def __hash__(self):
        return hash((self.p, self.s))

    def is_unit(self, x):
        return self(x).is_unit()

    def inverse(self, x):
        return self(x).inverse()

    def to_text(self, x):
        return str(self(x).value)

    def from_text(self, text):
        return IntMod(int(text), self.p, self.s)


class PolyRing:
    """Polynomials in ``names`` over a base ring descriptor."""

    def __init__(self, base, names):
        self.base = base
        self.names = tuple(names)
        self.name = f"{base.name}[{','.join(self.names)}]"
        self.zero = ParamPoly(self.names)
        self.one = ParamPoly.constant(self.names, base.one)

    def __call__(self, x):
        if isinstance(x, ParamPoly):
            return x.map_coefficients(self.base)
        return ParamPoly.constant(self.names, self.base(x))

    def gen(self, name):
        return ParamPoly.symbol(self.names, name).map_coefficients(self.base)

    def gens(self):
        return [self.gen(n) for n in self.names]

    def is_unit(self, x):
        x = self(x)
        return x.is_constant() and self.base.is_unit(x.constant_term())

    def inverse(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit")
        return self(self.base.inverse(self(x).constant_term()))

    def to_text(self, x):
        return self(x).to_text()

    def from_text(self, text):
        return self(ParamPoly.from_text(self.names, text))


ZZ = IntegerRing()
QQ = RationalField()


# ---------------------------------------------------------------------------
# p-adic helpers


def teichmuller_lift(a, p, s):
    """The Teichmuller representative of ``a mod p`` in Z/p^s.

    Iterates x -> x^p; the iterate is fixed after at most ``s`` steps.
    """
    if not 0 <= a < p:
        raise ValueError(f"residue {a} out of range for p={p}")
    m = p**s
    x = a
    for _ in range(s + 1):
        y = pow(x, p, m)
        if y == x:
            break
        x = y
    return IntMod(x, p, s)


def multinomial(k, parts):
    """k! / (k_1! ... k_l! (k - sum)!)."""
    if any(q < 0 for q in parts):
        raise ValueError("negative part")
    rest = k - sum(parts)
    if rest < 0:
        raise ValueError("parts exceed k")
    return factorial(k) // (prod(factorial(q) for q in parts) * factorial(rest))


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense matrix with entries in any exact ring.

    ``modulus`` (optional) is reduced into the entries after every product;
    it is how symbolic matrices over Z/p^m are represented.
    """

    __slots__ = ("rows", "modulus")

    def __init__(self, rows, modulus=None):
        rows = tuple(tuple(r) for r in rows)
        if modulus is not None:
            rows = tuple(tuple(_reduce(x, modulus) for x in r) for r in rows)
        self.rows = rows
        self.modulus = modulus

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"{type(self).__name__}({[[str(x) for x in r] for r in self.rows]})"

    def _like(self, rows):
        return Matrix(rows, self.modulus)

    def __add__(self, other):
        return self._like([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self._like([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return self._like([[x * other for x in r] for r in self.rows])
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = 0
                for a, b in zip(r, c):
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return self._like(out)

    def map(self, fn):
        return self._like([[fn(x) for x in r] for r in self.rows])

    def transpose(self):
        return self._like(list(zip(*self.rows)))

    def trace(self):
        acc = 0
        for i in range(len(self.rows)):
            acc = acc + self.rows[i][i]
        return _reduce(acc, self.modulus)

    def det(self):
        """Leibniz determinant; intended for the small symbolic matrices here."""
        n = len(self.rows)
        total = 0
        for perm in itertools.permutations(range(n)):
            term = _perm_sign(perm)
            for i, j in enumerate(perm):
                term = term * self.rows[i][j]
            total = total + term
        return _reduce(total, self.modulus)

    def tolist(self):
        return [list(r) for r in self.rows]


def _reduce(x, modulus):
    if modulus is None or isinstance(x, IntMod):
        return x
    return x % modulus


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


class PadicMatrix(Matrix):
    """Square matrix over Z/p^s with entries kept as least residues."""

    __slots__ = ("p", "s")

    def __init__(self, rows, p, s):
        self.p, self.s = p, s
        m = p**s
        super().__init__([[int(x) % m for x in r] for r in rows])
        self.modulus = m
        if self.rows and any(len(r) != len(self.rows) for r in self.rows):
            raise ValueError("PadicMatrix must be square")

    @classmethod
    def identity(cls, r, p, s):
        return cls([[int(i == j) for j in range(r)] for i in range(r)], p, s)

    def _like(self, rows):
        return PadicMatrix(rows, self.p, self.s)

    def _check(self, other):
        if isinstance(other, PadicMatrix) and (other.p, other.s) != (self.p, self.s):
            raise PrecisionMismatch(f"mod {self.p}^{self.s} vs mod {other.p}^{other.s}")

    def __add__(self, other):
        self._check(other)
        return super().__add__(other)

    def __sub__(self, other):
        self._check(other)
        return super().__sub__(other)

    def __mul__(self, other):
        self._check(other)
        if isinstance(other, IntMod):
            other = other.value
        return super().__mul__(other)

    def __eq__(self, other):
        if isinstance(other, PadicMatrix):
            return (self.p, self.s, self.rows) == (other.p, other.s, other.rows)
        return NotImplemented

    __hash__ = Matrix.__hash__

    def __repr__(self):
        return f"PadicMatrix({[list(r) for r in self.rows]}, p={self.p}, s={self.s})"

    @property
    def dim(self):
        return len(self.rows)

    def entry(self, i, j):
        return IntMod(self.rows[i][j], self.p, self.s)

    def reduce(self, s):
        return PadicMatrix(self.rows, self.p, s)

    def det(self):
        m = self.modulus
        rows = [list(r) for r in self.rows]
        n = len(rows)
        det = 1
        for c in range(n):
            piv = next((r for r in range(c, n) if rows[r][c] % self.p), None)
            if piv is None:
                # no unit pivot: det is divisible by p; fall back to Leibniz
                return IntMod(Matrix(self.rows).det(), self.p, self.s)
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                det = -det
            inv = pow(rows[c][c], -1, m)
            det = det * rows[c][c] % m
            for r in range(c + 1, n):
                f = rows[r][c] * inv % m
                if f:
                    rows[r] = [(x - f * y) % m for x, y in zip(rows[r], rows[c])]
        return IntMod(det, self.p, self.s)

    def inverse(self):
        return matrix_inverse(self)

    def min_valuation(self):
        """Smallest p-adic valuation among entries, capped at s."""
        return min((valuation(x, self.p, cap=self.s) for r in self.rows for x in r), default=self.s)


def matrix_inverse(M):
    """Inverse over Z/p^s by Gauss-Jordan elimination with unit pivots."""
    p, m, n = M.p, M.modulus, M.dim
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(M.rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] % p), None)
        if piv is None:
            raise NonUnitDeterminant(f"determinant is divisible by {p}")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = pow(aug[c][c], -1, m)
        aug[c] = [x * inv % m for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [(x - f * y) % m for x, y in zip(aug[r], aug[c])]
    return PadicMatrix([row[n:] for row in aug], M.p, M.s)


class FrobeniusEndo:
    """The Frobenius lift sigma: parameters go to their p-th powers.

    Ground values (integers, residues, rationals) are fixed, so on a residue
    that is a Teichmuller lift it agrees with x -> x^p.
    """

    def __init__(self, p):
        self.p = p

    def __call__(self, x):
        return apply_frobenius(x, self)

    def __repr__(self):
        return f"FrobeniusEndo(p={self.p})"


def apply_frobenius(x, sigma):
    if isinstance(x, ParamPoly):
        return x.frobenius(sigma.p)
    if isinstance(x, PadicMatrix):
        return x
    if isinstance(x, Matrix):
        return x.map(sigma)
    return x
