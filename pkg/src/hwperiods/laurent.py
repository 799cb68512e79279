"""Sparse Laurent polynomials and targeted coefficient extraction.

The workhorse is :func:`coefficient_of_power`, which multiplies by ``f`` one
factor at a time and discards every partial monomial that can no longer
reach a requested exponent.  For integer coefficients under a modulus the
live window is held in a dense numpy array; otherwise a dict is used, and
parameter-polynomial coefficients are flattened into extra exponent slots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, NonLaurentResult, NonUnitVertexCoefficient
from .rings import IntMod, ParamPoly, format_number

__all__ = [
    "LaurentPoly", "GradedSeries", "multiply", "power", "coefficient_of_power",
    "power_coefficients_by_step", "geometric_inverse_series", "divide_exact",
]


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


class LaurentPoly:
    """Finite map from exponent tuples of length ``n`` to non-zero coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise ValueError(f"exponent {e} has length != {n}")
            if c != 0:
                clean[e] = c
        self.terms = clean

    @classmethod
    def constant(cls, n, c=1):
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, exp, c=1):
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def variable(cls, n, i):
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    def _lift(self, other):
        if isinstance(other, LaurentPoly):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch {self.n} vs {other.n}")
            return other
        return LaurentPoly.constant(self.n, other)

    def __add__(self, other):
        o = self._lift(other)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t[e] + c if e in t else c
        return LaurentPoly(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return multiply(self, other)
        return LaurentPoly(self.n, {e: c * other for e, c in self.terms.items()})

    def __rmul__(self, other):
        return LaurentPoly(self.n, {e: other * c for e, c in self.terms.items()})

    def __pow__(self, e):
        return power(self, e)

    def __mod__(self, m):
        return LaurentPoly(self.n, {e: c % m for e, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        return f"LaurentPoly({self.to_text()!r})"

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), 0)

    def support(self):
        return sorted(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def exponent_bounds(self):
        """Per-coordinate (mins, maxs) over the support."""
        sup = list(self.terms)
        if not sup:
            raise ValueError("zero polynomial has no support")
        return (tuple(min(e[i] for e in sup) for i in range(self.n)),
                tuple(max(e[i] for e in sup) for i in range(self.n)))

    def map_coefficients(self, fn):
        return LaurentPoly(self.n, {e: fn(c) for e, c in self.terms.items()})

    def shift(self, u):
        """Multiply by the monomial t^u."""
        return LaurentPoly(self.n, {_add(e, u): c for e, c in self.terms.items()})

    def derivative(self, i):
        """Partial derivative in t_i."""
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                t[e2] = e[i] * c
        return LaurentPoly(self.n, t)

    def evaluate(self, point, modulus=None):
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if modulus is not None:
                    term = term * pow(x, k, modulus)
                elif k >= 0:
                    term = term * x**k
                else:
                    term = term * Fraction(1, x) ** (-k)
            total = total + term
        return total % modulus if modulus is not None else total

    def to_text(self, names=None):
        names = names or [f"t{i + 1}" for i in range(self.n)]
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if isinstance(c, ParamPoly):
                cs = f"({c.to_text()})"
            else:
                cs = format_number(c)
            if not mono:
                out.append(cs)
            elif cs in ("1", "-1"):
                out.append(mono if cs == "1" else f"-{mono}")
            else:
                out.append(f"{cs}*{mono}")
        text = out[0]
        for piece in out[1:]:
            text += piece if piece.startswith("-") else "+" + piece
        return text


def multiply(f, g, modulus=None):
    if f.n != g.n:
        raise ValueError(f"dimension mismatch {f.n} vs {g.n}")
    t = {}
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            e = _add(e1, e2)
            c = c1 * c2
            t[e] = t[e] + c if e in t else c
    if modulus is not None:
        t = {e: c % modulus for e, c in t.items()}
    return LaurentPoly(f.n, t)


def power(f, e, modulus=None):
    """f**e by binary squaring, reducing coefficients mod ``modulus`` if given."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    result = LaurentPoly.constant(f.n, 1)
    base = f % modulus if modulus is not None else f
    while e:
        if e & 1:
            result = multiply(result, base, modulus)
        e >>= 1
        if e:
            base = multiply(base, base, modulus)
    return result


# ---------------------------------------------------------------------------
# pruned expansion engine


def _windows(mins, maxs, targets, e, exact):
    """Function k -> (lo, hi) per coordinate for partial products of k factors.

    ``exact``: exactly e - k factors remain.  Otherwise anywhere from 0 to
    e - k factors remain (used when every intermediate power is read).
    """
    n = len(mins)
    tlo = [min(t[i] for t in targets) for i in range(n)]
    thi = [max(t[i] for t in targets) for i in range(n)]

    def window(k):
        r = e - k
        lo, hi = [], []
        for i in range(n):
            if exact:
                a, b = tlo[i] - r * maxs[i], thi[i] - r * mins[i]
            else:
                a = min(tlo[i], tlo[i] - r * maxs[i])
                b = max(thi[i], thi[i] - r * mins[i])
            lo.append(max(k * mins[i], a))
            hi.append(min(k * maxs[i], b))
        return lo, hi

    def feasible(w, k):
        r = e - k
        for t in targets:
            ok = True
            for i in range(n):
                if exact:
                    a, b = t[i] - r * maxs[i], t[i] - r * mins[i]
                else:
                    a = min(t[i], t[i] - r * maxs[i])
                    b = max(t[i], t[i] - r * mins[i])
                if not a <= w[i] <= b:
                    ok = False
                    break
            if ok:
                return True
        return False

    return window, feasible


_INT64_HEADROOM = 2**62


def _dense_ok(f, modulus):
    if modulus is None or not all(type(c) is int for c in f.terms.values()):
        return False
    return (modulus - 1) ** 2 * max(len(f.terms), 1) < _INT64_HEADROOM


def _dense_run(f, e, targets, modulus, exact, budget):
    """Dense windowed expansion; returns per-step lists of target coefficients."""
    n = f.n
    mins, maxs = f.exponent_bounds()
    window, _ = _windows(mins, maxs, targets, e, exact)
    terms = [(u, c % modulus) for u, c in f.sorted_terms()]
    steps = []

    def read(arr, lo):
        out = []
        for t in targets:
            idx = tuple(t[i] - lo[i] for i in range(n))
            if all(0 <= idx[i] < arr.shape[i] for i in range(n)):
                out.append(int(arr[idx]))
            else:
                out.append(0)
        return out

    lo0, hi0 = window(0)
    if any(l > 0 or h < 0 for l, h in zip(lo0, hi0)):
        return [[0] * len(targets) for _ in range(e + 1)]
    cur = np.ones((1,) * n, dtype=np.int64)
    cur_lo = [0] * n
    steps.append(read(cur, cur_lo))
    for k in range(1, e + 1):
        lo, hi = window(k)
        if any(l > h for l, h in zip(lo, hi)):
            steps.extend([[0] * len(targets)] * (e + 1 - k))
            return steps
        new = np.zeros([h - l + 1 for l, h in zip(lo, hi)], dtype=np.int64)
        cur_hi = [l + s - 1 for l, s in zip(cur_lo, cur.shape)]
        for u, c in terms:
            src, dst = [], []
            empty = False
            for i in range(n):
                a = max(cur_lo[i], lo[i] - u[i])
                b = min(cur_hi[i], hi[i] - u[i])
                if a > b:
                    empty = True
                    break
                src.append(slice(a - cur_lo[i], b - cur_lo[i] + 1))
                dst.append(slice(a + u[i] - lo[i], b + u[i] - lo[i] + 1))
            if not empty:
                new[tuple(dst)] += c * cur[tuple(src)]
        new %= modulus
        if budget is not None:
            live = int(np.count_nonzero(new))
            if live > budget:
                raise BudgetExceeded(f"{live} live monomials after {k} factors exceeds {budget}",
                                     live=live, step=k)
        cur, cur_lo = new, lo
        steps.append(read(cur, cur_lo))
    return steps


def _flatten(f):
    """Turn ParamPoly coefficients into extra exponent slots; returns (terms, names)."""
    names = None
    flat = {}
    for u, c in f.terms.items():
        if isinstance(c, ParamPoly):
            if names is None:
                names = c.names
            elif c.names != names:
                raise ValueError("coefficients use different parameter names")
            for pe, pc in c.terms.items():
                flat[u + pe] = pc
        else:
            flat[u] = c
    if names is None:
        return f.terms, None
    width = len(names)
    out = {}
    for k, c in flat.items():
        key = k if len(k) == f.n + width else k + (0,) * width
        out[key] = out.get(key, 0) + c
    return out, names


def _dict_run(f, e, targets, modulus, exact, budget):
    n = f.n
    mins, maxs = f.exponent_bounds()
    _, feasible = _windows(mins, maxs, targets, e, exact)
    terms, names = _flatten(f)
    terms = sorted(terms.items())
    width = len(names) if names else 0
    tset = {tuple(t): i for i, t in enumerate(targets)}

    def read(cur):
        if names is None:
            return [cur.get(tuple(t), 0) for t in targets]
        acc = [dict() for _ in targets]
        for key, c in cur.items():
            i = tset.get(key[:n])
            if i is not None:
                acc[i][key[n:]] = c
        return [ParamPoly(names, a) for a in acc]

    zero_key = (0,) * (n + width)
    if not feasible(zero_key[:n], 0):
        z = [ParamPoly(names) if names else 0 for _ in targets]
        return [list(z) for _ in range(e + 1)]
    cur = {zero_key: 1}
    steps = [read(cur)]
    for k in range(1, e + 1):
        new = {}
        for key, c in cur.items():
            for u, a in terms:
                w = _add(key, u)
                if feasible(w[:n], k):
                    new[w] = new[w] + c * a if w in new else c * a
        if modulus is not None:
            new = {w: c % modulus for w, c in new.items()}
            new = {w: c for w, c in new.items() if c != 0}
        if budget is not None and len(new) > budget:
            raise BudgetExceeded(f"{len(new)} live monomials after {k} factors exceeds {budget}",
                                 live=len(new), step=k)
        cur = new
        steps.append(read(cur))
    return steps


def _run(f, e, targets, modulus, exact, budget):
    targets = [tuple(t) for t in targets]
    if e < 0:
        raise ValueError("exponent must be non-negative")
    if not targets:
        return [[] for _ in range(e + 1)]
    if f.is_zero():
        zero = [[0] * len(targets) for _ in range(e + 1)]
        zero[0] = [1 if not any(t) else 0 for t in targets]
        return zero
    if _dense_ok(f, modulus):
        return _dense_run(f, e, targets, modulus, exact, budget)
    return _dict_run(f, e, targets, modulus, exact, budget)


def coefficient_of_power(f, e, targets, modulus=None, budget_terms=None):
    """Coefficients of f**e at each exponent in ``targets`` (mod ``modulus``)."""
    return _run(f, e, targets, modulus, True, budget_terms)[-1]


def power_coefficients_by_step(f, K, targets, modulus=None, budget_terms=None):
    """``out[k][i]`` is the coefficient of t^targets[i] in f**k for k = 0..K."""
    return _run(f, K, targets, modulus, False, budget_terms)


# ---------------------------------------------------------------------------
# geometric inverse series


@dataclass(frozen=True)
class GradedSeries:
    """Truncation of 1/f = c0^{-1} t^{-u0} sum_k (-h)^k, graded by factor count k."""

    n: int
    u0: tuple
    layers: tuple

    @property
    def order(self):
        return len(self.layers) - 1

    def truncated(self, k=None):
        k = self.order if k is None else k
        acc = LaurentPoly(self.n)
        for layer in self.layers[:k + 1]:
            acc = acc + layer
        return acc


def _unit_inverse(c):
    if isinstance(c, ParamPoly):
        if not c.is_constant() or c.is_zero():
            raise NonUnitVertexCoefficient(f"coefficient {c} at the distinguished point is not a unit")
        inv = _unit_inverse(c.constant_term())
        return ParamPoly.constant(c.names, inv)
    if isinstance(c, IntMod):
        if not c.is_unit():
            raise NonUnitVertexCoefficient(f"{c} is not a unit mod {c.p}^{c.s}")
        return c.inverse()
    if c == 0:
        raise NonUnitVertexCoefficient("zero coefficient at the distinguished point")
    if isinstance(c, int) and c in (1, -1):
        return c
    return Fraction(1) / c


def shifted_tail(f, u0):
    """(c0, h) with f = c0 t^{u0} (1 + h); raises if c0 is not a unit."""
    u0 = tuple(u0)
    c0 = f.coefficient(u0)
    inv = _unit_inverse(c0)
    h = {}
    for e, c in f.terms.items():
        if e != u0:
            h[tuple(x - y for x, y in zip(e, u0))] = c * inv
    return c0, inv, LaurentPoly(f.n, h)


def geometric_inverse_series(f, u0, N):
    """Layers k = 0..N of the expansion of 1/f around the monomial t^{u0}."""
    u0 = tuple(u0)
    _, inv, h = shifted_tail(f, u0)
    neg_u0 = tuple(-x for x in u0)
    layers = []
    cur = LaurentPoly.constant(f.n, 1)
    minus_h = -h
    for k in range(N + 1):
        layers.append((cur * inv).shift(neg_u0))
        if k < N:
            cur = multiply(cur, minus_h)
    return GradedSeries(f.n, u0, tuple(layers))


# ---------------------------------------------------------------------------
# exact division


def divide_exact(f, g):
    """q with f = q*g, or NonLaurentResult when g does not divide f.

    Lex-leading-term division; the quotient support must fit in the box
    box(f) - box(g), which bounds the search when division fails.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return LaurentPoly(f.n)
    fmin, fmax = f.exponent_bounds()
    gmin, gmax = g.exponent_bounds()
    qlo = [a - b for a, b in zip(fmin, gmin)]
    qhi = [a - b for a, b in zip(fmax, gmax)]
    glead = max(g.terms)
    ginv = _unit_inverse(g.terms[glead])
    rem = dict(f.terms)
    q = {}
    while rem:
        lead = max(rem)
        t = tuple(a - b for a, b in zip(lead, glead))
        if any(x < lo or x > hi for x, lo, hi in zip(t, qlo, qhi)):
            raise NonLaurentResult("denominator does not divide the numerator")
        c = rem[lead] * ginv
        q[t] = c
        for e, gc in g.terms.items():
            w = _add(t, e)
            v = rem.get(w, 0) - c * gc
            if v == 0:
                rem.pop(w, None)
            else:
                rem[w] = v
    return LaurentPoly(f.n, q)
