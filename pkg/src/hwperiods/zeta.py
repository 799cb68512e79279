"""Brute-force point counts over small finite fields and unit roots.

F_{p^r} elements are integers 0..q-1 whose base-p digits are the
coefficients of a polynomial in x modulo a fixed monic irreducible; the
stored modulus for each (p, r) is primitive, so x generates the unit group
and multiplication runs through log/exp tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import FieldTooLarge, NonOrdinary, Supersingular, UnsupportedAmbient
from .hasse_witt import hw_matrix_toric
from .lattice import rank, solve_exact
from .periods import dwork_ratio
from .rings import IntMod

__all__ = [
    "FiniteField", "PointCount", "UnitRoot", "FultonCheck", "IRREDUCIBLE_TABLE",
    "count_points_torus", "count_points_toric", "count_points_projective",
    "unit_root_from_counts", "unit_root_from_periods", "fulton_trace_check",
    "plane_cubic_singular_points", "DEFAULT_POINT_BUDGET",
]

# Monic primitive moduli, lowest coefficient first.  Version 1; never edit
# an entry, since stored counts depend on the field presentation only up to
# isomorphism but element encodings do not.
IRREDUCIBLE_TABLE_VERSION = 1
IRREDUCIBLE_TABLE = {
    (2, 2): (1, 1, 1), (2, 3): (1, 1, 0, 1),
    (3, 2): (2, 2, 1), (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1), (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1), (7, 3): (4, 0, 6, 1),
}

DEFAULT_POINT_BUDGET = 2 * 10**7


def _is_primitive(p, r, modulus):
    q = p**r
    x = 1
    for k in range(1, q):
        x = _mulx(x, p, r, modulus)
        if x == 1:
            return k == q - 1
    return False


def _mulx(a, p, r, modulus):
    digits = [(a // p**i) % p for i in range(r)]
    top = digits[-1]
    shifted = [0] + digits[:-1]
    out = [(d - top * m) % p for d, m in zip(shifted, modulus[:r])]
    return sum(d * p**i for i, d in enumerate(out))


def _find_primitive(p, r):
    for tail in itertools.product(range(p), repeat=r):
        modulus = tuple(reversed(tail)) + (1,)
        if modulus[0] and _is_primitive(p, r, modulus):
            return modulus
    raise ValueError(f"no primitive polynomial found for {p}^{r}")


class FiniteField:
    def __init__(self, p, r=1):
        self.p, self.r = p, r
        self.q = p**r
        if r == 1:
            g = next(g for g in range(1, p) if all(pow(g, (p - 1) // f, p) != 1 for f in _prime_factors(p - 1)))
            exp = [pow(g, k, p) for k in range(p - 1)]
            self.modulus = None
        else:
            self.modulus = IRREDUCIBLE_TABLE.get((p, r)) or _find_primitive(p, r)
            exp = [1]
            for _ in range(self.q - 2):
                exp.append(_mulx(exp[-1], p, r, self.modulus))
        self.exp = np.array(exp, dtype=np.int64)
        self.log = np.full(self.q, -1, dtype=np.int64)
        self.log[self.exp] = np.arange(self.q - 1)
        # digit matrix of every unit g^k, shape (q-1, r)
        self.digits = np.stack([(self.exp // p**i) % p for i in range(r)], axis=1)

    def __repr__(self):
        return f"FiniteField({self.p}^{self.r})"

    def add(self, a, b):
        p = self.p
        return sum((((a // p**i) + (b // p**i)) % p) * p**i for i in range(self.r))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % (self.q - 1)])


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _field_from_q(q):
    for p in range(2, q + 1):
        if q % p == 0:
            r, x = 0, q
            while x % p == 0:
                x //= p
                r += 1
            if x != 1:
                raise ValueError(f"{q} is not a prime power")
            return FiniteField(p, r)
    raise ValueError(f"bad field size {q}")


def count_points_torus(f, q, budget=DEFAULT_POINT_BUDGET):
    """#{t in (F_q^*)^n : f(t) = 0}; integer coefficients are read in F_p."""
    K = q if isinstance(q, FiniteField) else _field_from_q(q)
    n = f.n
    size = (K.q - 1) ** n
    if size > budget:
        raise FieldTooLarge(f"{size} torus points exceed the budget {budget}")
    terms = [(u, c % K.p) for u, c in f.sorted_terms() if c % K.p]
    if not terms:
        return size
    if n == 0:
        return 0
    grids = np.meshgrid(*[np.arange(K.q - 1, dtype=np.int64)] * n, indexing="ij")
    logs = [g.ravel() for g in grids]
    acc = np.zeros((logs[0].size, K.r), dtype=np.int64)
    for u, c in terms:
        k = np.zeros_like(logs[0])
        for ui, x in zip(u, logs):
            if ui:
                k = k + ui * x
        acc += c * K.digits[k % (K.q - 1)]
    acc %= K.p
    return int(np.count_nonzero(~acc.any(axis=1)))


@dataclass
class PointCount:
    q: int
    torus: int
    strata: dict = field(default_factory=dict)

    @property
    def total(self):
        return sum(self.strata.values())


def _faces(P):
    """Faces as (frozenset of vertex indices, set of facet indices), all dimensions."""
    verts = [tuple(int(x) for x in v) for v in P.vertices]
    if any(any(Fraction(x).denominator != 1 for x in v) for v in P.vertices):
        raise UnsupportedAmbient("polytope has non-integral vertices")
    tight = []
    for normal, offset in P.facets:
        tight.append({i for i, v in enumerate(verts) if sum(a * b for a, b in zip(v, normal)) + offset == 0})
    faces = {}
    for k in range(len(P.facets) + 1):
        for S in itertools.combinations(range(len(P.facets)), k):
            vs = set(range(len(verts)))
            for i in S:
                vs &= tight[i]
            if vs:
                faces.setdefault(frozenset(vs), set()).update(S)
    return verts, faces


def _face_dim(vs):
    base = vs[0]
    return rank([[a - b for a, b in zip(v, base)] for v in vs[1:]]) if len(vs) > 1 else 0


def _saturated(rows):
    """True when the integer rows span a saturated sublattice (gcd of maximal minors 1)."""
    d, n = len(rows), len(rows[0])
    g = 0
    for cols in itertools.combinations(range(n), d):
        sub = [[r[c] for c in cols] for r in rows]
        det = _int_det(sub)
        g = gcd(g, det)
        if g == 1:
            return True
    return g == 1


def _int_det(m):
    n = len(m)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = -1 if inv % 2 else 1
        for i, j in enumerate(perm):
            term *= m[i][j]
        total += term
    return total


def _face_coordinates(face_vertices, all_faces, verts, points):
    """Integer coordinates of a face's lattice points in a basis of primitive edges."""
    vset = set(face_vertices)
    d = _face_dim([verts[i] for i in face_vertices])
    if d == 0:
        v = verts[next(iter(vset))]
        return 0, {v: ()}
    v0i = min(vset)
    v0 = verts[v0i]
    edges = []
    for other, _ in all_faces.items():
        if len(other) == 2 and v0i in other and other <= vset:
            w = verts[next(i for i in other if i != v0i)]
            e = [a - b for a, b in zip(w, v0)]
            g = gcd(*e)
            edges.append([x // g for x in e])
    if len(edges) != d or not _saturated(edges):
        raise UnsupportedAmbient("face is not unimodular at its first vertex")
    n = len(v0)
    # solve sum y_k edges[k] = u - v0 using d independent coordinates
    cols = next(c for c in itertools.combinations(range(n), d)
                if _int_det([[e[i] for i in c] for e in edges]) != 0)
    A = [[edges[k][i] for k in range(d)] for i in cols]
    coords = {}
    for u in points:
        diff = [a - b for a, b in zip(u, v0)]
        y = solve_exact(A, [diff[i] for i in cols])
        if any(Fraction(x).denominator != 1 for x in y):
            raise UnsupportedAmbient("face lattice points are not integral in the edge basis")
        if any(sum(int(y[k]) * edges[k][i] for k in range(d)) != diff[i] for i in range(n)):
            raise UnsupportedAmbient("edge basis does not span the face")
        coords[u] = tuple(int(x) for x in y)
    return d, coords


SUPPORTED_AMBIENTS = {
    "P1": [((1,), (-1,))],
    "P2": [((1, 0), (0, 1), (-1, -1))],
    "P3": [((1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1))],
    "P1xP1": [((1, 0), (-1, 0), (0, 1), (0, -1))],
}


def ambient_name(toric):
    rays = sorted(toric.rays)
    for name, options in SUPPORTED_AMBIENTS.items():
        if any(sorted(o) == rays for o in options):
            return name
    return None


def count_points_toric(F, q, budget=DEFAULT_POINT_BUDGET):
    """Count F_q-points of {f = 0} in the toric variety, one torus orbit per face."""
    from .laurent import LaurentPoly

    if F.toric is not None and ambient_name(F.toric) is None:
        raise UnsupportedAmbient(f"rays {F.toric.rays} are outside the supported suite")
    K = q if isinstance(q, FiniteField) else _field_from_q(q)
    verts, faces = _faces(F.polytope)
    pts = F.polytope.lattice_points
    result = PointCount(K.q, 0)
    for vs, facet_ids in sorted(faces.items(), key=lambda kv: (len(kv[1]), sorted(kv[0]))):
        normals = [F.polytope.facets[i] for i in facet_ids]
        on_face = [u for u in pts if all(sum(a * b for a, b in zip(u, nm)) + off == 0 for nm, off in normals)]
        d, coords = _face_coordinates(sorted(vs), faces, verts, on_face)
        terms = {coords[u]: F.coeffs[u] for u in on_face if F.coeffs.get(u, 0) % K.p}
        g = LaurentPoly(d, terms)
        if d == 0:
            cnt = 0 if g.terms else 1
        else:
            cnt = count_points_torus(g, K, budget)
        key = tuple(sorted(verts[i] for i in vs))
        result.strata[key] = cnt
        if not facet_ids:
            result.torus = cnt
    return result


def count_points_projective(monomials, nvars, q, budget=DEFAULT_POINT_BUDGET):
    """Zeros in P^(nvars-1)(F_q) of sum c x^e given as (c, e) pairs; plain enumeration."""
    K = q if isinstance(q, FiniteField) else _field_from_q(q)
    total = 0
    size = (K.q**nvars - 1) // (K.q - 1)
    if size > budget:
        raise FieldTooLarge(f"{size} projective points exceed the budget {budget}")
    mons = [(c % K.p, e) for c, e in monomials if c % K.p]
    for lead in range(nvars):
        # representatives (0,...,0,1,x_{lead+1},...): remaining coords anywhere in F_q
        rest = nvars - lead - 1
        if rest:
            grids = np.meshgrid(*[np.arange(K.q, dtype=np.int64)] * rest, indexing="ij")
            vals = [g.ravel() for g in grids]
        else:
            vals = []
        npts = vals[0].size if vals else 1
        acc = np.zeros((npts, K.r), dtype=np.int64)
        for c, e in mons:
            if any(e[i] for i in range(lead)):
                continue
            ok = np.ones(npts, dtype=bool)
            lg = np.zeros(npts, dtype=np.int64)
            for k, x in enumerate(vals):
                ek = e[lead + 1 + k]
                if ek:
                    ok &= x != 0
                    lg = lg + ek * K.log[x]
            term = c * K.digits[lg % (K.q - 1)]
            acc += np.where(ok[:, None], term, 0)
        acc %= K.p
        total += int(np.count_nonzero(~acc.any(axis=1)))
    return total


@dataclass(frozen=True)
class UnitRoot:
    value: IntMod
    precision: int
    provenance: str


def unit_root_from_counts(N, p, s, r=1):
    """Unit root of T^2 - a T + q, q = p^r, a = q + 1 - N, Hensel-lifted mod p^s."""
    q = p**r
    a = q + 1 - N
    if a % p == 0:
        raise Supersingular(f"trace {a} is divisible by {p}")
    M = p**s
    T = a % p
    for _ in range(s.bit_length() + 1):
        f = (T * T - a * T + q) % M
        df = (2 * T - a) % M
        T = (T - f * pow(df, -1, M)) % M
    assert (T * T - a * T + q) % M == 0
    return UnitRoot(IntMod(T, p, s), s, "from-counts")


def unit_root_from_periods(F, p, r, s):
    """dwork_ratio(F, p, s)^r; the coefficients must be prime-field Teichmuller lifts."""
    g = dwork_ratio(F, p, s)
    return UnitRoot(g**r, s, "from-periods")


@dataclass
class FultonCheck:
    holds: bool
    count: int
    trace: int
    n: int
    p: int

    def __bool__(self):
        return self.holds


def fulton_trace_check(F, p):
    """#Y(F_p) = 1 + (-1)^(n-1) tr(HW) mod p, n the ambient dimension."""
    if F.toric is not None and ambient_name(F.toric) is None:
        raise UnsupportedAmbient(f"rays {F.toric.rays} are outside the supported suite")
    numeric = F._like({u: c % p for u, c in F.coeffs.items()})
    HW = hw_matrix_toric(numeric, p)
    tr = int(HW.trace()) % p
    N = count_points_toric(numeric, p).total
    n = F.dimension
    holds = (N - 1 - (-1) ** (n - 1) * tr) % p == 0
    return FultonCheck(holds, N, tr, n, p)


def plane_cubic_singular_points(coeffs, p, max_degree=3):
    """Singular points of a plane cubic given as {(i,j,k): c} over F_{p^r}, r <= max_degree.

    Returns [(r, count)] for the degrees that have singular points; an
    empty list means the cubic is smooth.
    """
    def partial(poly, v):
        out = {}
        for e, c in poly.items():
            if e[v]:
                e2 = list(e)
                e2[v] -= 1
                out[tuple(e2)] = out.get(tuple(e2), 0) + c * e[v]
        return out

    polys = [coeffs] + [partial(coeffs, v) for v in range(3)]
    found = []
    for r in range(1, max_degree + 1):
        K = FiniteField(p, r)
        sing = _common_zeros(polys, K)
        if sing:
            found.append((r, sing))
    return found


def _common_zeros(polys, K):
    count = 0
    for lead in range(3):
        rest = 2 - lead
        grids = np.meshgrid(*[np.arange(K.q, dtype=np.int64)] * rest, indexing="ij") if rest else []
        vals = [g.ravel() for g in grids]
        npts = vals[0].size if vals else 1
        zero_all = np.ones(npts, dtype=bool)
        for poly in polys:
            acc = np.zeros((npts, K.r), dtype=np.int64)
            for e, c in poly.items():
                c %= K.p
                if not c or any(e[i] for i in range(lead)):
                    continue
                ok = np.ones(npts, dtype=bool)
                lg = np.zeros(npts, dtype=np.int64)
                for k, x in enumerate(vals):
                    ek = e[lead + 1 + k]
                    if ek:
                        ok &= x != 0
                        lg = lg + ek * K.log[x]
                acc += np.where(ok[:, None], c * K.digits[lg % (K.q - 1)], 0)
            zero_all &= ~(acc % K.p).any(axis=1)
        count += int(np.count_nonzero(zero_all))
    return count
