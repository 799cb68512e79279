"""Lattice polytopes cut out by toric data, and their lattice points.

A polytope is stored by facet inequalities ``<v, normal> >= -offset``.
Enumerations use exact integer/rational arithmetic only and always return
points in lexicographic order, so interior points index matrix rows and
columns deterministically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor, gcd

from .errors import MalformedInput, UnboundedPolytope

__all__ = [
    "ToricData", "LatticePolytope", "polytope_from_toric",
    "lattice_points", "interior_points", "vertices", "solve_exact", "rank",
]


def _row_reduce(rows):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    return len(_row_reduce(rows)[1]) if rows else 0


def solve_exact(A, b):
    """Unique solution of the square system A x = b over Q, or None."""
    n = len(A)
    m, piv = _row_reduce([list(r) + [bi] for r, bi in zip(A, b)])
    if piv[:n] != list(range(n)) or len(piv) > n:
        return None
    return tuple(m[i][n] for i in range(n))


def _nullspace(rows, n):
    m, piv = _row_reduce(rows) if rows else ([], [])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -m[i][f]
        basis.append(v)
    return basis


@dataclass(frozen=True)
class ToricData:
    """Rays v_i of a toric variety and the coefficients k_i of L = O(sum k_i D_i)."""

    rays: tuple
    bundle_coeffs: tuple

    def __init__(self, rays, bundle_coeffs=None):
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        if not rays:
            raise MalformedInput("toric data needs at least one ray")
        if bundle_coeffs is None:
            bundle_coeffs = (1,) * len(rays)
        bundle_coeffs = tuple(int(k) for k in bundle_coeffs)
        if len(bundle_coeffs) != len(rays):
            raise MalformedInput("one bundle coefficient per ray is required")
        n = len(rays[0])
        if any(len(r) != n for r in rays):
            raise MalformedInput("rays have inconsistent dimensions")
        for r in rays:
            if gcd(*r) != 1:
                raise MalformedInput(f"ray {list(r)} is not primitive")
        if any(k < 1 for k in bundle_coeffs):
            raise MalformedInput("bundle coefficients must be >= 1")
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "bundle_coeffs", bundle_coeffs)

    @property
    def dimension(self):
        return len(self.rays[0])

    @property
    def is_anticanonical(self):
        return all(k == 1 for k in self.bundle_coeffs)


class LatticePolytope:
    """Bounded region ``{v : <v, normal> >= -offset for every facet}``."""

    def __init__(self, facets, dimension=None):
        seen = []
        for normal, offset in facets:
            key = (tuple(int(x) for x in normal), int(offset))
            if key not in seen:
                seen.append(key)
        if not seen:
            raise UnboundedPolytope("no facet inequalities")
        self.facets = tuple(seen)
        self.dimension = dimension if dimension is not None else len(seen[0][0])
        self._check_bounded()

    def __repr__(self):
        return f"LatticePolytope(dim={self.dimension}, facets={len(self.facets)})"

    def _check_bounded(self):
        # Bounded iff the recession cone {<x, normal> >= 0} is {0}.  Given full
        # rank, the cone is pointed and its extreme rays lie on n-1 facet
        # hyperplanes, so it suffices to test those candidate directions.
        n = self.dimension
        normals = [f[0] for f in self.facets]
        if rank(normals) < n:
            raise UnboundedPolytope("facet normals do not span the space")
        if n == 1:
            if not any(v[0] > 0 for v in normals) or not any(v[0] < 0 for v in normals):
                raise UnboundedPolytope("segment is unbounded")
            return
        for sub in itertools.combinations(normals, n - 1):
            ns = _nullspace([list(v) for v in sub], n)
            if len(ns) != 1:
                continue
            d = ns[0]
            for sgn in (1, -1):
                if all(sgn * sum(a * b for a, b in zip(d, v)) >= 0 for v in normals):
                    raise UnboundedPolytope(f"recession direction {[sgn * x for x in d]}")

    def contains(self, v, strict=False):
        for normal, offset in self.facets:
            val = sum(a * b for a, b in zip(v, normal)) + offset
            if val < 0 or (strict and val == 0):
                return False
        return True

    @cached_property
    def vertices(self):
        n = self.dimension
        found = set()
        for sub in itertools.combinations(self.facets, n):
            A = [f[0] for f in sub]
            b = [-f[1] for f in sub]
            x = solve_exact(A, b)
            if x is not None and self.contains(x):
                found.add(x)
        return sorted(found)

    @cached_property
    def bounding_box(self):
        vs = self.vertices
        return [(ceil(min(v[i] for v in vs)), floor(max(v[i] for v in vs)))
                for i in range(self.dimension)]

    @cached_property
    def lattice_points(self):
        if not self.vertices:
            return []
        ranges = [range(lo, hi + 1) for lo, hi in self.bounding_box]
        return [v for v in itertools.product(*ranges) if self.contains(v)]

    @cached_property
    def interior_points(self):
        return [v for v in self.lattice_points if self.contains(v, strict=True)]

    def integral_vertices(self):
        return [tuple(int(x) for x in v) for v in self.vertices if all(x.denominator == 1 for x in v)]


def polytope_from_toric(t):
    """The polytope of sections ``{v : <v, v_i> >= -k_i}``."""
    return LatticePolytope(list(zip(t.rays, t.bundle_coeffs)), t.dimension)


def lattice_points(P):
    return list(P.lattice_points)


def interior_points(P):
    return list(P.interior_points)


def vertices(P):
    """Vertices as exact rational tuples, each paired with an integrality flag."""
    return [(v, all(x.denominator == 1 for x in v)) for v in P.vertices]
