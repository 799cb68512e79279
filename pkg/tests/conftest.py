import pytest

from hwperiods.hasse_witt import HypersurfaceFamily
from hwperiods.lattice import LatticePolytope, ToricData, polytope_from_toric
from hwperiods.rings import ParamPoly

P1 = ToricData([(1,), (-1,)])
P2 = ToricData([(1, 0), (0, 1), (-1, -1)])
P1xP1 = ToricData([(1, 0), (-1, 0), (0, 1), (0, -1)])
P3 = ToricData([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)])
# O(4) on P^2: a translate of {v1, v2 >= 0, v1 + v2 <= 4}
QUARTIC = ToricData([(1, 0), (0, 1), (-1, -1)], [1, 1, 2])
# polytope of the four-term cubic a + t1 + t2 + 1/(t1 t2), inside P^2
HESSE_SUPPORT = [(0, 0), (1, 0), (0, 1), (-1, -1)]


def hesse_family(a0=None, rest=(1, 1, 1)):
    """a0 + a1 t1 + a2 t2 + a3/(t1 t2) in the P^2 polytope; symbolic where None."""
    values = [a0, *rest]
    names = tuple(f"a{i}" for i, v in enumerate(values) if v is None)
    symbolic = bool(names)
    coeffs = {}
    for i, (u, v) in enumerate(zip(HESSE_SUPPORT, values)):
        if v is None:
            coeffs[u] = ParamPoly.symbol(names, f"a{i}")
        else:
            coeffs[u] = ParamPoly.constant(names, v) if symbolic else v
    return HypersurfaceFamily.from_toric(P2, coeffs)


@pytest.fixture
def p1_universal():
    return HypersurfaceFamily.universal(polytope_from_toric(P1), toric=P1)


@pytest.fixture
def quartic_universal():
    return HypersurfaceFamily.universal(polytope_from_toric(QUARTIC), toric=QUARTIC)


@pytest.fixture
def planar_quartic_triangle():
    return LatticePolytope([((1, 0), 0), ((0, 1), 0), ((-1, -1), 4)])
