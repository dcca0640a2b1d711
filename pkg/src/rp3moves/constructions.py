"""Standard small triangulations and the barycentric subdivision."""
from __future__ import annotations

from itertools import combinations

from .triangulation import Triangulation, skey


def boundary_of_simplex(n: int) -> Triangulation:
    """Boundary of the n-simplex on vertices 0..n, an (n-1)-sphere."""
    return Triangulation(combinations(range(n + 1), n), n - 1)


def cycle(n: int, offset: int = 0) -> list:
    return [frozenset({offset + i, offset + (i + 1) % n}) for i in range(n)]


def join_of_cycles(m: int, n: int) -> Triangulation:
    """The 3-sphere C_m * C_n; edges of one cycle have degree equal to the other's length."""
    a = cycle(m, 0)
    b = cycle(n, m)
    return Triangulation((x | y for x in a for y in b), 3)


# The 6-vertex projective plane (antipodal quotient of the icosahedron).
RP2_6 = [
    (1, 2, 4), (1, 2, 6), (1, 3, 5), (1, 3, 6), (1, 4, 5),
    (2, 3, 4), (2, 3, 5), (2, 5, 6), (3, 4, 6), (4, 5, 6),
]


def rp2_six() -> Triangulation:
    return Triangulation(RP2_6, 2)


def barycentric_subdivision(T: Triangulation) -> Triangulation:
    """Order complex of the face poset; vertices are numbered 0.. by (dimension, labels)."""
    simplices = sorted(
        (s for k in range(T.dim + 1) for s in T.faces(k)),
        key=lambda s: (len(s), skey(s)),
    )
    index = {s: i for i, s in enumerate(simplices)}
    out = []
    for f in T.facets:
        out.extend(_flags(f, index))
    return Triangulation(out, T.dim)


def _flags(top: frozenset, index: dict):
    if len(top) == 1:
        yield (index[top],)
        return
    for v in top:
        for chain in _flags(top - {v}, index):
            yield chain + (index[top],)
