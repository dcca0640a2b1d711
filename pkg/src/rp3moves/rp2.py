"""Simple cell decompositions of the projective plane and their reduction.

A decomposition is "dual to a triangulation" when it is simple (every vertex
on three edges), regular, and its primal complex (one vertex per 2-cell, one
triangle per vertex) is a simplicial closed surface with the same number of
edges.  Deleting an edge merges the two 2-cells on either side and
amalgamates the edges at its two end points; in primal terms this is an edge
contraction.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .cells import CellComplex, CellError, delete_cell, dual, order_complex
from .isomorphism import iso_signature, isomorphism
from .moves import Workspace
from .triangulation import Triangulation, orientation, validate, vkey

SurfaceDecomposition = CellComplex

# The irreducible 7-vertex projective plane; found by the census below and
# frozen here (see tests/test_rp2.py for the regeneration check).
RP2_7 = [
    (0, 1, 2), (0, 1, 6), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 6),
    (1, 2, 4), (1, 4, 6), (2, 3, 6), (2, 4, 5), (2, 5, 6), (3, 4, 6),
]


def primal(Z: CellComplex) -> Triangulation:
    """Triangulation with a vertex per 2-cell and a triangle per vertex of ``Z``."""
    tris = []
    for v in Z.of_dim(0):
        faces = {f for e in Z.cofaces[v] for f in Z.cofaces[e]}
        if len(faces) != 3:
            raise CellError(f"vertex {v} does not meet exactly three distinct 2-cells")
        tris.append(frozenset(faces))
    if len(set(tris)) != len(tris):
        raise CellError("two vertices meet the same three 2-cells")
    return Triangulation(tris, 2)


def dual_issues(Z: CellComplex) -> list:
    if Z.dim != 2:
        return ["decomposition is not 2-dimensional"]
    issues = Z.simplicity_issues() + Z.regularity_issues()
    if issues:
        return issues
    try:
        P = primal(Z)
    except CellError as exc:
        return [str(exc)]
    rep = validate(P)
    if not rep.valid:
        return ["primal complex is not a closed surface: " + "; ".join(rep.issues[:2])]
    if len(P.faces(1)) != len(Z.of_dim(1)):
        return ["primal complex has collapsed edges"]
    return []


def is_dual_to_triangulation(Z: CellComplex) -> bool:
    return not dual_issues(Z)


def dual2(T: Triangulation) -> CellComplex:
    if T.dim != 2:
        raise ValueError("dual2 expects a surface triangulation")
    return dual(T)


def surface_invariants(Z: CellComplex) -> tuple[int, bool]:
    """(Euler characteristic, orientable) of the underlying surface."""
    oc = order_complex(Z)
    return oc.euler_characteristic, orientation(oc) is not None


def delete_edge(Z: CellComplex, e) -> CellComplex:
    """Delete edge ``e``; raises CellError unless the result is dual to a triangulation."""
    Z2, _ = delete_cell(Z, e)
    issues = dual_issues(Z2)
    if issues:
        raise CellError(f"deleting {e} leaves a decomposition not dual to a triangulation: {issues[0]}")
    return Z2


def primal_edge(Z: CellComplex, e) -> tuple:
    """The primal edge crossing ``e``: the two 2-cells on either side."""
    f, g = sorted(Z.cofaces[e], key=vkey)
    return f, g


def verify_reversible(Z: CellComplex, e) -> bool:
    """Deleting ``e`` is a primal edge contraction whose inverse expansion restores Z."""
    P = primal(Z)
    a, b = primal_edge(Z, e)
    ws = Workspace(P)
    if ws.link_witness(a, b) is not None:
        return False
    inv = ws.contract(a, b)
    after = ws.snapshot()
    if not decompositions_isomorphic(dual2(after), delete_edge(Z, e)):
        return False
    ws.expand(inv)
    return ws.snapshot() == P


def deletable_edges(Z: CellComplex) -> list:
    out = []
    for e in Z.of_dim(1):
        try:
            delete_edge(Z, e)
        except CellError:
            continue
        out.append(e)
    return out


def decomposition_signature(Z: CellComplex) -> str:
    return iso_signature(order_complex(Z))


def decompositions_isomorphic(Z1: CellComplex, Z2: CellComplex) -> bool:
    return isomorphism(order_complex(Z1), order_complex(Z2)) is not None


@lru_cache(maxsize=None)
def barnette_endpoints() -> tuple[CellComplex, CellComplex]:
    """Duals of the 6- and 7-vertex irreducible projective planes."""
    from .constructions import RP2_6

    return dual2(Triangulation(RP2_6, 2)), dual2(Triangulation(RP2_7, 2))


def which_endpoint(Z: CellComplex) -> str | None:
    sig = decomposition_signature(Z)
    z1, z2 = barnette_endpoints()
    if sig == decomposition_signature(z1):
        return "z1"
    if sig == decomposition_signature(z2):
        return "z2"
    return None


@dataclass
class Reduction:
    result: CellComplex
    deleted: list
    steps: list  # decompositions before each deletion
    endpoint: str | None


def reduce(Z: CellComplex, check_endpoint: bool = True) -> Reduction:
    """Delete the first deletable edge (smallest id) until none is left."""
    if not is_dual_to_triangulation(Z):
        raise CellError("input is not a simple decomposition dual to a triangulation")
    chi, orient = surface_invariants(Z)
    deleted, steps = [], []
    cur = Z
    while True:
        nxt = None
        for e in cur.of_dim(1):
            try:
                nxt = delete_edge(cur, e)
            except CellError:
                continue
            if not verify_reversible(cur, e):
                raise AssertionError(f"deleting edge {e} is not undone by re-inserting it")
            steps.append(cur)
            deleted.append(e)
            break
        if nxt is None:
            break
        assert surface_invariants(nxt) == (chi, orient)
        cur = nxt
    endpoint = None
    if chi == 1 and not orient:
        endpoint = which_endpoint(cur)
        if check_endpoint and endpoint is None:
            raise AssertionError("irreducible projective plane decomposition is neither Z1 nor Z2")
    return Reduction(cur, deleted, steps, endpoint)


def rp2_triangulations(n: int) -> list:
    """All triangulations of the projective plane with ``n`` vertices, up to isomorphism.

    Independent brute force: fix a vertex of maximal degree ``d`` with link
    the cycle 1..d, then close open edges one at a time in lexicographic
    order, keeping every vertex link a union of paths (or one full cycle).
    """
    found = {}
    ntri = 2 * (n - 1)
    for d in range(n - 1, 2, -1):
        if d * n < 6 * (n - 1):
            break
        tris = [frozenset({0, i, i % d + 1}) for i in range(1, d + 1)]
        state = _SurfaceSearch(n, d, ntri)
        for t in tris:
            state.add(t)
        state.search(found)
    return [found[k] for k in sorted(found)]


class _SurfaceSearch:
    def __init__(self, n, d, ntri):
        self.n, self.d, self.ntri = n, d, ntri
        self.tris = []
        self.count = defaultdict(int)
        self.link = defaultdict(lambda: defaultdict(set))
        self.used = set()

    def add(self, t):
        self.tris.append(t)
        for v in t:
            self.used.add(v)
            a, b = sorted(t - {v})
            self.link[v][a].add(b)
            self.link[v][b].add(a)
        for v in t:
            for u in t:
                if vkey(u) < vkey(v):
                    self.count[frozenset((u, v))] += 1

    def remove(self, t):
        self.tris.pop()
        for v in t:
            a, b = sorted(t - {v})
            self.link[v][a].discard(b)
            self.link[v][b].discard(a)
            if not self.link[v][a]:
                del self.link[v][a]
            if not self.link[v][b]:
                del self.link[v][b]
        for v in t:
            for u in t:
                if vkey(u) < vkey(v):
                    self.count[frozenset((u, v))] -= 1
        self.used = {v for t in self.tris for v in t}

    def closed(self, v):
        lk = self.link[v]
        return bool(lk) and all(len(s) == 2 for s in lk.values())

    def ok(self, t):
        for v in t:
            if self.closed(v):
                return False
            a, b = sorted(t - {v})
            lk = self.link[v]
            if len(lk.get(a, ())) >= 2 or len(lk.get(b, ())) >= 2:
                return False
            deg = len(lk) + (a not in lk) + (b not in lk)
            if deg > self.d:
                return False
            if a in lk and b in lk and self._same_path(lk, a, b):
                # closing the cycle: only if every link vertex then has degree 2
                if any(len(s) != 2 for x, s in lk.items() if x not in (a, b)):
                    return False
        return True

    @staticmethod
    def _same_path(lk, a, b):
        prev, cur = None, a
        while True:
            nxt = [x for x in lk[cur] if x != prev]
            if not nxt:
                return False
            prev, cur = cur, nxt[0]
            if cur == b:
                return True
            if cur == a:
                return False

    def search(self, found):
        if len(self.tris) > self.ntri:
            return
        open_edges = [e for e, c in self.count.items() if c == 1]
        if not open_edges:
            if len(self.tris) == self.ntri and len(self.used) == self.n:
                T = Triangulation(self.tris, 2)
                rep = validate(T)
                if rep.valid and not rep.orientable and T.euler_characteristic == 1:
                    found.setdefault(iso_signature(T), T)
            return
        e = min(open_edges, key=lambda e: sorted(e))
        a, b = sorted(e)
        fresh = min((v for v in range(self.n) if v not in self.used), default=None)
        for x in range(self.n):
            if x in e:
                continue
            if x not in self.used and x != fresh:
                continue
            t = frozenset((a, b, x))
            if self.count[frozenset((a, x))] >= 2 or self.count[frozenset((b, x))] >= 2:
                continue
            if t in self.tris or not self.ok(t):
                continue
            self.add(t)
            self.search(found)
            self.remove(t)
