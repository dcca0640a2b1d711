"""Edge contractions and expansions, and replayable move sequences.

``Contract(a, b)`` identifies ``b`` into ``a``: the closed star of the edge
``ab`` disappears and ``b`` is replaced by ``a`` everywhere else.
``Expand(v, w, side_b)`` is the inverse: the link triangles in ``side_b`` are
handed to the new vertex ``w`` and the edge ``vw`` is coned over the common
boundary (the equator) of the two sides.
"""
from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from .triangulation import (
    Triangulation,
    boundary_faces,
    closure,
    faces_of,
    fresh_label,
    is_ball,
    ordered,
    skey,
    vkey,
)


class MoveError(ValueError):
    """An illegal contraction or expansion."""

    def __init__(self, message, witness=None, index=None):
        super().__init__(message)
        self.witness = witness
        self.index = index


@dataclass(frozen=True)
class Contract:
    a: object
    b: object

    @property
    def removed(self):
        return self.b

    def relabel(self, phi):
        return Contract(phi[self.a], phi[self.b])


@dataclass(frozen=True)
class Expand:
    v: object
    w: object
    side_b: frozenset  # link simplices of v handed to w

    def relabel(self, phi):
        return Expand(phi[self.v], phi[self.w], frozenset(frozenset(phi[x] for x in s) for s in self.side_b))


Move = Contract | Expand


class Workspace:
    """Mutable triangulation used to apply long move sequences quickly."""

    def __init__(self, T: Triangulation):
        self.dim = T.dim
        self.facets = set()
        self.star = defaultdict(set)
        self.nbr = defaultdict(Counter)  # vertex -> neighbour -> number of facets on the edge
        self.tris = Counter()  # triangle -> number of facets containing it (dim 3 only)
        for f in T.facets:
            self._add(f)

    def snapshot(self) -> Triangulation:
        return Triangulation(self.facets, self.dim)

    @property
    def vertices(self):
        return [v for v, s in self.star.items() if s]

    def has_vertex(self, v) -> bool:
        return bool(self.star.get(v))

    def has_edge(self, a, b) -> bool:
        return self.nbr[a][b] > 0 if a in self.nbr else False

    def link(self, v) -> set:
        return {f - {v} for f in self.star.get(v, ())}

    def edge_degree(self, a, b) -> int:
        return self.nbr[a][b] if a in self.nbr else 0

    def link_witness(self, a, b):
        """A simplex of lk(a) n lk(b) missing from lk(ab), or None."""
        if self.dim == 3:
            return self._link_witness3(a, b)
        return self._link_witness_general(a, b)

    def _link_witness3(self, a, b):
        """Same answer as the general test, using incidence counts instead of closures."""
        na, nb = self.nbr[a], self.nbr[b]
        small, other = (a, b) if len(self.star[a]) <= len(self.star[b]) else (b, a)
        around = [f - {a, b} for f in self.star[small] if other in f]
        lab_v = {x for e in around for x in e}
        lab_e = set(around)
        common = {x for x in (na if len(na) <= len(nb) else nb) if na[x] and nb[x] and x not in (a, b)}
        bad_v = common - lab_v
        if bad_v:
            return min((frozenset([x]) for x in bad_v), key=skey)
        tris = self.tris
        bad_e = []
        cl = sorted(common, key=vkey)
        for i, x in enumerate(cl):
            for y in cl[i + 1:]:
                e = frozenset((x, y))
                if e not in lab_e and tris[e | {a}] and tris[e | {b}]:
                    bad_e.append(e)
        if bad_e:
            return min(bad_e, key=skey)
        bad_t = [frozenset(t) for t in combinations(cl, 3)
                 if frozenset(t) | {a} in self.facets and frozenset(t) | {b} in self.facets]
        if bad_t:
            return min(bad_t, key=skey)
        return None

    def _link_witness_general(self, a, b):
        sa = self.star.get(a, ())
        sb = self.star.get(b, ())
        la = closure(f - {a} for f in sa if b not in f)
        lb = closure(f - {b} for f in sb if a not in f)
        lab = closure(f - {a, b} for f in sa if b in f)
        bad = (la & lb) - lab
        if bad:
            return min(bad, key=lambda s: (len(s), skey(s)))
        return None

    def contract(self, a, b) -> Expand:
        if a == b or not self.has_edge(a, b):
            raise MoveError(f"{ordered([a, b])} is not an edge")
        wit = self.link_witness(a, b)
        if wit is not None:
            raise MoveError(
                f"link condition fails for edge ({a}, {b}): {list(ordered(wit))} lies in lk({a}) and lk({b}) but not in lk of the edge",
                witness=wit,
            )
        side_b = frozenset(f - {b} for f in self.star[b] if a not in f)
        for f in list(self.star[b]):
            self._remove(f)
            if a not in f:
                self._add((f - {b}) | {a})
        self.star.pop(b, None)
        self.nbr.pop(b, None)
        return Expand(a, b, side_b)

    def check_expand(self, m: Expand):
        v, w = m.v, m.w
        if not self.has_vertex(v):
            raise MoveError(f"vertex {v} does not exist")
        if self.has_vertex(w):
            raise MoveError(f"new vertex label {w} is already in use")
        lk = self.link(v)
        side_b = set(m.side_b)
        if not side_b <= lk:
            raise MoveError(f"side B is not made of link simplices of {v}")
        side_a = lk - side_b
        if not side_a or not side_b:
            raise MoveError("both sides of an expansion must be non-empty")
        k = self.dim - 1
        if not is_ball(side_a, k) or not is_ball(side_b, k):
            raise MoveError("expansion sides must be discs in the link")
        eq_a, eq_b = boundary_faces(side_a), boundary_faces(side_b)
        if eq_a != eq_b:
            raise MoveError("the two sides do not share their boundary")
        return side_b, eq_b

    def expand(self, m: Expand) -> Contract:
        side_b, equator = self.check_expand(m)
        v, w = m.v, m.w
        for s in side_b:
            self._remove(s | {v})
            self._add(s | {w})
        for e in equator:
            self._add(e | {v, w})
        return Contract(v, w)

    def apply(self, m: Move) -> Move:
        """Apply ``m`` and return its inverse."""
        if isinstance(m, Contract):
            return self.contract(m.a, m.b)
        return self.expand(m)

    def _remove(self, f):
        self.facets.remove(f)
        for v in f:
            self.star[v].discard(f)
        self._count(f, -1)

    def _add(self, f):
        f = frozenset(f)
        if f in self.facets:
            raise MoveError(f"facet {list(ordered(f))} would be duplicated")
        self.facets.add(f)
        for v in f:
            self.star[v].add(f)
        self._count(f, 1)

    def _count(self, f, d):
        for x, y in combinations(f, 2):
            self.nbr[x][y] += d
            self.nbr[y][x] += d
            if not self.nbr[x][y]:
                del self.nbr[x][y]
                del self.nbr[y][x]
        if self.dim == 3:
            for t in combinations(f, 3):
                t = frozenset(t)
                self.tris[t] += d
                if not self.tris[t]:
                    del self.tris[t]


def is_contractible(T: Triangulation, edge) -> bool:
    a, b = edge
    ws = Workspace(T)
    if not ws.has_edge(a, b):
        raise MoveError(f"{ordered(edge)} is not an edge")
    return ws.link_witness(a, b) is None


def contract(T: Triangulation, edge) -> tuple[Triangulation, Expand]:
    """Contract ``edge = (a, b)``, keeping ``a``; returns the inverse expansion."""
    a, b = edge
    ws = Workspace(T)
    inv = ws.contract(a, b)
    return ws.snapshot(), inv


def expand(T: Triangulation, m: Expand) -> Triangulation:
    ws = Workspace(T)
    ws.expand(m)
    return ws.snapshot()


def contractible_edges(T: Triangulation) -> list:
    ws = Workspace(T)
    out = []
    for e in sorted(T.faces(1), key=skey):
        a, b = ordered(e)
        if ws.link_witness(a, b) is None:
            out.append((a, b))
    return out


def link_order(link) -> list:
    """Deterministic numbering of link simplices used by the moves file."""
    return sorted(link, key=skey)


def enumerate_expansions(T: Triangulation, v, limit: int | None = None) -> list:
    """All legal expansions at ``v`` up to swapping the two sides.

    The side kept by ``v`` always contains the first link simplex in
    :func:`link_order`.  Sides are grown as connected sets of link simplices.
    """
    ws = Workspace(T)
    if not ws.has_vertex(v):
        raise MoveError(f"{v} is not a vertex")
    lk = link_order(ws.link(v))
    w = fresh_label(T.vertices)
    k = T.dim - 1
    anchor = lk[0]
    nbr = defaultdict(set)
    by_ridge = defaultdict(list)
    for s in lk:
        for r in faces_of(s, len(s) - 1):
            by_ridge[r].append(s)
    for ss in by_ridge.values():
        for s in ss:
            nbr[s].update(x for x in ss if x != s)
    rank = {s: i for i, s in enumerate(lk)}
    found = []
    seen = set()
    # connected sets not containing the anchor, grown from their minimal element
    for seed in lk[1:]:
        stack = [frozenset([seed])]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            found.append(cur)
            if limit is not None and len(found) >= limit:
                break
            for s in cur:
                for x in nbr[s]:
                    if x not in cur and x != anchor and rank[x] > rank[seed]:
                        stack.append(cur | {x})
        if limit is not None and len(found) >= limit:
            break
    out = []
    lkset = set(lk)
    for side_b in sorted(found, key=lambda s: sorted(rank[x] for x in s)):
        side_a = lkset - side_b
        if is_ball(side_b, k) and is_ball(side_a, k) and boundary_faces(side_a) == boundary_faces(side_b):
            out.append(Expand(v, w, side_b))
    return out


@dataclass
class MoveSequence:
    initial: Triangulation
    moves: list = field(default_factory=list)
    final_hash: str | None = None

    def __len__(self):
        return len(self.moves)

    @property
    def counts(self) -> dict:
        c = sum(1 for m in self.moves if isinstance(m, Contract))
        return {"contractions": c, "expansions": len(self.moves) - c, "total": len(self.moves)}


def replay(seq: MoveSequence, collect_inverses: bool = False):
    """Apply the moves in order; raises MoveError naming the failing index."""
    ws = Workspace(seq.initial)
    inverses = []
    for i, m in enumerate(seq.moves):
        try:
            inv = ws.apply(m)
        except MoveError as exc:
            raise MoveError(f"move {i} ({describe(m)}) is illegal: {exc}", witness=exc.witness, index=i) from exc
        inverses.append(inv)
    T = ws.snapshot()
    if seq.final_hash is not None and T.digest() != seq.final_hash:
        raise MoveError(f"replay ends at {T.digest()[:16]}, expected {seq.final_hash[:16]}", index=len(seq.moves))
    if collect_inverses:
        return T, inverses
    return T


def inverse(seq: MoveSequence) -> MoveSequence:
    """The formal inverse: starts where ``seq`` ends and returns to its start."""
    final, inverses = replay(seq, collect_inverses=True)
    return MoveSequence(final, list(reversed(inverses)), seq.initial.digest())


def concatenate(first: MoveSequence, second_moves: list) -> MoveSequence:
    return MoveSequence(first.initial, list(first.moves) + list(second_moves))


def transport(moves: list, start: Triangulation, phi: dict, target_start: Triangulation) -> list:
    """Rewrite ``moves`` (legal from ``start``) for ``target_start = phi(start)``.

    Vertices created along the way receive fresh labels in the target.
    """
    phi = dict(phi)
    used = set(target_start.vertices) | set(phi.values())
    nxt = fresh_label(used)
    out = []
    for m in moves:
        if isinstance(m, Expand):
            phi[m.w] = nxt
            nxt += 1
        out.append(m.relabel(phi))
    return out


def describe(m: Move) -> str:
    if isinstance(m, Contract):
        return f"C {m.a} {m.b}"
    return f"E {m.v} -> {m.w} ({len(m.side_b)} link simplices)"


def subdivision_moves(T: Triangulation) -> list:
    """Expansions carrying ``T`` to its barycentric subdivision.

    Every stellar subdivision of a simplex of positive dimension is one
    expansion at one of its vertices, so starring tetrahedra, then
    triangles, then edges gives #vertices + 4 #tets moves in dimension 3.
    """
    ws = Workspace(T)
    nxt = fresh_label(T.vertices)
    moves = []
    for k in range(T.dim, 0, -1):
        for s in sorted(T.faces(k), key=skey):
            v = ordered(s)[0]
            # the star of s in the current complex: facets containing all of s
            side_b = frozenset(f - {v} for f in ws.star[v] if s <= f)
            m = Expand(v, nxt, side_b)
            ws.expand(m)
            moves.append(m)
            nxt += 1
    return moves


def greedy_contractions(T: Triangulation, max_moves: int | None = None) -> MoveSequence:
    """Contract edges until none is legal, largest edge degree first.

    Ties go to the smaller edge in canonical order, and the smaller endpoint
    survives.  After a contraction only edges at vertices of the old star of
    the removed vertex are re-examined: no other link changed.
    """
    ws = Workspace(T)
    heap = []

    def push_edges(near):
        edges = {frozenset((x, y)) for x in near for y in ws.nbr.get(x, ())}
        for e in edges:
            a, b = ordered(e)
            heapq.heappush(heap, (-ws.edge_degree(a, b), skey((a, b)), a, b))

    for e in T.faces(1):
        a, b = ordered(e)
        heapq.heappush(heap, (-ws.edge_degree(a, b), skey((a, b)), a, b))
    moves = []
    while heap and (max_moves is None or len(moves) < max_moves):
        negdeg, _, a, b = heapq.heappop(heap)
        deg = ws.edge_degree(a, b)
        if deg == 0:
            continue
        if deg != -negdeg:
            heapq.heappush(heap, (-deg, skey((a, b)), a, b))
            continue
        if ws.link_witness(a, b) is not None:
            continue
        near = {x for f in ws.star[b] for x in f} - {b}
        ws.contract(a, b)
        moves.append(Contract(a, b))
        push_edges(near)
    return MoveSequence(T, moves, ws.snapshot().digest())
