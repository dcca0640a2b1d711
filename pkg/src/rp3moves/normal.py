"""Normal surfaces in standard (triangle and quad) coordinates.

Conventions.  Tetrahedra are numbered in :meth:`Triangulation.sorted_facets`
order and the vertices of each tetrahedron are numbered 0..3 in label order.
A tetrahedron contributes seven coordinates ``t0 t1 t2 t3 q0 q1 q2``: ``ti``
counts triangles cutting off vertex i and ``qj`` counts quads separating
{0, j+1} from the other two vertices.

Within a tetrahedron, copies of one disc type are stacked: triangle copy 0
is closest to its vertex and quad copy 0 is closest to vertex 0's side.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .triangulation import Triangulation, ordered, skey

QUADS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


class NormalError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def quad_separating(i: int, j: int) -> list:
    """Quad types (0..2) separating local vertices i and j."""
    return [q for q, (a, b) in enumerate(QUADS) if (i in a) != (j in a)]


def quad_pairing(i: int, j: int) -> int:
    """The quad type that keeps local vertices i and j together."""
    return next(q for q, (a, b) in enumerate(QUADS) if {i, j} in (set(a), set(b)))


class NormalFrame:
    """Indexing data for normal coordinates on a fixed 3-dimensional triangulation."""

    def __init__(self, T: Triangulation):
        if T.dim != 3:
            raise NormalError("normal coordinates need a 3-dimensional triangulation")
        self.T = T
        self.tets = [tuple(ordered(f)) for f in T.sorted_facets()]
        self.n = len(self.tets)
        self.local = [{v: i for i, v in enumerate(t)} for t in self.tets]
        self.face_tets = defaultdict(list)
        for ti, t in enumerate(self.tets):
            for opp in range(4):
                face = frozenset(t) - {t[opp]}
                self.face_tets[face].append((ti, opp))
        self.faces = sorted(self.face_tets, key=skey)
        self.edges = sorted(T.faces(1), key=skey)
        self.edge_home = {}
        for ti, t in enumerate(self.tets):
            for a, b in combinations(t, 2):
                self.edge_home.setdefault(frozenset((a, b)), ti)

    def arc_terms(self, ti: int, face, p) -> list:
        """Coordinates of tetrahedron ``ti`` whose discs leave an arc around corner ``p`` of ``face``."""
        t = self.tets[ti]
        loc = self.local[ti]
        s = next(v for v in t if v not in face)
        return [7 * ti + loc[p], 7 * ti + 4 + quad_pairing(loc[p], loc[s])]

    def edge_terms(self, edge, ti: int | None = None) -> list:
        ti = self.edge_home[frozenset(edge)] if ti is None else ti
        loc = self.local[ti]
        i, j = sorted(loc[v] for v in edge)
        return [7 * ti + i, 7 * ti + j] + [7 * ti + 4 + q for q in quad_separating(i, j)]

    def matching_matrix(self) -> np.ndarray:
        """Rows: (face in canonical order) x (corner in label order); tet A minus tet B."""
        rows = []
        for face in self.faces:
            pair = self.face_tets[face]
            if len(pair) != 2:
                raise NormalError(f"face {list(ordered(face))} is not shared by two tetrahedra")
            (ta, _), (tb, _) = pair
            for p in ordered(face):
                row = np.zeros(7 * self.n, dtype=np.int64)
                for c in self.arc_terms(ta, face, p):
                    row[c] += 1
                for c in self.arc_terms(tb, face, p):
                    row[c] -= 1
                rows.append(row)
        return np.array(rows, dtype=np.int64).reshape(len(rows), 7 * self.n)

    def weight_functional(self) -> np.ndarray:
        w = np.zeros(7 * self.n, dtype=np.int64)
        for e in self.edges:
            for c in self.edge_terms(e):
                w[c] += 1
        return w

    def euler_functional(self) -> np.ndarray:
        """chi = points - arcs + discs as a linear functional."""
        chi = self.weight_functional().copy()
        for face in self.faces:
            ta, _ = self.face_tets[face][0]
            for p in face:
                for c in self.arc_terms(ta, face, p):
                    chi[c] -= 1
        chi += 1
        return chi

    def vertex_link(self, v) -> np.ndarray:
        x = np.zeros(7 * self.n, dtype=np.int64)
        for ti, t in enumerate(self.tets):
            if v in self.local[ti]:
                x[7 * ti + self.local[ti][v]] = 1
        return x


_FRAMES: dict = {}


def frame(T: Triangulation) -> NormalFrame:
    key = T.digest()
    if key not in _FRAMES:
        if len(_FRAMES) > 16:
            _FRAMES.clear()
        _FRAMES[key] = NormalFrame(T)
    return _FRAMES[key]


def matching_system(T: Triangulation) -> np.ndarray:
    return frame(T).matching_matrix()


@dataclass(frozen=True)
class NormalCoordinates:
    T: Triangulation
    x: tuple

    def __post_init__(self):
        if len(self.x) != 7 * len(self.T.facets):
            raise NormalError(f"expected {7 * len(self.T.facets)} coordinates, got {len(self.x)}")
        if any(c < 0 for c in self.x):
            raise NormalError("normal coordinates must be non-negative")

    @classmethod
    def of(cls, T: Triangulation, x) -> "NormalCoordinates":
        return cls(T, tuple(int(c) for c in x))

    def array(self) -> np.ndarray:
        return np.array(self.x, dtype=np.int64)

    @property
    def weight(self) -> int:
        return int(frame(self.T).weight_functional() @ self.array())

    @property
    def euler_characteristic(self) -> int:
        return int(frame(self.T).euler_functional() @ self.array())

    def __add__(self, other):
        return haken_sum(self, other)

    def is_zero(self) -> bool:
        return not any(self.x)


def quad_types(x) -> dict:
    """tet index -> set of quad types with a nonzero coordinate."""
    out = {}
    for ti in range(len(x) // 7):
        qs = {q for q in range(3) if x[7 * ti + 4 + q]}
        if qs:
            out[ti] = qs
    return out


def admissibility_witness(x) -> int | None:
    for ti, qs in quad_types(x).items():
        if len(qs) > 1:
            return ti
    return None


def satisfies_matching(T: Triangulation, x) -> bool:
    return not np.any(matching_system(T) @ np.asarray(x, dtype=np.int64))


def is_admissible(v: NormalCoordinates) -> bool:
    return admissibility_witness(v.x) is None and satisfies_matching(v.T, v.x)


def compatibility_witness(x, y) -> int | None:
    """A tetrahedron where ``x`` and ``y`` use different quad types, or None."""
    qx, qy = quad_types(x), quad_types(y)
    for ti in sorted(set(qx) & set(qy)):
        if qx[ti] != qy[ti]:
            return ti
    return None


def haken_sum(a: NormalCoordinates, b: NormalCoordinates) -> NormalCoordinates:
    if a.T.digest() != b.T.digest():
        raise NormalError("summands live on different triangulations")
    for v in (a, b):
        if not is_admissible(v):
            raise NormalError("summands must be admissible")
    ti = compatibility_witness(a.x, b.x)
    if ti is not None:
        raise NormalError(f"incompatible quad types in tetrahedron {ti}", witness=ti)
    return NormalCoordinates(a.T, tuple(p + q for p, q in zip(a.x, b.x)))


def edge_weights(v: NormalCoordinates) -> dict:
    fr = frame(v.T)
    return {e: sum(v.x[c] for c in fr.edge_terms(e)) for e in fr.edges}


# -- reconstruction -----------------------------------------------------------


@dataclass
class Component:
    vector: NormalCoordinates
    euler_characteristic: int
    orientable: bool
    two_sided: bool
    weight: int

    def as_dict(self) -> dict:
        return {"euler_characteristic": self.euler_characteristic, "orientable": self.orientable,
                "two_sided": self.two_sided, "weight": self.weight}


@dataclass
class ReconstructedSurface:
    discs: int
    arcs: int
    points: int
    components: list = field(default_factory=list)

    @property
    def euler_characteristic(self) -> int:
        return self.points - self.arcs + self.discs

    @property
    def orientable(self) -> bool:
        return all(c.orientable for c in self.components)

    @property
    def weight(self) -> int:
        return self.points

    @property
    def connected(self) -> bool:
        return len(self.components) == 1

    def as_dict(self) -> dict:
        return {"discs": self.discs, "arcs": self.arcs, "points": self.points,
                "euler_characteristic": self.euler_characteristic, "orientable": self.orientable,
                "weight": self.weight, "components": [c.as_dict() for c in self.components]}


def _disc_corners(fr: NormalFrame, x, ti: int, kind: int, copy: int) -> list:
    """Corners of one disc in cyclic order, as (edge, position from the smaller end)."""
    t = fr.tets[ti]
    base = 7 * ti

    def point(i, j):
        a, b = (i, j) if i < j else (j, i)  # local order agrees with label order
        before = x[base + a]
        if kind < 4:
            if kind == a:
                pos = copy
            else:
                pos = before + sum(x[base + 4 + q] for q in quad_separating(a, b)) + (x[base + b] - 1 - copy)
        else:
            q = kind - 4
            n = x[base + kind]
            pos = before + (copy if a in QUADS[q][0] else n - 1 - copy)
        return frozenset((t[a], t[b])), pos

    if kind < 4:
        others = [k for k in range(4) if k != kind]
        return [point(kind, k) for k in others]
    (a, b), (c, d) = QUADS[kind - 4]
    return [point(a, c), point(a, d), point(b, d), point(b, c)]


def reconstruct(v: NormalCoordinates) -> ReconstructedSurface:
    """Build the disc structure of ``v`` and read off its topology."""
    if not is_admissible(v):
        raise NormalError("only admissible vectors describe embedded surfaces")
    fr = frame(v.T)
    x = v.x
    discs = []
    for ti in range(fr.n):
        for kind in range(7):
            for copy in range(x[7 * ti + kind]):
                discs.append((ti, kind, copy, _disc_corners(fr, x, ti, kind, copy)))
    # arcs: two consecutive corners of a disc lie on one face
    arc_owner = defaultdict(list)
    for d, (ti, kind, copy, corners) in enumerate(discs):
        m = len(corners)
        for i in range(m):
            p, q = corners[i], corners[(i + 1) % m]
            arc_owner[frozenset((p, q))].append((d, p, q))
    parent = list(range(len(discs)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    adj = defaultdict(list)
    for arc, owners in arc_owner.items():
        if len(owners) != 2:
            raise NormalError(f"normal arc shared by {len(owners)} discs; matching equations fail")
        (d1, p1, q1), (d2, p2, q2) = owners
        same_dir = p1 == p2
        adj[d1].append((d2, same_dir, arc))
        adj[d2].append((d1, same_dir, arc))
        parent[find(d1)] = find(d2)
    points = {c for *_, corners in discs for c in corners}
    groups = defaultdict(list)
    for d in range(len(discs)):
        groups[find(d)].append(d)
    comps = []
    for root in sorted(groups, key=lambda r: groups[r][0]):
        members = groups[root]
        vec = [0] * len(x)
        for d in members:
            ti, kind, _, _ = discs[d]
            vec[7 * ti + kind] += 1
        cv = NormalCoordinates(v.T, tuple(vec))
        orientable = _two_colour(members, adj, lambda d, e, same, arc: same)
        two_sided = _two_colour(members, adj, lambda d, e, same, arc: _side_flip(fr, discs, d, e, arc))
        comps.append(Component(cv, cv.euler_characteristic, orientable, two_sided, cv.weight))
    return ReconstructedSurface(len(discs), len(arc_owner), len(points), comps)


def _two_colour(members, adj, flip) -> bool:
    """Propagate a +/-1 label across glued discs; False on a contradiction."""
    sign = {members[0]: 1}
    stack = [members[0]]
    while stack:
        d = stack.pop()
        for e, same, arc in adj[d]:
            want = -sign[d] if flip(d, e, same, arc) else sign[d]
            if e not in sign:
                sign[e] = want
                stack.append(e)
            elif sign[e] != want:
                return False
    return True


def _positive_vertices(fr: NormalFrame, disc) -> set:
    """Vertices (labels) on the chosen positive side of a disc in its tetrahedron."""
    ti, kind, _, _ = disc
    t = fr.tets[ti]
    if kind < 4:
        return {t[kind]}
    return {t[i] for i in QUADS[kind - 4][0]}


def _side_flip(fr, discs, d, e, arc) -> bool:
    """True when the positive sides of d and e disagree on their common face."""
    p, q = tuple(arc)
    (e1, _), (e2, _) = p, q
    corner = next(iter(e1 & e2))
    return (corner in _positive_vertices(fr, discs[d])) != (corner in _positive_vertices(fr, discs[e]))


def components(v: NormalCoordinates) -> list:
    return [c.vector for c in reconstruct(v).components]


def normally_isotopic(a: NormalCoordinates, b: NormalCoordinates) -> bool:
    return a.T.digest() == b.T.digest() and a.x == b.x


# -- fundamental surfaces -----------------------------------------------------


@dataclass
class FundamentalResult:
    surfaces: list
    complete: bool
    bound: int
    over_bound: int
    certified_bound: int | None

    def as_dict(self) -> dict:
        return {"count": len(self.surfaces), "complete": self.complete, "bound": self.bound,
                "extensions_over_bound": self.over_bound, "certified_bound": self.certified_bound}


def _cycle_row(fr: NormalFrame, e, u, around) -> dict:
    """Sum of q_a - q_b over the faces met while walking once around edge e."""
    faces = {ti: [frozenset(fr.tets[ti]) - {x} for x in fr.tets[ti] if x not in e] for ti in around}
    row = defaultdict(int)
    start = around[0]
    cur, face = start, faces[start][0]
    while True:
        pair = [ti for ti, _ in fr.face_tets[face]]
        nxt = pair[0] if pair[1] == cur else pair[1]
        for ti, sgn in ((cur, 1), (nxt, -1)):
            s = next(v for v in fr.tets[ti] if v not in face)
            row[3 * ti + quad_pairing(fr.local[ti][u], fr.local[ti][s])] += sgn
        cur = nxt
        if cur == start:
            break
        face = faces[cur][0] if faces[cur][1] == face else faces[cur][1]
    return {k: v for k, v in row.items() if v}


def _search_order(n: int, row_tets: list) -> list:
    """Tetrahedron order that closes edge equations as early as possible."""
    placed, order = set(), []
    rows_of = defaultdict(list)
    for i, ts in enumerate(row_tets):
        for t in ts:
            rows_of[t].append(i)
    while len(order) < n:
        def score(t):
            closes = sum(1 for i in rows_of[t] if row_tets[i] <= placed | {t})
            touches = sum(1 for i in rows_of[t] if row_tets[i] & placed)
            return (-closes, -touches, t)
        t = min((t for t in range(n) if t not in placed), key=score)
        placed.add(t)
        order.append(t)
    return order


def quad_solutions(T: Triangulation, bound: int):
    """Admissible nonzero quad vectors (length 3n, entries <= bound) obeying the edge equations.

    Depth-first over tetrahedra; a branch is cut as soon as some equation
    can no longer reach zero with the quads still unassigned.
    """
    fr = frame(T)
    rows = [_cycle_row(fr, e, min(e, key=lambda v: skey([v])),
                       [ti for ti, t in enumerate(fr.tets) if e <= set(t)]) for e in fr.edges]
    rows = [r for r in rows if r]
    coef = []  # per row: tet -> coefficients of its three quads
    for r in rows:
        c = defaultdict(lambda: [0, 0, 0])
        for k, v in r.items():
            c[k // 3][k % 3] = v
        coef.append(dict(c))
    order = _search_order(fr.n, [frozenset(c) for c in coef])
    pos = {t: i for i, t in enumerate(order)}
    # rows touching each tet, with the attainable range of the tets after it
    checks = defaultdict(list)
    for i, c in enumerate(coef):
        ts = sorted(c, key=pos.get)
        lo = hi = 0
        rest = []
        for t in reversed(ts):
            rest.append((t, lo, hi))
            lo += min(0, *(bound * x for x in c[t]))
            hi += max(0, *(bound * x for x in c[t]))
        for t, lo_t, hi_t in rest:
            checks[t].append((i, c[t], lo_t, hi_t))
    psum = [0] * len(coef)
    q = [0] * (3 * fr.n)
    options = [(None, 0)] + [(j, v) for j in range(3) for v in range(1, bound + 1)]

    def rec(d):
        if d == fr.n:
            if any(q):
                yield tuple(q)
            return
        ti = order[d]
        for j, v in options:
            if j is not None:
                q[3 * ti + j] = v
                for i, c, _, _ in checks[ti]:
                    psum[i] += c[j] * v
            if all(lo <= -psum[i] <= hi for i, _, lo, hi in checks[ti]):
                yield from rec(d + 1)
            if j is not None:
                q[3 * ti + j] = 0
                for i, c, _, _ in checks[ti]:
                    psum[i] -= c[j] * v

    yield from rec(0)


def canonical_extension(T: Triangulation, q) -> tuple:
    """The standard vector with quads ``q`` and the fewest triangles (no vertex link summand)."""
    fr = frame(T)
    x = [0] * (7 * fr.n)
    for ti in range(fr.n):
        for j in range(3):
            x[7 * ti + 4 + j] = q[3 * ti + j]
    for v in T.vertices:
        tets = [ti for ti in range(fr.n) if v in fr.local[ti]]
        base = {tets[0]: 0}
        stack = [tets[0]]
        while stack:
            a = stack.pop()
            for face in (frozenset(fr.tets[a]) - {w} for w in fr.tets[a] if w != v):
                (t1, _), (t2, _) = fr.face_tets[face]
                b = t2 if t1 == a else t1
                qa = q[3 * a + quad_pairing(fr.local[a][v], fr.local[a][next(w for w in fr.tets[a] if w not in face)])]
                qb = q[3 * b + quad_pairing(fr.local[b][v], fr.local[b][next(w for w in fr.tets[b] if w not in face)])]
                val = base[a] + qa - qb
                if b in base:
                    if base[b] != val:
                        raise NormalError(f"quad vector fails the edge equations near vertex {v}")
                    continue
                base[b] = val
                stack.append(b)
        low = min(base.values())
        for ti, val in base.items():
            x[7 * ti + fr.local[ti][v]] = val - low
    return tuple(x)


def fundamental_surfaces(T: Triangulation, bound: int = 4, max_rays: int = 2000) -> FundamentalResult:
    """Admissible fundamental surfaces with every coordinate <= ``bound``.

    A fundamental surface with a quad is the canonical extension of its
    quad vector (otherwise a vertex link splits off), so the candidates are
    the vertex links plus canonical extensions of bounded quad solutions.
    Scanning them by increasing size, a candidate is kept unless it lies
    above one already kept.  The list is exact below the bound; ``complete``
    records whether the bound is certified to lose nothing (the certificate
    gives up past ``max_rays`` intermediate extreme rays).
    """
    fr = frame(T)
    cands = {tuple(int(c) for c in fr.vertex_link(v)) for v in T.vertices}
    over = 0
    for q in quad_solutions(T, bound):
        x = canonical_extension(T, q)
        if max(x) > bound:
            over += 1
            continue
        cands.add(x)
    kept = []
    for x in sorted(cands, key=lambda x: (sum(x), x)):
        a = np.array(x)
        if kept and (np.array(kept) <= a).all(axis=1).any():
            continue
        kept.append(a)
    out = sorted((NormalCoordinates.of(T, k) for k in kept), key=lambda v: (v.weight, v.x))
    certified = certified_bound(T, max_rays)
    complete = certified is not None and bound >= certified
    return FundamentalResult(out, complete, bound, over, certified)


def _filtered_dd(A, stride: int, offset: int, max_rays: int) -> list | None:
    """Extreme rays of {x >= 0, Ax = 0} with at most one quad per tetrahedron.

    Starts from the unit vectors of the orthant and cuts by one equation at
    a time.  Non-admissible rays are dropped as they appear, which is safe
    because the admissible region is a union of orthant faces.
    """
    N = A.shape[1]
    rays = [tuple(int(i == j) for i in range(N)) for j in range(N)]
    for row in A:
        row = [int(c) for c in row]
        nz = [i for i, c in enumerate(row) if c]
        val = [sum(row[i] * ray[i] for i in nz) for ray in rays]
        zero = [r for r, v in zip(rays, val) if v == 0]
        pos = [(r, v) for r, v in zip(rays, val) if v > 0]
        neg = [(r, v) for r, v in zip(rays, val) if v < 0]
        supp = [_support(r) for r in rays]
        new = []
        for p, vp in pos:
            sp = _support(p)
            for n, vn in neg:
                sn = _support(n)
                joint = sp | sn
                if _quad_clash(joint, N, stride, offset):
                    continue
                if any(s | joint == joint and s != sp and s != sn for s in supp):
                    continue
                c = [(-vn) * a + vp * b for a, b in zip(p, n)]
                new.append(_primitive(c))
        rays = zero + new
        if len(rays) > max_rays:
            return None
    return sorted(set(rays))


def admissible_extreme_rays(T: Triangulation, max_rays: int = 2000) -> list | None:
    """Admissible extreme rays of the standard matching cone, or None past ``max_rays``."""
    return _filtered_dd(matching_system(T), 7, 4, max_rays)


def quad_matching_system(T: Triangulation) -> np.ndarray:
    """Edge equations on quad coordinates (3 per tetrahedron)."""
    fr = frame(T)
    rows = []
    for e in fr.edges:
        r = _cycle_row(fr, e, min(e, key=lambda v: skey([v])), [ti for ti, t in enumerate(fr.tets) if e <= set(t)])
        if r:
            row = np.zeros(3 * fr.n, dtype=np.int64)
            for k, c in r.items():
                row[k] = c
            rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(rows), 3 * fr.n)


def quad_vertex_surfaces(T: Triangulation, max_rays: int = 2000) -> list | None:
    """Canonical extensions of the admissible extreme rays of the quad cone.

    Each is fundamental: a splitting would split its quad part into
    multiples of a primitive extreme vector, and a canonical extension has
    no vertex link summand.
    """
    rays = _filtered_dd(quad_matching_system(T), 3, 0, max_rays)
    if rays is None:
        return None
    return [NormalCoordinates.of(T, canonical_extension(T, q)) for q in rays]


def _support(r) -> int:
    m = 0
    for i, c in enumerate(r):
        if c:
            m |= 1 << i
    return m


def _quad_clash(mask: int, N: int, stride: int = 7, offset: int = 4) -> bool:
    for ti in range(N // stride):
        if bin((mask >> (stride * ti + offset)) & 7).count("1") > 1:
            return True
    return False


def _primitive(c) -> tuple:
    from math import gcd

    g = 0
    for x in c:
        g = gcd(g, x)
    return tuple(x // g for x in c) if g > 1 else tuple(c)


def certified_bound(T: Triangulation, max_rays: int = 2000) -> int | None:
    """A coordinate bound satisfied by every admissible fundamental surface, or None.

    Each such surface lies in a simplicial cone spanned by at most d
    admissible extreme rays (d = dimension of the solution space) with all
    coefficients below 1, so coordinate j is below the sum of the d largest
    ray values in that coordinate.
    """
    rays = admissible_extreme_rays(T, max_rays)
    if rays is None:
        return None
    A = matching_system(T)
    d = A.shape[1] - int(np.linalg.matrix_rank(A))
    best = 0
    for j in range(A.shape[1]):
        top = sorted((r[j] for r in rays), reverse=True)[:d]
        best = max(best, sum(top) - 1)
    return best


def theorem3_bound_holds(T: Triangulation, surfaces) -> tuple[bool, int]:
    """Check ||F|| < ||dN|| * 2^(18 n); dN is the union of the vertex links."""
    fr = frame(T)
    w = fr.weight_functional()
    dn = sum(int(w @ fr.vertex_link(v)) for v in T.vertices)
    limit = dn * 2 ** (18 * fr.n)
    return all(s.weight < limit for s in surfaces), dn


def decomposes(x, generators, cache=None) -> list | None:
    """Non-negative integer combination of ``generators`` equal to ``x`` (as indices), or None."""
    gens = [np.asarray(g, dtype=np.int64) for g in generators]
    cache = {} if cache is None else cache

    def go(v):
        key = v.tobytes()
        if key in cache:
            return cache[key]
        if not v.any():
            return []
        nz = int(np.flatnonzero(v)[0])
        res = None
        for i, g in enumerate(gens):
            if g[nz] and (g <= v).all():
                rest = go(v - g)
                if rest is not None:
                    res = [i] + rest
                    break
        cache[key] = res
        return res

    return go(np.asarray(x, dtype=np.int64))


def admissible_vectors(T: Triangulation, bound: int):
    """Every nonzero admissible matching solution with entries <= bound (brute force).

    Coordinates are assigned tetrahedron by tetrahedron, quads first; a
    matching row whose last variable is reached fixes that variable, so only
    the remaining ones are branched on.
    """
    fr = frame(T)
    A = fr.matching_matrix()
    N = A.shape[1]
    order = [7 * ti + k for ti in range(fr.n) for k in (4, 5, 6, 0, 1, 2, 3)]
    pos = {c: i for i, c in enumerate(order)}
    closing = defaultdict(list)
    for r in range(A.shape[0]):
        cols = sorted((int(c) for c in np.flatnonzero(A[r])), key=pos.get)
        closing[pos[cols[-1]]].append([(c, int(A[r, c])) for c in cols])
    x = [0] * N

    def forced(i):
        val = None
        for row in closing[i]:
            coef = row[-1][1]
            rest = sum(k * x[j] for j, k in row[:-1])
            if rest % coef:
                return -1
            v = -rest // coef
            if val is None:
                val = v
            elif v != val:
                return -1
        return val

    def rec(i):
        if i == N:
            if any(x):
                yield tuple(x)
            return
        c = order[i]
        ti, k = divmod(c, 7)
        quad_taken = k >= 4 and any(x[7 * ti + 4: c])
        if closing[i]:
            v = forced(i)
            choices = (v,) if 0 <= v <= bound and not (quad_taken and v) else ()
        else:
            choices = (0,) if quad_taken else range(bound + 1)
        for val in choices:
            x[c] = val
            yield from rec(i + 1)
        x[c] = 0

    yield from rec(0)


# -- projective planes, Kneser, sphere systems -------------------------------


@dataclass
class ProjectivePlaneResult:
    surface: NormalCoordinates | None
    status: str  # "found", "none", "incomplete"
    method: str
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"status": self.status, "method": self.method, **self.details}
        if self.surface is not None:
            out["weight"] = self.surface.weight
        return out


def _milp_min_weight(T: Triangulation, chi_value: int | None = None, quad: tuple | None = None,
                     time_limit: float | None = None):
    """Minimum-weight nonzero admissible vector, optionally with a fixed Euler
    characteristic or containing the quad ``(tet, type)``."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import csr_matrix, hstack

    fr = frame(T)
    A = fr.matching_matrix()
    n = fr.n
    N = 7 * n
    big = 4 * N  # generous cap on any coordinate of a vertex-like solution
    w = fr.weight_functional()
    chi = fr.euler_functional()
    # variables: x (N integers) then y (3n binaries choosing the quad type)
    Amat = csr_matrix(A)
    link = np.zeros((3 * n, N))
    ind = np.zeros((3 * n, 3 * n))
    pick = np.zeros((n, 3 * n))
    for ti in range(n):
        for q in range(3):
            link[3 * ti + q, 7 * ti + 4 + q] = 1
            ind[3 * ti + q, 3 * ti + q] = -big
            pick[ti, 3 * ti + q] = 1
    cons = [
        LinearConstraint(hstack([Amat, csr_matrix((A.shape[0], 3 * n))]), 0, 0),
        LinearConstraint(hstack([csr_matrix(link), csr_matrix(ind)]), -np.inf, 0),
        LinearConstraint(hstack([csr_matrix((n, N)), csr_matrix(pick)]), 0, 1),
        LinearConstraint(np.concatenate([w, np.zeros(3 * n)])[None, :], 1, np.inf),
    ]
    if chi_value is not None:
        cons.append(LinearConstraint(np.concatenate([chi, np.zeros(3 * n)])[None, :], chi_value, chi_value))
    if quad is not None:
        row = np.zeros(N + 3 * n)
        row[7 * quad[0] + 4 + quad[1]] = 1
        cons.append(LinearConstraint(row[None, :], 1, np.inf))
    c = np.concatenate([w, np.zeros(3 * n)]).astype(float)
    integrality = np.ones(N + 3 * n)
    bounds = Bounds(np.zeros(N + 3 * n), np.concatenate([np.full(N, big), np.ones(3 * n)]))
    opts = {"disp": False}
    if time_limit is not None:
        opts["time_limit"] = time_limit
    res = milp(c, constraints=cons, integrality=integrality, bounds=bounds, options=opts)
    if res.status == 0:
        return "found", NormalCoordinates.of(T, np.round(res.x[:N]).astype(np.int64))
    if res.status == 2:
        return "none", None
    return "incomplete", None


def is_fundamental_milp(v: NormalCoordinates) -> bool:
    """True when no y with 0 < y < v (coordinatewise, y != v) satisfies the matching equations."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    A = matching_system(v.T).astype(float)
    x = v.array()
    support = np.flatnonzero(x)
    As = A[:, support]
    ub = x[support].astype(float)
    total = float(ub.sum())
    cons = [LinearConstraint(As, 0, 0), LinearConstraint(np.ones((1, len(support))), 1, total - 1)]
    res = milp(np.zeros(len(support)), constraints=cons, integrality=np.ones(len(support)),
               bounds=Bounds(np.zeros(len(support)), ub), options={"disp": False})
    return res.status == 2


def quad_minimal_surfaces(T: Triangulation, quads=None, time_limit: float | None = 60.0) -> list:
    """Distinct minimum-weight admissible surfaces through each quad, plus the vertex links.

    A minimum-weight surface containing a given quad is fundamental: in any
    splitting one summand keeps that quad and weighs less.  This yields a
    certified set of fundamental surfaces where full enumeration is out of
    reach.  ``quads`` defaults to all (tet, type) pairs.
    """
    fr = frame(T)
    found = {tuple(int(c) for c in fr.vertex_link(v)) for v in T.vertices}
    if quads is None:
        quads = [(ti, j) for ti in range(fr.n) for j in range(3)]
    for ti, j in quads:
        if any(x[7 * ti + 4 + j] for x in found):
            continue  # already covered; fewer solver calls, same guarantee for what is kept
        status, v = _milp_min_weight(T, None, (ti, j), time_limit)
        if status == "found":
            found.add(v.x)
    return sorted((NormalCoordinates.of(T, x) for x in found), key=lambda v: (v.weight, v.x))


def _rank_gf2(rows) -> int:
    """Rank over GF(2) of integer rows given as Python ints (bitmasks)."""
    pivots = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                rank += 1
                break
            r ^= pivots[top]
    return rank


def euler_always_even(T: Triangulation) -> bool:
    """True when chi is even on every solution of the matching equations.

    Sufficient test: chi mod 2 lies in the span of the matching rows mod 2,
    so every integer solution (a mod-2 solution too) has even chi.
    """
    fr = frame(T)
    A = fr.matching_matrix() % 2
    chi = fr.euler_functional() % 2

    def mask(row):
        return sum(1 << int(i) for i in np.flatnonzero(row))

    rows = [mask(r) for r in A]
    return _rank_gf2(rows) == _rank_gf2(rows + [mask(chi)])


def find_projective_plane(T: Triangulation, method: str = "auto", bound: int = 4,
                          time_limit: float | None = 600.0) -> ProjectivePlaneResult:
    """Smallest-weight connected one-sided chi = 1 fundamental surface, if any.

    ``enumerate`` scans the bounded fundamental list.  ``milp`` minimises
    weight over admissible vectors with chi = 1, then certifies the optimum
    connected, non-orientable and fundamental.  ``auto`` picks enumeration
    for at most 10 tetrahedra.
    """
    if euler_always_even(T):
        return ProjectivePlaneResult(None, "none", "parity", {"reason": "chi is even on every solution"})
    if method == "auto":
        method = "enumerate" if len(T.facets) <= 10 else "milp"
    if method == "enumerate":
        res = fundamental_surfaces(T, bound)
        best = None
        for s in res.surfaces:
            if s.euler_characteristic != 1:
                continue
            r = reconstruct(s)
            if r.connected and not r.orientable:
                best = s
                break
        if best is not None:
            return ProjectivePlaneResult(best, "found", method, {"fundamental_complete": res.complete})
        return ProjectivePlaneResult(None, "none" if res.complete else "incomplete", method,
                                     {"fundamental_complete": res.complete})
    status, v = _milp_min_weight(T, 1, None, time_limit)
    if status != "found":
        return ProjectivePlaneResult(None, status, method, {})
    r = reconstruct(v)
    fundamental = is_fundamental_milp(v)
    details = {"connected": r.connected, "orientable": r.orientable, "fundamental": fundamental}
    if r.connected and not r.orientable and fundamental:
        return ProjectivePlaneResult(v, "found", method, details)
    return ProjectivePlaneResult(None, "incomplete", method, details)


@dataclass
class KneserReport:
    n: int
    threshold: int
    two_sided: int
    components: int
    duplicate: tuple | None
    exceeded: bool

    @property
    def ok(self) -> bool:
        return not self.exceeded or self.duplicate is not None

    def as_dict(self) -> dict:
        return {"tetrahedra": self.n, "threshold": self.threshold, "two_sided_components": self.two_sided,
                "components": self.components, "exceeded": self.exceeded,
                "duplicate_pair": list(self.duplicate) if self.duplicate else None, "ok": self.ok}


def kneser_check(v: NormalCoordinates) -> KneserReport:
    """Look for two normally isotopic two-sided components; required past 10n of them."""
    rec = reconstruct(v)
    n = len(v.T.facets)
    seen = {}
    dup = None
    two = [i for i, c in enumerate(rec.components) if c.two_sided]
    for i in two:
        key = rec.components[i].vector.x
        if key in seen:
            dup = (seen[key], i)
            break
        seen[key] = i
    rep = KneserReport(n, 10 * n, len(two), len(rec.components), dup, len(two) > 10 * n)
    if not rep.ok:
        raise NormalError("more than 10n two-sided components without a normally isotopic pair")
    return rep


def sphere_system(T: Triangulation, P: NormalCoordinates | None = None, bound: int = 2) -> list:
    """Pairwise compatible, pairwise distinct normal 2-spheres, vertex links first.

    Further connected two-sided spheres are taken in (weight, coordinates)
    order from the bounded fundamental list (up to 10 tetrahedra) or from
    the quad-minimal fundamental surfaces (up to 60), keeping only those
    compatible with everything chosen so far (and with ``P`` when given).
    """
    fr = frame(T)
    chosen = [NormalCoordinates.of(T, fr.vertex_link(v)) for v in sorted(T.vertices, key=lambda v: skey([v]))]
    if len(T.facets) <= 10:
        pool = fundamental_surfaces(T, bound).surfaces
    elif len(T.facets) <= 60:
        pool = quad_minimal_surfaces(T)
    else:
        pool = []
    if pool:
        for s in pool:
            if s.euler_characteristic != 2 or any(s.x == c.x for c in chosen):
                continue
            if P is not None and compatibility_witness(s.x, P.x) is not None:
                continue
            if any(compatibility_witness(s.x, c.x) is not None for c in chosen):
                continue
            r = reconstruct(s)
            if r.connected and r.components[0].two_sided:
                chosen.append(s)
    assert len(chosen) <= 10 * len(T.facets)
    return chosen
