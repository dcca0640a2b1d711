"""Closed triangulated manifolds as abstract simplicial complexes.

A triangulation is stored by its top-dimensional simplices (facets), each a
frozenset of vertex labels.  Labels are ints or non-numeric strings; every
ordering in this package goes through :func:`vkey` so that mixed label sets
sort deterministically.
"""
from __future__ import annotations

import hashlib
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable

Label = Hashable
Simplex = frozenset


def vkey(v) -> tuple:
    """Sort key for vertex labels (ints before strings)."""
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, str(v))


def skey(s: Iterable) -> tuple:
    """Sort key for a simplex given as an iterable of labels."""
    return tuple(vkey(v) for v in sorted(s, key=vkey))


def ordered(s: Iterable) -> tuple:
    return tuple(sorted(s, key=vkey))


def fresh_label(used: Iterable) -> int:
    """Smallest non-negative int larger than every int label in ``used``."""
    top = -1
    for v in used:
        if isinstance(v, int) and v > top:
            top = v
    return top + 1


def faces_of(s: frozenset, size: int):
    return (frozenset(c) for c in combinations(s, size))


class Triangulation:
    """A pure simplicial complex given by its facets.

    Instances are immutable; derived data are computed lazily and cached.
    """

    def __init__(self, facets: Iterable[Iterable[Label]], dim: int | None = None):
        fs = frozenset(frozenset(f) for f in facets)
        sizes = {len(f) for f in fs}
        if len(sizes) > 1:
            raise ValueError(f"facets of mixed sizes {sorted(sizes)}")
        if dim is None:
            if not sizes:
                raise ValueError("empty triangulation needs an explicit dimension")
            dim = sizes.pop() - 1
        elif sizes and sizes.pop() != dim + 1:
            raise ValueError(f"facets do not have {dim + 1} vertices")
        for f in fs:
            for v in f:
                if not isinstance(v, (int, str)) or isinstance(v, bool):
                    raise TypeError(f"vertex label {v!r} is not an int or str")
                if isinstance(v, str) and (not v or v.lstrip("-").isdigit() or any(c.isspace() for c in v)):
                    raise ValueError(f"string label {v!r} must be a non-numeric token")
        self.facets: frozenset = fs
        self.dim: int = dim

    def __repr__(self):
        return f"Triangulation(dim={self.dim}, f={self.f_vector})"

    def __eq__(self, other):
        return isinstance(other, Triangulation) and self.facets == other.facets

    def __hash__(self):
        return hash(self.facets)

    def __len__(self):
        return len(self.facets)

    @cached_property
    def vertices(self) -> frozenset:
        return frozenset(v for f in self.facets for v in f)

    def faces(self, k: int) -> frozenset:
        """All ``k``-dimensional simplices."""
        return self._faces[k]

    @cached_property
    def _faces(self) -> dict:
        out = {}
        for k in range(self.dim + 1):
            out[k] = frozenset(s for f in self.facets for s in faces_of(f, k + 1))
        return out

    @cached_property
    def f_vector(self) -> tuple:
        return tuple(len(self.faces(k)) for k in range(self.dim + 1))

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    @cached_property
    def star_index(self) -> dict:
        """vertex -> set of facets containing it."""
        idx = defaultdict(set)
        for f in self.facets:
            for v in f:
                idx[v].add(f)
        return dict(idx)

    @cached_property
    def ridge_index(self) -> dict:
        """codimension-one face -> list of facets containing it."""
        idx = defaultdict(list)
        for f in self.facets:
            for r in faces_of(f, self.dim):
                idx[r].append(f)
        return dict(idx)

    def star(self, simplex: Iterable) -> list:
        s = frozenset(simplex)
        v = next(iter(s))
        return [f for f in self.star_index.get(v, ()) if s <= f]

    def link(self, simplex: Iterable) -> frozenset:
        """Facets of the link of ``simplex``."""
        s = frozenset(simplex)
        return frozenset(f - s for f in self.star(s))

    def degree(self, simplex: Iterable) -> int:
        return len(self.star(simplex))

    def relabel(self, mapping) -> "Triangulation":
        get = mapping.__getitem__ if hasattr(mapping, "__getitem__") else mapping
        return Triangulation((frozenset(get(v) for v in f) for f in self.facets), self.dim)

    def sorted_facets(self) -> list:
        return sorted((ordered(f) for f in self.facets), key=lambda t: tuple(vkey(v) for v in t))

    def digest(self) -> str:
        """Hash of the labelled complex (changes under relabelling)."""
        h = hashlib.sha256(f"tri {self.dim}\n".encode())
        for f in self.sorted_facets():
            h.update((" ".join(str(v) for v in f) + "\n").encode())
        return h.hexdigest()


def closure(facets: Iterable[frozenset]) -> set:
    """All non-empty faces of the given simplices."""
    out = set()
    for f in facets:
        for k in range(1, len(f) + 1):
            out.update(faces_of(f, k))
    return out


def is_connected(facets: Iterable[frozenset]) -> bool:
    facets = list(facets)
    if not facets:
        return True
    adj = defaultdict(set)
    for f in facets:
        for v in f:
            adj[v].add(f)
    seen = {facets[0]}
    queue = deque(seen)
    while queue:
        f = queue.popleft()
        for v in f:
            for g in adj[v]:
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
    return len(seen) == len(facets)


def euler(facets: Iterable[frozenset]) -> int:
    return sum((-1) ** (len(s) - 1) for s in closure(facets))


def is_cycle(edges: Iterable[frozenset]) -> bool:
    """True iff the edges form one simple closed curve."""
    edges = list(edges)
    if len(edges) < 3 or any(len(e) != 2 for e in edges):
        return False
    deg = defaultdict(int)
    for e in edges:
        for v in e:
            deg[v] += 1
    return all(d == 2 for d in deg.values()) and is_connected(edges)


def is_sphere(facets: Iterable[frozenset], dim: int) -> bool:
    """Combinatorial sphere test for dimension <= 2."""
    facets = list(facets)
    if dim == 0:
        return len(facets) == 2
    if dim == 1:
        return is_cycle(facets)
    if dim != 2:
        raise NotImplementedError("sphere test only below dimension 3")
    if not facets or any(len(f) != 3 for f in facets):
        return False
    count = defaultdict(int)
    for f in facets:
        for e in faces_of(f, 2):
            count[e] += 1
    if any(c != 2 for c in count.values()):
        return False
    if not is_connected(facets):
        return False
    # vertex links must be single cycles
    star = defaultdict(list)
    for f in facets:
        for v in f:
            star[v].append(f - {v})
    if not all(is_cycle(lk) for lk in star.values()):
        return False
    return euler(facets) == 2


def boundary_faces(facets: Iterable[frozenset]) -> set:
    """Codimension-one faces lying in exactly one of the given simplices."""
    count = defaultdict(int)
    for f in facets:
        for r in faces_of(f, len(f) - 1):
            count[r] += 1
    return {r for r, c in count.items() if c == 1}


def is_ball(facets: Iterable[frozenset], dim: int) -> bool:
    """Combinatorial ball test for dimension 1 (paths) and 2 (discs)."""
    facets = list(facets)
    if not facets or not is_connected(facets):
        return False
    if dim == 1:
        deg = defaultdict(int)
        for e in facets:
            for v in e:
                deg[v] += 1
        return sorted(deg.values()).count(1) == 2 and max(deg.values()) <= 2
    if dim != 2:
        raise NotImplementedError("ball test only for dimensions 1 and 2")
    count = defaultdict(int)
    for f in facets:
        for e in faces_of(f, 2):
            count[e] += 1
    if any(c > 2 for c in count.values()):
        return False
    bd = [e for e, c in count.items() if c == 1]
    return is_cycle(bd) and euler(facets) == 1


@dataclass
class ValidationReport:
    dim: int
    f_vector: tuple
    closed: bool = True
    manifold: bool = True
    connected: bool = True
    orientable: bool | None = None
    issues: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.closed and self.manifold and self.connected

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "f_vector": list(self.f_vector),
            "euler_characteristic": self.euler_characteristic,
            "closed": self.closed,
            "manifold": self.manifold,
            "connected": self.connected,
            "orientable": self.orientable,
            "valid": self.valid,
            "issues": list(self.issues),
        }


def orientation(T: Triangulation) -> dict | None:
    """Coherent orientation signs per facet, or None if non-orientable.

    A facet's sign is relative to its vertices in :func:`vkey` order; the
    ridge obtained by dropping the i-th vertex inherits sign (-1)**i times it.
    """
    signs = {}
    for start in T.facets:
        if start in signs:
            continue
        signs[start] = 1
        queue = deque([start])
        while queue:
            f = queue.popleft()
            of = ordered(f)
            for i, v in enumerate(of):
                r = f - {v}
                induced = signs[f] * (-1) ** i
                for g in T.ridge_index[r]:
                    if g == f:
                        continue
                    j = ordered(g).index(next(iter(g - r)))
                    want = -induced * (-1) ** j
                    if g in signs:
                        if signs[g] != want:
                            return None
                    else:
                        signs[g] = want
                        queue.append(g)
    return signs


def validate(T: Triangulation) -> ValidationReport:
    """Check closedness, the manifold condition and connectivity of ``T``."""
    rep = ValidationReport(T.dim, T.f_vector)
    if T.dim < 1:
        rep.closed = rep.manifold = False
        rep.issues.append("dimension must be at least 1")
        return rep
    for r, fs in sorted(T.ridge_index.items(), key=lambda kv: skey(kv[0])):
        if len(fs) != 2:
            rep.closed = False
            rep.issues.append(f"face {list(ordered(r))} lies in {len(fs)} facets (expected 2)")
    if not is_connected(T.facets):
        rep.connected = False
        rep.issues.append("complex is disconnected")
    if rep.closed and T.dim >= 2:
        for v in sorted(T.vertices, key=vkey):
            lk = list(T.link([v]))
            if T.dim == 2:
                ok = is_cycle(lk)
            elif T.dim == 3:
                ok = is_sphere(lk, 2)
            else:
                ok = True
                rep.issues.append("manifold check skipped above dimension 3")
            if not ok:
                rep.manifold = False
                rep.issues.append(f"link of vertex {v} is not a {T.dim - 1}-sphere")
    elif not rep.closed:
        rep.manifold = False
    if rep.closed:
        rep.orientable = orientation(T) is not None
    return rep
