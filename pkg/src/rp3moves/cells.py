"""Regular cell complexes as graded face posets.

A :class:`CellComplex` maps cell ids to ``(dim, boundary)`` where the boundary
is a tuple of ids one dimension lower (repeats are allowed on input and make
the complex irregular).  Simple regular complexes of dimension 3 (and 2) are
the duals of triangulations; their order complexes are triangulations.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from .isomorphism import isomorphism
from .moves import Contract, MoveSequence, Workspace, replay
from .triangulation import Triangulation, is_cycle, is_sphere, ordered, vkey


class CellError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    dim: int
    boundary: tuple


class CellComplex:
    def __init__(self, cells: dict):
        self.cells = {c: Cell(int(d), tuple(b)) for c, (d, b) in ((k, _pair(v)) for k, v in cells.items())}
        for cid, cell in self.cells.items():
            for b in cell.boundary:
                if b not in self.cells:
                    raise CellError(f"cell {cid} has unknown boundary cell {b}")
                if self.cells[b].dim != cell.dim - 1:
                    raise CellError(f"cell {cid} of dim {cell.dim} has boundary cell {b} of dim {self.cells[b].dim}")
            if cell.dim == 0 and cell.boundary:
                raise CellError(f"vertex {cid} has a boundary")

    def __eq__(self, other):
        return isinstance(other, CellComplex) and self.cells == other.cells

    def __repr__(self):
        return f"CellComplex(f={self.f_vector})"

    @cached_property
    def dim(self) -> int:
        return max((c.dim for c in self.cells.values()), default=-1)

    def of_dim(self, k: int) -> list:
        return sorted((c for c, cell in self.cells.items() if cell.dim == k), key=vkey)

    @cached_property
    def f_vector(self) -> tuple:
        return tuple(len(self.of_dim(k)) for k in range(self.dim + 1))

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    @cached_property
    def cofaces(self) -> dict:
        """cell -> list of cells having it in their boundary (with multiplicity)."""
        out = defaultdict(list)
        for c, cell in self.cells.items():
            for b in cell.boundary:
                out[b].append(c)
        return {c: sorted(out.get(c, []), key=vkey) for c in self.cells}

    def closure(self, c) -> set:
        """All faces of ``c`` including itself."""
        out = {c}
        stack = [c]
        while stack:
            x = stack.pop()
            for b in self.cells[x].boundary:
                if b not in out:
                    out.add(b)
                    stack.append(b)
        return out

    def vertices_of(self, c) -> list:
        return sorted((x for x in self.closure(c) if self.cells[x].dim == 0), key=vkey)

    def simplicity_issues(self) -> list:
        issues = []
        d = self.dim
        for k in range(d - 1):
            need = {0: d + 1, 1: 3}.get(k) if d == 3 else {0: 3}.get(k)
            if need is None:
                continue
            for c in self.of_dim(k):
                n = sum(1 for x in self.cofaces[c] if self.cells[x].dim == k + 1)
                if n != need:
                    issues.append(f"{'vertex' if k == 0 else 'edge'} {c} is adjacent to {n} cells of dimension {k + 1} (expected {need})")
        return issues

    def is_simple(self) -> bool:
        return not self.simplicity_issues()

    def regularity_issues(self) -> list:
        issues = []
        for c in sorted(self.cells, key=vkey):
            cell = self.cells[c]
            if cell.dim == 0:
                continue
            if len(set(cell.boundary)) != len(cell.boundary):
                issues.append(f"cell {c} has a repeated boundary cell")
                continue
            if cell.dim == 1:
                if len(cell.boundary) != 2:
                    issues.append(f"edge {c} does not have two distinct end points")
            elif cell.dim == 2:
                edges = [frozenset(self.cells[e].boundary) for e in cell.boundary]
                ok = len(set(edges)) == len(edges) if len(edges) > 2 else len(edges) == 2
                if len(edges) == 2:
                    ok = ok and edges[0] == edges[1] and len(edges[0]) == 2
                else:
                    ok = ok and is_cycle(edges)
                if not ok:
                    issues.append(f"2-cell {c} is not bounded by a simple closed curve")
            elif cell.dim == 3:
                tris = [frozenset((v, e, f)) for f in cell.boundary for e in self.cells[f].boundary
                        for v in self.cells[e].boundary]
                if len(set(tris)) != len(tris) or not is_sphere(tris, 2):
                    issues.append(f"3-cell {c} is not bounded by a 2-sphere")
        return issues

    def is_regular(self) -> bool:
        return not self.regularity_issues()

    def relabel(self, phi) -> "CellComplex":
        return CellComplex({phi[c]: (cell.dim, tuple(phi[b] for b in cell.boundary)) for c, cell in self.cells.items()})


def _pair(v):
    if isinstance(v, Cell):
        return v.dim, v.boundary
    return v


def dual(T: Triangulation) -> CellComplex:
    """Dual cell complex: a k-cell for every (dim-k)-simplex of ``T``."""
    d = T.dim
    name = {}
    for k in range(d + 1):
        for s in T.faces(k):
            name[s] = "*" + ".".join(str(v) for v in ordered(s))
    cells = {name[f]: (0, ()) for f in T.facets}
    # boundary of dual(s) = duals of simplices one dimension up that contain s
    up = defaultdict(list)
    for k in range(d):
        for t in T.faces(k + 1):
            for v in t:
                up[t - {v}].append(t)
    for s, ts in up.items():
        cells[name[s]] = (d - len(s) + 1, tuple(sorted((name[t] for t in ts), key=vkey)))
    return CellComplex(cells)


def order_complex(C: CellComplex, check: bool = True) -> Triangulation:
    """Triangulation whose simplices are the chains of the face poset."""
    if check:
        issues = C.regularity_issues()
        if issues:
            raise CellError("order complex needs a regular complex: " + issues[0])
    chains = []
    for top in C.of_dim(C.dim):
        stack = [(top,)]
        while stack:
            ch = stack.pop()
            low = ch[-1]
            if C.cells[low].dim == 0:
                chains.append(ch)
                continue
            for b in C.cells[low].boundary:
                stack.append(ch + (b,))
    return Triangulation(chains, C.dim)


@dataclass
class DeletionReport:
    deleted: object
    k: int
    removed: dict  # removed cell -> surviving cell it is absorbed into
    merged: list   # groups of merged cells (survivor first)
    euler_before: int
    euler_after: int
    f_before: tuple
    f_after: tuple
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "deleted": self.deleted,
            "boundary_vertices": self.k,
            "removed": {str(a): str(b) for a, b in sorted(self.removed.items(), key=lambda kv: vkey(kv[0]))},
            "merged": [list(map(str, g)) for g in self.merged],
            "euler_before": self.euler_before,
            "euler_after": self.euler_after,
            "f_before": list(self.f_before),
            "f_after": list(self.f_after),
            "notes": list(self.notes),
        }


def delete_cell(C: CellComplex, c) -> tuple[CellComplex, DeletionReport]:
    """Delete a codimension-one cell of a simple complex and clean up.

    The two top cells on either side of ``c`` merge.  Every proper face of
    ``c`` disappears; at each of them the two cofaces not in the closure of
    ``c`` merge into one cell.  The survivor of a merged group is its
    smallest id.  The result is checked to be simple and regular.
    """
    d = C.dim
    if c not in C.cells or C.cells[c].dim != d - 1:
        raise CellError(f"{c} is not a cell of dimension {d - 1}")
    tops = C.cofaces[c]
    if len(tops) != 2 or tops[0] == tops[1]:
        raise CellError(f"cell {c} does not separate two distinct {d}-cells")
    clo = C.closure(c)
    parent = {x: x for x in C.cells}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            lo, hi = sorted((rx, ry), key=vkey)
            parent[hi] = lo

    union(*tops)
    for tau in clo - {c}:
        others = [x for x in C.cofaces[tau] if x not in clo]
        if len(others) != 2:
            raise CellError(f"face {tau} of {c} has {len(others)} outside cofaces (complex not simple)")
        union(*others)
    removed = {}
    groups = defaultdict(list)
    for x in C.cells:
        if x in clo:
            continue
        groups[find(x)].append(x)
    new = {}
    for rep, members in groups.items():
        dim = C.cells[rep].dim
        bd = []
        seen = set()
        for m in members:
            for b in C.cells[m].boundary:
                if b in clo:
                    continue
                rb = find(b)
                if rb not in seen:
                    seen.add(rb)
                    bd.append(rb)
        new[rep] = (dim, tuple(sorted(bd, key=vkey)))
    # absorbed cells: merged non-representatives and the faces of c
    for x in C.cells:
        if x not in clo and find(x) != x:
            removed[x] = find(x)
    for tau in clo:
        if tau == c:
            removed[tau] = find(tops[0])
        else:
            # a face of c is absorbed into the merged cell one dimension up
            others = [x for x in C.cofaces[tau] if x not in clo]
            removed[tau] = find(others[0])
    C2 = CellComplex(new)
    merged = [sorted(m, key=vkey) for r, m in sorted(groups.items(), key=lambda kv: vkey(kv[0])) if len(m) > 1]
    k = sum(1 for x in clo if C.cells[x].dim == 0)
    rep = DeletionReport(c, k, removed, merged, C.euler_characteristic, C2.euler_characteristic,
                         C.f_vector, C2.f_vector)
    issues = C2.regularity_issues() + C2.simplicity_issues()
    if issues:
        raise CellError(f"deleting {c} leaves a complex that is not simple and regular: {issues[0]}")
    return C2, rep


def delete_2cell(C: CellComplex, c) -> tuple[CellComplex, DeletionReport]:
    if C.dim != 3:
        raise CellError("delete_2cell expects a 3-dimensional complex")
    return delete_cell(C, c)


@dataclass
class Lemma4Result:
    sequence: MoveSequence | None
    k: int
    after: CellComplex
    report: DeletionReport
    method: str
    diagnostic: str = ""

    @property
    def ok(self) -> bool:
        return self.sequence is not None


def lemma4_sequence(C1: CellComplex, c, search_budget: int = 20000) -> Lemma4Result:
    """Contractions carrying order_complex(C1) to order_complex(C1 minus c).

    Every cell absorbed by the deletion is the barycentre of an order
    complex vertex, and each such vertex is contracted into the barycentre
    of the cell absorbing it.  A contraction is only legal once the two
    barycentres are adjacent and the link condition holds, so the order is
    found by depth-first search over the pending pairs, trying them in the
    order: the deleted cell, merged top cells, faces of c by decreasing
    dimension, then merged lower cells.  The count is 4k+2 for a 2-cell
    with k boundary vertices.
    """
    C2, rep = delete_2cell(C1, c) if C1.dim == 3 else delete_cell(C1, c)
    start = order_complex(C1)
    target = order_complex(C2)
    dim_of = C1.cells

    def rank(x):
        if x == c:
            group = 0
        elif x in C1.closure(c):
            group = 2
        elif dim_of[x].dim == C1.dim:
            group = 1
        else:
            group = 3
        return (group, -dim_of[x].dim, vkey(x))

    pending = sorted(rep.removed, key=rank)
    ws = Workspace(start)
    moves = []
    budget = [search_budget]

    def dfs(pending):
        if not pending:
            return True
        for i, x in enumerate(pending):
            budget[0] -= 1
            if budget[0] < 0:
                return False
            s = rep.removed[x]
            if not ws.has_edge(s, x) or ws.link_witness(s, x) is not None:
                continue
            inv = ws.contract(s, x)
            moves.append(Contract(s, x))
            if dfs(pending[:i] + pending[i + 1:]):
                return True
            moves.pop()
            ws.expand(inv)
        return False

    found = dfs(pending)
    if not found:
        return Lemma4Result(None, rep.k, C2, rep, "search",
                            f"no legal contraction order found within {search_budget} trials")
    seq = MoveSequence(start, moves)
    end = replay(seq)
    if end != target and isomorphism(end, target) is None:
        return Lemma4Result(None, rep.k, C2, rep, "search", "contraction order ends away from the target")
    seq.final_hash = end.digest()
    return Lemma4Result(seq, rep.k, C2, rep, "constructive")
