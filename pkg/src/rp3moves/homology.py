"""Integral simplicial homology via Smith normal form of boundary matrices."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd

from .triangulation import Triangulation, ordered


@dataclass(frozen=True)
class HomologyProfile:
    """Free rank and torsion coefficients per dimension."""

    betti: tuple
    torsion: tuple  # tuple of tuples, each a divisibility chain of ints > 1

    def __str__(self):
        parts = []
        for b, t in zip(self.betti, self.torsion):
            terms = (["Z^%d" % b if b > 1 else "Z"] if b else []) + [f"Z/{q}" for q in t]
            parts.append(" + ".join(terms) if terms else "0")
        return "(" + ", ".join(parts) + ")"

    def as_dict(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion], "text": str(self)}


def smith_diagonal(rows: list[dict], ncols: int) -> list[int]:
    """Nonzero Smith invariants of a sparse integer matrix.

    ``rows`` are dicts column -> value and are consumed.  Unit pivots are
    eliminated sparsely first; whatever is left goes through a dense
    reduction.
    """
    rows = [dict(r) for r in rows if r]
    col_rows: dict[int, set] = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    alive = set(range(len(rows)))
    heap = [(len(r), i) for i, r in enumerate(rows)]
    heapq.heapify(heap)
    invariants = []
    stuck = set()
    while heap:
        n, i = heapq.heappop(heap)
        if i not in alive or n != len(rows[i]):
            continue
        r = rows[i]
        if not r:
            alive.discard(i)
            continue
        units = [c for c, v in r.items() if v in (1, -1)]
        if not units:
            stuck.add(i)
            continue
        c = min(units, key=lambda c: (len(col_rows[c]), c))
        pv = r[c]
        invariants.append(1)
        alive.discard(i)
        stuck.discard(i)
        for j in list(col_rows[c]):
            if j == i:
                continue
            rj = rows[j]
            f = rj[c] * pv  # pv is a unit, so rj - f*r clears column c
            for cc, vv in r.items():
                nv = rj.get(cc, 0) - f * vv
                if nv:
                    if cc not in rj:
                        col_rows[cc].add(j)
                    rj[cc] = nv
                elif cc in rj:
                    del rj[cc]
                    col_rows[cc].discard(j)
            stuck.discard(j)
            heapq.heappush(heap, (len(rj), j))
        for cc in r:
            col_rows[cc].discard(i)
        rows[i] = {}
    rest = [rows[i] for i in sorted(alive) if rows[i]]
    if rest:
        cols = sorted({c for r in rest for c in r})
        pos = {c: k for k, c in enumerate(cols)}
        dense = [[0] * len(cols) for _ in rest]
        for a, r in enumerate(rest):
            for c, v in r.items():
                dense[a][pos[c]] = v
        invariants.extend(dense_smith(dense))
    return invariants


def dense_smith(m: list[list[int]]) -> list[int]:
    """Nonzero invariant factors of a dense integer matrix (divisibility chain)."""
    a = [row[:] for row in m]
    nr = len(a)
    nc = len(a[0]) if a else 0
    diag = []
    t = 0
    while t < nr and t < nc:
        # smallest nonzero entry as pivot
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        done = False
            if done:
                # enforce divisibility with the remaining block
                bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest nonzero of row/column t into the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    # normalise into a divisibility chain
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            g = gcd(diag[i], diag[j])
            diag[i], diag[j] = g, diag[i] * diag[j] // g
    return diag


def boundary_rows(T: Triangulation, k: int) -> tuple[list[dict], int]:
    """Rows of the boundary map C_k -> C_{k-1}, one row per k-simplex."""
    lower = sorted(T.faces(k - 1), key=lambda s: ordered(s).__repr__())
    index = {s: i for i, s in enumerate(lower)}
    rows = []
    for s in T.faces(k):
        o = ordered(s)
        rows.append({index[s - {v}]: (-1) ** i for i, v in enumerate(o)})
    return rows, len(lower)


def homology(T: Triangulation) -> HomologyProfile:
    """Integral homology H_0 .. H_dim of ``T``."""
    d = T.dim
    ranks = [0] * (d + 2)
    tors = [()] * (d + 2)
    for k in range(1, d + 1):
        rows, ncols = boundary_rows(T, k)
        inv = smith_diagonal(rows, ncols)
        ranks[k] = len(inv)
        tors[k] = tuple(q for q in inv if q > 1)
    counts = T.f_vector
    betti = tuple(counts[k] - ranks[k] - ranks[k + 1] for k in range(d + 1))
    torsion = tuple(tors[k + 1] for k in range(d + 1))
    return HomologyProfile(betti, torsion)
