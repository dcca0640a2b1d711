"""Canonical labelling and isomorphism signatures of closed pseudomanifolds.

The canonical form is found by breadth-first relabelling from a starting
ordered facet, walking across codimension-one faces.  Only starting facets
whose vertex colours (an iterated degree refinement) are lexicographically
minimal are tried; the set of such starts is invariant under isomorphism, so
the minimum encoding over them is canonical.
"""
from __future__ import annotations

import hashlib
from collections import deque
from itertools import permutations

from .triangulation import Triangulation, is_connected, skey


def vertex_colours(T: Triangulation, rounds: int = 4) -> dict:
    """Isomorphism-invariant integer colour per vertex."""
    nbrs = {v: set() for v in T.vertices}
    for f in T.facets:
        for v in f:
            nbrs[v].update(f)
    for v in nbrs:
        nbrs[v].discard(v)
    cur = {v: (len(T.star_index[v]), len(nbrs[v])) for v in T.vertices}
    cur = _compress(cur)
    for _ in range(rounds):
        nxt = {v: (cur[v], tuple(sorted(cur[u] for u in nbrs[v]))) for v in T.vertices}
        nxt = _compress(nxt)
        if len(set(nxt.values())) == len(set(cur.values())):
            cur = nxt
            break
        cur = nxt
    return cur


def _compress(d: dict) -> dict:
    keys = sorted(set(d.values()))
    rank = {k: i for i, k in enumerate(keys)}
    return {v: rank[x] for v, x in d.items()}


def _walk(T: Triangulation, start: tuple, best: list | None):
    """Relabel from ``start``; returns (encoding, labelling) or None if worse than ``best``."""
    label = {v: i for i, v in enumerate(start)}
    nxt = len(start)
    first = frozenset(start)
    seen = {first}
    queue = deque([first])
    enc = []
    pos = 0
    smaller = False
    ridge = T.ridge_index
    while queue:
        f = queue.popleft()
        code = tuple(sorted(label[v] for v in f))
        if best is not None and not smaller:
            other = best[pos]
            if code > other:
                return None
            if code < other:
                smaller = True
        enc.append(code)
        pos += 1
        faces = sorted(((tuple(sorted(label[u] for u in f if u != v)), v) for v in f))
        for _, v in faces:
            r = f - {v}
            for g in ridge[r]:
                if g == f:
                    continue
                (u,) = g - r
                if u not in label:
                    label[u] = nxt
                    nxt += 1
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
    if best is not None and not smaller:
        return None  # equal encodings: keep the earlier one
    return enc, label


def canonical_labelling(T: Triangulation) -> tuple[list, dict]:
    """(canonical encoding, vertex -> canonical index)."""
    for r, fs in T.ridge_index.items():
        if len(fs) != 2:
            raise ValueError("canonical form needs a closed pseudomanifold")
    if not is_connected(T.facets):
        raise ValueError("canonical form needs a connected complex")
    col = vertex_colours(T)
    best_key = None
    starts = []
    for f in T.facets:
        for p in permutations(sorted(f, key=lambda v: skey([v]))):
            key = tuple(col[v] for v in p)
            if best_key is None or key < best_key:
                best_key = key
                starts = [p]
            elif key == best_key:
                starts.append(p)
    starts.sort(key=lambda p: tuple(skey([v]) for v in p))
    best = None
    best_label = None
    for p in starts:
        res = _walk(T, p, best)
        if res is not None:
            best, best_label = res
    return best, best_label


def iso_signature(T: Triangulation) -> str:
    enc, _ = canonical_labelling(T)
    h = hashlib.sha256(f"{T.dim}:{len(T.vertices)}:".encode())
    for code in enc:
        h.update(bytes(str(code), "ascii"))
    return f"d{T.dim}v{len(T.vertices)}f{len(T.facets)}:{h.hexdigest()[:40]}"


def isomorphism(T1: Triangulation, T2: Triangulation) -> dict | None:
    """A vertex bijection mapping ``T1`` onto ``T2``, or None."""
    if T1.dim != T2.dim or T1.f_vector != T2.f_vector:
        return None
    e1, l1 = canonical_labelling(T1)
    e2, l2 = canonical_labelling(T2)
    if e1 != e2:
        return None
    inv2 = {i: v for v, i in l2.items()}
    phi = {v: inv2[i] for v, i in l1.items()}
    assert T1.relabel(phi) == T2
    return phi


def isomorphic(T1: Triangulation, T2: Triangulation) -> dict | None:
    return isomorphism(T1, T2)
