"""Bidirectional breadth-first search in the move graph, up to isomorphism."""
from __future__ import annotations

from dataclasses import dataclass, field

from .isomorphism import iso_signature, isomorphism
from .moves import (Contract, MoveSequence, Workspace, contractible_edges, enumerate_expansions,
                    inverse, replay, transport)
from .triangulation import Triangulation, vkey


@dataclass
class SearchResult:
    status: str  # "found", "none_within_depth" (proved) or "exhausted" (budget hit)
    sequence: MoveSequence | None = None
    states: int = 0
    depth_reached: int = 0
    details: dict = field(default_factory=dict)

    @property
    def length(self) -> int | None:
        return None if self.sequence is None else len(self.sequence.moves)

    def as_dict(self) -> dict:
        return {"status": self.status, "length": self.length, "states": self.states,
                "depth_reached": self.depth_reached, **self.details}


def neighbours(T: Triangulation, kinds: str = "both"):
    """(move, result) pairs in canonical order; ``kinds`` is both, contract or expand."""
    if kinds in ("both", "contract"):
        for a, b in contractible_edges(T):
            ws = Workspace(T)
            ws.contract(a, b)
            yield Contract(a, b), ws.snapshot()
    if kinds in ("both", "expand"):
        for v in sorted(T.vertices, key=vkey):
            for m in enumerate_expansions(T, v):
                ws = Workspace(T)
                ws.expand(m)
                yield m, ws.snapshot()


class _Side:
    def __init__(self, T: Triangulation, kinds: str):
        sig = iso_signature(T)
        self.kinds = kinds
        self.rep = {sig: T}
        self.parent = {sig: None}  # sig -> (parent sig, move from parent rep to this rep)
        self.depth = {sig: 0}
        self.frontier = [sig]
        self.level = 0

    def path(self, sig) -> list:
        out = []
        while self.parent[sig] is not None:
            p, m = self.parent[sig]
            out.append(m)
            sig = p
        return out[::-1]


def bfs_distance(T1: Triangulation, T2: Triangulation, max_depth: int = 4, max_states: int = 20000,
                 kinds: str = "both") -> SearchResult:
    """Shortest move sequence from ``T1`` to a copy of ``T2`` within the budgets.

    ``kinds='expand'`` restricts the search to expansions from ``T1`` (the
    side grown from ``T2`` then uses contractions).  Levels are expanded
    whole, smaller frontier first, so the first meeting is a shortest path.
    """
    back = {"both": "both", "expand": "contract", "contract": "expand"}[kinds]
    A, B = _Side(T1, kinds), _Side(T2, back)
    states = 1 if A.frontier == B.frontier else 2
    if A.frontier[0] in B.rep:
        return _join(A, B, A.frontier[0], states, 0)
    while A.level + B.level < max_depth:
        if not A.frontier or not B.frontier:
            break
        side, other = (A, B) if len(A.frontier) <= len(B.frontier) else (B, A)
        nxt = []
        meet = None
        for sig in side.frontier:
            for m, S in neighbours(side.rep[sig], side.kinds):
                s2 = iso_signature(S)
                if s2 in side.rep:
                    continue
                side.rep[s2] = S
                side.parent[s2] = (sig, m)
                side.depth[s2] = side.level + 1
                nxt.append(s2)
                states += 1
                if s2 in other.rep:
                    d = side.level + 1 + other.depth[s2]
                    if meet is None or d < meet[0]:
                        meet = (d, s2)
                if states >= max_states and meet is None:
                    return SearchResult("exhausted", None, states, A.level + B.level,
                                        {"budget": "max_states"})
        side.frontier = nxt
        side.level += 1
        if meet is not None:
            return _join(A, B, meet[1], states, A.level + B.level)
    if not A.frontier or not B.frontier:
        return SearchResult("none_within_depth", None, states, A.level + B.level, {"reason": "component exhausted"})
    return SearchResult("none_within_depth", None, states, A.level + B.level)


def _join(A: _Side, B: _Side, sig, states, depth) -> SearchResult:
    fwd = A.path(sig)
    X = A.rep[sig]
    moves = list(fwd)
    bpath = B.path(sig)
    if bpath:
        Y = B.rep[sig]
        T2 = _root(B)
        back = inverse(MoveSequence(T2, bpath))
        phi = isomorphism(Y, X)
        moves += transport(back.moves, Y, phi, X)
    seq = MoveSequence(_root(A), moves)
    end = replay(seq)
    seq.final_hash = end.digest()
    return SearchResult("found", seq, states, depth)


def _root(side: _Side) -> Triangulation:
    sig = next(s for s, p in side.parent.items() if p is None)
    return side.rep[sig]
