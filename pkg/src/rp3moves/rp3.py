"""Standard triangulations of RP^3 built from decompositions of RP^2.

The regular neighbourhood of the projective plane is a twisted I-bundle.  Its
boundary sphere carries the orientation double cover of the decomposition
``Z``; each cell of ``Z`` becomes one cell of the bundle joining its two lifts
(vertices become fibre edges, edges become squares, 2-cells become prisms),
and the complementary ball is a single 3-cell.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .cells import CellComplex, CellError, lemma4_sequence, order_complex
from .constructions import RP2_6
from .homology import homology
from .isomorphism import iso_signature, isomorphism
from .moves import (Expand, MoveError, MoveSequence, Workspace, enumerate_expansions, expand,
                    greedy_contractions, inverse, replay, transport)
from .rp2 import RP2_7, barnette_endpoints, dual2, dual_issues, reduce
from .triangulation import Triangulation, ordered, validate, vkey


def _sign(c) -> str:
    return "+" if c > 0 else "-"


class _Orientations:
    """Local orientations of the primal triangles of ``Z`` and their gluing."""

    def __init__(self, Z: CellComplex):
        self.Z = Z
        self.faces_at = {}
        for v in Z.of_dim(0):
            fs = {f for e in Z.cofaces[v] for f in Z.cofaces[e]}
            self.faces_at[v] = tuple(sorted(fs, key=vkey))

    def direction(self, v, f, g, s) -> int:
        """Direction induced on primal edge {f, g} (f < g) by orientation s of triangle v."""
        tri = self.faces_at[v]
        i, j = tri.index(f), tri.index(g)
        return s * (1 if (i, j) in ((0, 1), (1, 2)) else -1)

    def across(self, e, v, s) -> tuple:
        """(w, s_w): the compatible orientation on the other end of edge e."""
        a, b = self.Z.cells[e].boundary
        w = b if a == v else a
        f, g = sorted(self.Z.cofaces[e], key=vkey)
        want = -self.direction(v, f, g, s)
        return w, want * self.direction(w, f, g, 1)


@dataclass
class StandardModel:
    Z: CellComplex
    complex: CellComplex
    origin: dict = field(default_factory=dict)  # cell id -> (kind, Z cell, sign)

    @property
    def triangulation(self) -> Triangulation:
        return order_complex(self.complex)

    def square(self, e) -> str:
        """The 2-cell of the bundle lying over edge ``e`` of Z."""
        return f"S{e}"


def build_standard(Z: CellComplex) -> StandardModel:
    """The simple regular RP^3 complex whose order complex is T(Z)."""
    issues = dual_issues(Z)
    if issues:
        raise CellError("input is not a simple decomposition dual to a triangulation: " + issues[0])
    ori = _Orientations(Z)
    cells, origin = {}, {}

    def add(cid, dim, bd, kind, src, sign=None):
        cells[cid] = (dim, tuple(sorted(bd, key=vkey)))
        origin[cid] = (kind, src, sign)

    lift_v = lambda v, s: f"V{v}{_sign(s)}"
    for v in Z.of_dim(0):
        for s in (1, -1):
            add(lift_v(v, s), 0, (), "lift", v, s)
        add(f"I{v}", 1, (lift_v(v, 1), lift_v(v, -1)), "fibre", v)

    def edge_lift(e, v, s):
        """Id of the lift of e through (v, s)."""
        lo = min(Z.cells[e].boundary, key=vkey)
        if v == lo:
            return f"E{e}{_sign(s)}"
        w, sw = ori.across(e, v, s)
        return f"E{e}{_sign(sw)}"

    for e in Z.of_dim(1):
        lo = min(Z.cells[e].boundary, key=vkey)
        for s in (1, -1):
            w, sw = ori.across(e, lo, s)
            add(f"E{e}{_sign(s)}", 1, (lift_v(lo, s), lift_v(w, sw)), "lift", e, s)
        a, b = Z.cells[e].boundary
        add(f"S{e}", 2, (f"E{e}+", f"E{e}-", f"I{a}", f"I{b}"), "square", e)

    lifted_faces = []
    for f in Z.of_dim(2):
        verts = Z.vertices_of(f)
        edges = list(Z.cells[f].boundary)
        for s0 in (1, -1):
            sign = {verts[0]: s0}
            stack = [verts[0]]
            while stack:
                v = stack.pop()
                for e in edges:
                    if v in Z.cells[e].boundary:
                        w, sw = ori.across(e, v, sign[v])
                        if w in sign:
                            if sign[w] != sw:
                                raise CellError(f"orientation around 2-cell {f} is inconsistent")
                        else:
                            sign[w] = sw
                            stack.append(w)
            bd = {edge_lift(e, ordered_endpoint(Z, e), sign[ordered_endpoint(Z, e)]) for e in edges}
            cid = f"F{f}{_sign(s0)}"
            add(cid, 2, bd, "lift", f, s0)
            lifted_faces.append(cid)
        add(f"P{f}", 3, [f"F{f}+", f"F{f}-"] + [f"S{e}" for e in edges], "prism", f)
    add("B", 3, lifted_faces, "ball", None)
    C = CellComplex(cells)
    problems = C.regularity_issues()
    if problems:
        raise CellError("bundle complex is not regular (is the input a projective plane?): " + problems[0])
    problems = C.simplicity_issues()
    if problems:
        raise CellError("bundle complex is not simple: " + problems[0])
    return StandardModel(Z, C, origin)


def ordered_endpoint(Z: CellComplex, e):
    return min(Z.cells[e].boundary, key=vkey)


@dataclass
class Certificate:
    """A self-verifying transformation record: replay reproduces ``sequence.final_hash``."""

    kind: str
    input: dict
    sequence: MoveSequence
    endpoint: str | None = None
    complete: bool = True
    stages: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)

    @property
    def counts(self) -> dict:
        return self.sequence.counts

    def verify(self) -> Triangulation:
        return replay(self.sequence)

    def as_dict(self, moves_ref: str | None = None) -> dict:
        from .io import write_moves, write_tri

        out = {
            "format": "rp3moves-certificate/1",
            "kind": self.kind,
            "input": self.input,
            "endpoint": self.endpoint,
            "complete": self.complete,
            "counts": self.counts,
            "stages": self.stages,
            "checks": self.checks,
            "bounds": self.bounds,
            "initial_hash": self.sequence.initial.digest(),
            "final_hash": self.sequence.final_hash,
            "initial": write_tri(self.sequence.initial),
        }
        if moves_ref is None:
            out["moves"] = write_moves(self.sequence)
        else:
            out["moves_file"] = moves_ref
        return out

    def to_json(self, moves_ref: str | None = None) -> str:
        return json.dumps(self.as_dict(moves_ref), indent=2, sort_keys=True) + "\n"


def certificate_from_dict(d: dict, moves_text: str | None = None) -> Certificate:
    from .io import read_moves, read_tri

    initial = read_tri(d["initial"])
    text = d.get("moves") if moves_text is None else moves_text
    if text is None:
        raise ValueError("certificate has no inline moves and no moves file was supplied")
    seq = read_moves(text, initial)
    seq.final_hash = d.get("final_hash")
    if d.get("initial_hash") and initial.digest() != d["initial_hash"]:
        raise MoveError("initial triangulation does not match its recorded hash")
    return Certificate(d["kind"], d.get("input", {}), seq, d.get("endpoint"), d.get("complete", True),
                       d.get("stages", []), d.get("checks", {}), d.get("bounds", {}))


def _append_block(ws: Workspace, current: Triangulation, block: MoveSequence) -> list:
    """Apply ``block`` (legal from a copy of ``current``) to ``ws`` after relabelling."""
    phi = isomorphism(block.initial, current)
    if phi is None:
        raise CellError("block does not start at a copy of the current triangulation")
    moves = transport(block.moves, block.initial, phi, current)
    for i, m in enumerate(moves):
        ws.apply(m)
    return moves


def deletion_block(Z: CellComplex, e) -> MoveSequence:
    """The 18 contractions that delete the square over ``e`` from T(Z)."""
    model = build_standard(Z)
    res = lemma4_sequence(model.complex, model.square(e))
    if not res.ok:
        raise CellError(f"square over {e}: {res.diagnostic}")
    return res.sequence


def lemma8_pipeline(Z: CellComplex) -> tuple[Certificate, str]:
    """Contract T(Z) to T(Z1) or T(Z2) following a Barnette reduction of ``Z``."""
    red = reduce(Z)
    T0 = build_standard(Z).triangulation
    ws = Workspace(T0)
    current = T0
    moves, stages = [], []
    for i, (Zi, e) in enumerate(zip(red.steps, red.deleted)):
        try:
            block = deletion_block(Zi, e)
            moves += _append_block(ws, current, block)
        except (CellError, MoveError) as exc:
            raise CellError(f"stage {i} (delete edge {e}): {exc}") from exc
        current = ws.snapshot()
        stages.append({"stage": i, "deleted_edge": str(e), "moves": len(block.moves)})
    end = build_standard(red.result).triangulation
    phi = isomorphism(current, end)
    seq = MoveSequence(T0, moves, current.digest())
    n_edges = len(Z.of_dim(1))
    cert = Certificate(
        "lemma8",
        {"decomposition_f_vector": list(Z.f_vector), "tetrahedra": len(T0.facets)},
        seq,
        red.endpoint,
        True,
        stages,
        {"endpoint_isomorphic": phi is not None,
         "exactly_18_per_deletion": len(moves) == 18 * len(red.deleted)},
        {"contractions": len(moves), "loose_bound_18_edges": 18 * n_edges},
    )
    if phi is None:
        raise CellError("pipeline endpoint is not isomorphic to the standard endpoint")
    return cert, red.endpoint


DATA = Path(__file__).parent / "data"
Z1Z2_MOVES = DATA / "z1z2.moves"


def standard_triangulation(which: str) -> Triangulation:
    z1, z2 = barnette_endpoints()
    return build_standard({"z1": z1, "z2": z2}[which]).triangulation


def _split_levels(T: Triangulation, depth: int) -> list:
    """Iso classes reachable by 0..depth primal vertex splits: [{sig: (surface, moves)}]."""
    levels = [{iso_signature(T): (T, [])}]
    for _ in range(depth):
        nxt = {}
        for sig in sorted(levels[-1]):
            S, path = levels[-1][sig]
            for v in sorted(S.vertices, key=vkey):
                for m in enumerate_expansions(S, v):
                    S2 = expand(S, m)
                    nxt.setdefault(iso_signature(S2), (S2, path + [m]))
        levels.append(nxt)
    return levels


def primal_z1_z2_path(forward: int = 4, backward: int = 3) -> MoveSequence:
    """Primal moves from the 6-vertex to the 7-vertex projective plane.

    ``forward`` vertex splits of the 6-vertex surface meet ``backward``
    splits of the 7-vertex one; the result is the forward splits followed
    by the inverted backward splits (edge contractions).
    """
    P6 = Triangulation(RP2_6, 2)
    P7 = Triangulation(RP2_7, 2)
    fwd = _split_levels(P6, forward)[-1]
    bwd = _split_levels(P7, backward)[-1]
    common = sorted(set(fwd) & set(bwd))
    if not common:
        raise CellError(f"no meeting point with {forward} insertions and {backward} deletions")
    X, xmoves = fwd[common[0]]
    Y, ymoves = bwd[common[0]]
    back = inverse(MoveSequence(P7, ymoves))
    phi = isomorphism(Y, X)
    moves = xmoves + transport(back.moves, Y, phi, X)
    seq = MoveSequence(P6, moves)
    end = replay(seq)
    assert isomorphism(end, P7) is not None
    seq.final_hash = end.digest()
    return seq


def _primal_edge(a, b) -> str:
    return "*" + ".".join(str(x) for x in ordered((a, b)))


def lift_primal_path(primal_seq: MoveSequence) -> MoveSequence:
    """Lift primal splits/contractions to 18-move blocks between standard triangulations."""
    ws_p = Workspace(primal_seq.initial)
    T0 = build_standard(dual2(primal_seq.initial)).triangulation
    ws = Workspace(T0)
    current = T0
    moves = []
    for m in primal_seq.moves:
        before = dual2(ws_p.snapshot())
        ws_p.apply(m)
        after = dual2(ws_p.snapshot())
        if isinstance(m, Expand):
            block = inverse(deletion_block(after, _primal_edge(m.v, m.w)))
        else:
            block = deletion_block(before, _primal_edge(m.a, m.b))
        moves += _append_block(ws, current, block)
        current = ws.snapshot()
    return MoveSequence(T0, moves, current.digest())


def search_z1_z2() -> MoveSequence:
    """Regenerate the T(Z1) -> T(Z2) sequence from scratch."""
    return lift_primal_path(primal_z1_z2_path())


def z1_z2_certificate(regenerate: bool = False) -> Certificate:
    """Certificate carrying T(Z1) to a copy of T(Z2), from frozen data unless ``regenerate``."""
    from .io import read_moves

    T1 = standard_triangulation("z1")
    if regenerate or not Z1Z2_MOVES.exists():
        seq = search_z1_z2()
        source = "search"
    else:
        seq = read_moves(Z1Z2_MOVES.read_text(), T1)
        source = "frozen"
    end = replay(seq)
    seq.final_hash = end.digest()
    phi = isomorphism(end, standard_triangulation("z2"))
    c = seq.counts
    blocks = len(seq.moves) // 18
    return Certificate(
        "z1z2",
        {"from": "T(Z1)", "to": "T(Z2)", "source": source},
        seq,
        "z2",
        phi is not None,
        [{"stage": i, "moves": 18} for i in range(blocks)],
        {"endpoint_isomorphic_to_T(Z2)": phi is not None, "blocks_of_18": len(seq.moves) == 18 * blocks},
        {"length": len(seq.moves), "limit": 126, "insertions": c["expansions"] // 18,
         "deletions": c["contractions"] // 18},
    )


def freeze_z1_z2(path: Path = Z1Z2_MOVES) -> str:
    from .io import write_moves

    text = write_moves(search_z1_z2())
    path.write_text(text)
    return text


class Rejected(ValueError):
    """Input outside the domain of an operation (e.g. fails the homology gate)."""


RP3_HOMOLOGY = "(Z, Z/2, 0, Z)"


def rp3_gate(T: Triangulation) -> None:
    rep = validate(T)
    if not rep.valid or T.dim != 3:
        raise Rejected("input is not a valid closed 3-manifold triangulation: " + "; ".join(rep.issues[:2]))
    if not rep.orientable:
        raise Rejected("input is not orientable")
    h = str(homology(T))
    if h != RP3_HOMOLOGY:
        raise Rejected(f"homology {h} is not that of RP^3")


@lru_cache(maxsize=None)
def registered_forms() -> dict:
    """signature -> (standard id, small form, moves from the small form to T(Z_i))."""
    out = {}
    for which in ("z1", "z2"):
        T = standard_triangulation(which)
        g = greedy_contractions(T)
        back = inverse(g)
        out.setdefault(iso_signature(back.initial), (which, back.initial, back.moves))
    return out


def _plateau_escape(ws: Workspace, current: Triangulation, trials_left: int, per_vertex: int):
    """One expansion followed by greedy contraction that lowers the tetrahedron count."""
    used = 0
    for v in sorted(current.vertices, key=vkey):
        for m in enumerate_expansions(current, v, limit=per_vertex):
            if used >= trials_left:
                return None, used
            used += 1
            S = expand(current, m)
            g = greedy_contractions(S)
            if len(S.facets) - sum(_tets_lost(S, g)) < len(current.facets):
                return [m] + g.moves, used
    return None, used


def _tets_lost(S: Triangulation, g: MoveSequence):
    ws = Workspace(S)
    for m in g.moves:
        yield ws.edge_degree(m.a, m.b)
        ws.apply(m)


def simplify_to_standard(T: Triangulation, budget: int = 5000, per_vertex: int = 400) -> Certificate:
    """Contract ``T`` towards T(Z1) or T(Z2); never claims success it cannot replay.

    Greedy contraction runs first.  When it stalls, expansions are tried in
    canonical order (at most ``per_vertex`` per vertex and ``budget`` in
    total), each followed by greedy contraction, and the first one that ends
    with fewer tetrahedra is kept.  Once the current triangulation matches a
    registered small form, its recorded moves lead to a standard one.
    """
    rp3_gate(T)
    sig_of = {iso_signature(standard_triangulation(w)): w for w in ("z1", "z2")}
    forms = registered_forms()
    ws = Workspace(T)
    current = T
    moves, stages = [], []
    used = 0
    endpoint = sig_of.get(iso_signature(T))
    while endpoint is None:
        g = greedy_contractions(current)
        for m in g.moves:
            ws.apply(m)
        moves += g.moves
        current = ws.snapshot()
        if g.moves or not stages:
            stages.append({"stage": "greedy", "moves": len(g.moves), "tetrahedra": len(current.facets)})
        sig = iso_signature(current)
        if sig in sig_of:
            endpoint = sig_of[sig]
            break
        if sig in forms:
            which, form, link = forms[sig]
            phi = isomorphism(form, current)
            tail = transport(link, form, phi, current)
            for m in tail:
                ws.apply(m)
            moves += tail
            current = ws.snapshot()
            stages.append({"stage": "registered_form", "moves": len(tail), "form": sig})
            endpoint = which
            break
        step, n = _plateau_escape(ws, current, budget - used, per_vertex)
        used += n
        if step is None:
            why = "budget exhausted" if used >= budget else "no improving expansion"
            stages.append({"stage": "plateau", "trials": n, "result": why})
            break
        for m in step:
            ws.apply(m)
        moves += step
        current = ws.snapshot()
        stages.append({"stage": "plateau", "trials": n, "moves": len(step), "tetrahedra": len(current.facets)})
    seq = MoveSequence(T, moves, current.digest())
    t = len(T.facets)
    length = len(moves)
    return Certificate(
        "simplify",
        {"tetrahedra": t, "f_vector": list(T.f_vector), "hash": T.digest()},
        seq,
        endpoint,
        endpoint is not None,
        stages,
        {"homology_gate": RP3_HOMOLOGY, "expansion_trials": used, "budget": budget},
        {"length": length, "theorem1_exponent": 27000 * t * t,
         "below_theorem1_bound": length.bit_length() <= 27000 * t * t},
    )
