"""Plain-text formats: .tri, moves files, .cell and .nsv.

All parsers are whitespace-insensitive; all writers emit a canonical form so
that equal values always serialise to identical bytes.
"""
from __future__ import annotations

from .cells import CellComplex
from .moves import Contract, Expand, MoveError, MoveSequence, Workspace, link_order
from .triangulation import Triangulation, vkey


class FormatError(ValueError):
    pass


def parse_label(tok: str):
    t = tok.strip()
    if t.lstrip("-").isdigit():
        return int(t)
    return t


def _lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def write_tri(T: Triangulation) -> str:
    word = {3: "tet", 2: "face"}.get(T.dim, "simplex")
    out = [f"tri {T.dim}"]
    out += [f"{word} " + " ".join(str(v) for v in f) for f in T.sorted_facets()]
    return "\n".join(out) + "\n"


def read_tri(text: str) -> Triangulation:
    lines = list(_lines(text))
    if not lines or lines[0].split()[0] != "tri":
        raise FormatError("missing 'tri <dim>' header")
    try:
        dim = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise FormatError("bad header: " + lines[0]) from None
    facets = []
    for line in lines[1:]:
        toks = line.split()
        if toks[0] not in ("tet", "face", "simplex"):
            raise FormatError(f"unexpected line: {line}")
        if len(toks) - 1 != dim + 1:
            raise FormatError(f"expected {dim + 1} labels: {line}")
        facets.append([parse_label(t) for t in toks[1:]])
    return Triangulation(facets, dim)


def format_move(ws: Workspace, m) -> str:
    if isinstance(m, Contract):
        return f"C {m.a} {m.b}"
    lk = link_order(ws.link(m.v))
    pos = {s: i for i, s in enumerate(lk)}
    try:
        b = sorted(pos[s] for s in m.side_b)
    except KeyError:
        raise MoveError(f"expansion at {m.v} names a simplex outside its link") from None
    a = sorted(set(range(len(lk))) - set(b))
    return f"E {m.v} | A: {' '.join(map(str, a))} | B: {' '.join(map(str, b))} | N: {m.w}"


def write_moves(seq: MoveSequence) -> str:
    """Serialise moves; link simplex ids refer to :func:`link_order` at each step."""
    ws = Workspace(seq.initial)
    out = []
    for i, m in enumerate(seq.moves):
        out.append(format_move(ws, m))
        try:
            ws.apply(m)
        except MoveError as exc:
            raise MoveError(f"move {i} is illegal: {exc}", index=i) from exc
    return "\n".join(out) + ("\n" if out else "")


def parse_move(ws: Workspace, line: str):
    toks = line.split()
    if toks[0] == "C":
        if len(toks) != 3:
            raise FormatError(f"bad contraction: {line}")
        return Contract(parse_label(toks[1]), parse_label(toks[2]))
    if toks[0] != "E":
        raise FormatError(f"unknown move: {line}")
    parts = [p.strip() for p in line[1:].split("|")]
    v = parse_label(parts[0])
    fields = {}
    for p in parts[1:]:
        key, _, val = p.partition(":")
        fields[key.strip()] = val.split()
    if "B" not in fields:
        raise FormatError(f"expansion without side B: {line}")
    lk = link_order(ws.link(v))
    try:
        side_b = frozenset(lk[int(i)] for i in fields["B"])
        if "A" in fields:
            side_a = {lk[int(i)] for i in fields["A"]}
            if side_a | side_b != set(lk) or side_a & side_b:
                raise FormatError(f"sides A and B do not partition the link of {v}: {line}")
    except (IndexError, ValueError):
        raise FormatError(f"bad link simplex id in: {line}") from None
    if "N" in fields and fields["N"]:
        w = parse_label(fields["N"][0])
    else:
        from .triangulation import fresh_label
        w = fresh_label(ws.vertices)
    return Expand(v, w, side_b)


def read_moves(text: str, initial: Triangulation) -> MoveSequence:
    """Parse a moves file against ``initial`` (ids are resolved while replaying)."""
    ws = Workspace(initial)
    moves = []
    for i, line in enumerate(_lines(text)):
        m = parse_move(ws, line)
        try:
            ws.apply(m)
        except MoveError as exc:
            raise MoveError(f"move {i} ({line}) is illegal: {exc}", witness=exc.witness, index=i) from exc
        moves.append(m)
    return MoveSequence(initial, moves)


def write_cell(C: CellComplex) -> str:
    out = []
    for k in range(C.dim + 1):
        for c in C.of_dim(k):
            bd = " ".join(str(b) for b in C.cells[c].boundary)
            out.append(f"cell {c} {k} : {bd}".rstrip())
    return "\n".join(out) + "\n"


def read_cell(text: str) -> CellComplex:
    cells = {}
    for line in _lines(text):
        head, sep, tail = line.partition(":")
        toks = head.split()
        if not sep or len(toks) != 3 or toks[0] != "cell":
            raise FormatError(f"bad cell line: {line}")
        cid = parse_label(toks[1])
        if cid in cells:
            raise FormatError(f"duplicate cell {cid}")
        cells[cid] = (int(toks[2]), tuple(parse_label(t) for t in tail.split()))
    return CellComplex(cells)


def write_nsv(x) -> str:
    n = len(x) // 7
    out = [f"nsv {n}"]
    for i in range(n):
        out.append(" ".join(str(int(c)) for c in x[7 * i: 7 * i + 7]))
    return "\n".join(out) + "\n"


def read_nsv(text: str) -> list:
    lines = list(_lines(text))
    if not lines or lines[0].split()[0] != "nsv":
        raise FormatError("missing 'nsv <n>' header")
    n = int(lines[0].split()[1])
    vals = []
    for line in lines[1:]:
        row = [int(t) for t in line.split()]
        if len(row) != 7 or min(row) < 0:
            raise FormatError(f"expected 7 non-negative integers: {line}")
        vals.extend(row)
    if len(vals) != 7 * n:
        raise FormatError(f"header announces {n} tetrahedra, found {len(vals) // 7}")
    return vals


def sort_labels(labels):
    return sorted(labels, key=vkey)
