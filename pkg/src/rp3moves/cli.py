"""The ``p3`` command line.

Exit codes: 0 success, 1 input rejected, 2 budget exhausted before a
definite answer, 3 internal invariant failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from .cells import CellError, dual, lemma4_sequence, order_complex
from .constructions import barycentric_subdivision
from .homology import homology
from .isomorphism import iso_signature, isomorphism
from .moves import MoveError, replay
from .normal import (NormalCoordinates, NormalError, compatibility_witness, find_projective_plane,
                     fundamental_surfaces, haken_sum, is_admissible, kneser_check, reconstruct)
from .triangulation import validate

OK, REJECTED, INCOMPLETE, INVARIANT = 0, 1, 2, 3
log = logging.getLogger("p3")


class Rejection(Exception):
    pass


class Incomplete(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    budgets: dict = field(default_factory=dict)
    force: bool = False
    as_json: bool = False
    verbosity: int = 0
    seed: int | None = None

    def check(self):
        for k, v in self.budgets.items():
            if v <= 0:
                raise Rejection(f"budget {k} must be positive")
        ins = {Path(p).resolve() for p in self.inputs}
        for o in self.outputs:
            if o and Path(o).resolve() in ins and not self.force:
                raise Rejection(f"refusing to overwrite input {o} (use --force)")


class Reporter:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.data = {}
        self.lines = []

    def add(self, key, value, text=None):
        self.data[key] = value
        if text is not None:
            self.lines.append(text)

    def emit(self):
        if self.as_json:
            sys.stdout.write(json.dumps(self.data, indent=2, sort_keys=True, default=str) + "\n")
        else:
            for line in self.lines:
                sys.stdout.write(line + "\n")


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise Rejection(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def load_tri(path):
    try:
        return io.read_tri(_read(path))
    except (io.FormatError, ValueError) as exc:
        raise Rejection(f"{path}: {exc}") from None


def load_valid(path, dims=(2, 3)):
    T = load_tri(path)
    rep = validate(T)
    if not rep.valid or T.dim not in dims:
        raise Rejection(f"{path} is not a valid closed manifold triangulation: " + "; ".join(rep.issues[:3]))
    return T


def load_cell(path):
    try:
        return io.read_cell(_read(path))
    except (io.FormatError, ValueError, CellError) as exc:
        raise Rejection(f"{path}: {exc}") from None


def load_nsv(path, T=None):
    try:
        x = io.read_nsv(_read(path))
    except (io.FormatError, ValueError) as exc:
        raise Rejection(f"{path}: {exc}") from None
    if T is None:
        return x
    try:
        return NormalCoordinates.of(T, x)
    except NormalError as exc:
        raise Rejection(f"{path}: {exc}") from None


# -- simplicial core ----------------------------------------------------------


def cmd_validate(a, r):
    T = load_tri(a.file)
    rep = validate(T)
    r.add("report", rep.as_dict(), f"valid: {rep.valid}")
    r.lines.append(f"f-vector: {tuple(T.f_vector)}  euler: {rep.euler_characteristic}  orientable: {rep.orientable}")
    r.lines += [f"issue: {i}" for i in rep.issues]
    if not rep.valid:
        raise Rejection("triangulation is not valid")


def cmd_homology(a, r):
    T = load_valid(a.file)
    h = homology(T)
    r.add("homology", h.as_dict(), str(h))


def cmd_subdivide(a, r):
    T = load_valid(a.file)
    S = barycentric_subdivision(T)
    _write(a.emit, io.write_tri(S))
    r.add("facets", len(S.facets), None if a.emit in (None, "-") else f"{len(S.facets)} facets -> {a.emit}")


def cmd_iso(a, r):
    T1, T2 = load_valid(a.file1), load_valid(a.file2)
    phi = isomorphism(T1, T2)
    r.add("isomorphic", phi is not None, f"isomorphic: {phi is not None}")
    r.add("signatures", [iso_signature(T1), iso_signature(T2)])
    if phi is not None:
        r.add("map", {str(k): str(v) for k, v in sorted(phi.items(), key=lambda kv: str(kv[0]))})


def load_certificate(path):
    from .rp3 import certificate_from_dict

    try:
        d = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise Rejection(f"{path}: not JSON ({exc})") from None
    moves_text = None
    if "moves_file" in d:
        moves_text = _read(Path(path).parent / d["moves_file"])
    try:
        return certificate_from_dict(d, moves_text)
    except (io.FormatError, MoveError, ValueError, KeyError) as exc:
        raise Rejection(f"{path}: {exc}") from None


def cmd_replay(a, r):
    if a.moves is None:
        cert = load_certificate(a.file)
        seq = cert.sequence
    else:
        T = load_valid(a.file)
        try:
            seq = io.read_moves(_read(a.moves), T)
        except (io.FormatError, MoveError) as exc:
            raise Rejection(str(exc)) from None
        seq.final_hash = a.expect_hash
    try:
        end = replay(seq)
    except MoveError as exc:
        raise Rejection(str(exc)) from None
    r.add("moves", seq.counts, f"replayed {len(seq.moves)} moves ({seq.counts['contractions']} contractions, "
                               f"{seq.counts['expansions']} expansions)")
    r.add("final_hash", end.digest(), f"final hash: {end.digest()}")
    r.add("final_signature", iso_signature(end))
    if a.emit:
        _write(a.emit, io.write_tri(end))


def cmd_distance(a, r):
    from .search import bfs_distance

    T1, T2 = load_valid(a.file1), load_valid(a.file2)
    if str(homology(T1)) != str(homology(T2)):
        raise Rejection("inputs have different homology")
    res = bfs_distance(T1, T2, a.depth, a.states, a.kinds)
    r.add("result", res.as_dict(), f"status: {res.status}  length: {res.length}  states: {res.states}")
    if res.sequence is not None and a.emit:
        _write(a.emit, io.write_moves(res.sequence))
    if res.status == "exhausted":
        raise Incomplete("state budget exhausted")


# -- cell complexes -----------------------------------------------------------


def cmd_dual(a, r):
    T = load_valid(a.file)
    C = dual(T)
    _write(a.emit, io.write_cell(C))
    r.add("f_vector", list(C.f_vector))


def cmd_ordercx(a, r):
    C = load_cell(a.file)
    try:
        T = order_complex(C)
    except CellError as exc:
        raise Rejection(str(exc)) from None
    _write(a.emit, io.write_tri(T))
    r.add("facets", len(T.facets))


def cmd_del2(a, r):
    C = load_cell(a.file)
    cid = io.parse_label(a.cell)
    if cid not in C.cells or C.cells[cid].dim != C.dim - 1:
        raise Rejection(f"{a.cell} is not a codimension-one cell")
    try:
        res = lemma4_sequence(C, cid)
    except CellError as exc:
        raise Rejection(str(exc)) from None
    r.add("deletion", res.report.as_dict(), f"k = {res.k}  method: {res.method}")
    if not res.ok:
        r.add("diagnostic", res.diagnostic, f"no sequence: {res.diagnostic}")
        raise Incomplete(res.diagnostic)
    r.add("moves", len(res.sequence.moves), f"{len(res.sequence.moves)} contractions")
    if a.emit_moves:
        _write(a.emit_moves, io.write_moves(res.sequence))
    if a.emit_start:
        _write(a.emit_start, io.write_tri(res.sequence.initial))
    if a.emit:
        _write(a.emit, io.write_cell(res.after))


# -- normal surfaces ----------------------------------------------------------


def cmd_normal_enumerate(a, r):
    T = load_valid(a.file, (3,))
    res = fundamental_surfaces(T, a.bound)
    r.add("result", res.as_dict(), f"{len(res.surfaces)} fundamental surfaces; complete: {res.complete}")
    rows = []
    for i, s in enumerate(res.surfaces):
        rec = reconstruct(s)
        rows.append({"index": i, "weight": s.weight, "euler_characteristic": s.euler_characteristic,
                     "orientable": rec.orientable, "components": len(rec.components)})
        r.lines.append(f"  [{i}] weight {s.weight}  chi {s.euler_characteristic}  orientable {rec.orientable}")
        if a.emit_dir:
            _write(Path(a.emit_dir) / f"f{i:04d}.nsv", io.write_nsv(s.x))
    r.add("surfaces", rows)
    if not res.complete:
        raise Incomplete("coordinate bound not certified; list may be incomplete")


def _surface_report(v):
    rec = reconstruct(v)
    d = rec.as_dict()
    d["connected"] = rec.connected
    return d


def cmd_normal_euler(a, r):
    T = load_valid(a.file, (3,))
    v = load_nsv(a.nsv, T)
    if not is_admissible(v):
        raise Rejection("vector is not admissible")
    d = _surface_report(v)
    r.add("surface", d, f"chi {d['euler_characteristic']}  orientable {d['orientable']}  "
                        f"components {len(d['components'])}  weight {d['weight']}")


def cmd_normal_sum(a, r):
    x, y = load_nsv(a.x), load_nsv(a.y)
    if len(x) != len(y):
        raise Rejection("vectors have different lengths")
    if a.tri:
        T = load_valid(a.tri, (3,))
        try:
            s = haken_sum(NormalCoordinates.of(T, x), NormalCoordinates.of(T, y))
        except NormalError as exc:
            raise Rejection(str(exc)) from None
        z = s.x
        r.add("euler_characteristic", s.euler_characteristic, f"chi {s.euler_characteristic}  weight {s.weight}")
        r.add("weight", s.weight)
    else:
        ti = compatibility_witness(x, y)
        if ti is not None:
            raise Rejection(f"incompatible quad types in tetrahedron {ti}")
        z = [p + q for p, q in zip(x, y)]
    _write(a.emit, io.write_nsv(z))


def cmd_normal_findp2(a, r):
    T = load_valid(a.file, (3,))
    res = find_projective_plane(T, a.method, a.bound, a.time_limit)
    r.add("result", res.as_dict(), f"status: {res.status}  method: {res.method}")
    if res.surface is not None:
        r.lines.append(f"weight {res.surface.weight}")
        if a.emit:
            _write(a.emit, io.write_nsv(res.surface.x))
    if res.status == "incomplete":
        raise Incomplete("search did not reach a definite answer")


def cmd_normal_kneser(a, r):
    T = load_valid(a.file, (3,))
    v = load_nsv(a.nsv, T)
    if not is_admissible(v):
        raise Rejection("vector is not admissible")
    rep = kneser_check(v)
    r.add("report", rep.as_dict(), f"two-sided components {rep.two_sided} (threshold {rep.threshold}); "
                                   f"duplicate pair: {rep.duplicate}")


# -- RP^2 and RP^3 ------------------------------------------------------------


def cmd_rp2_dual(a, r):
    from .rp2 import dual2

    T = load_valid(a.file, (2,))
    Z = dual2(T)
    _write(a.emit, io.write_cell(Z))
    r.add("f_vector", list(Z.f_vector))


def cmd_rp2_reduce(a, r):
    from .rp2 import is_dual_to_triangulation, reduce, surface_invariants

    Z = load_cell(a.file)
    if Z.dim != 2 or not is_dual_to_triangulation(Z):
        raise Rejection("input is not a simple decomposition dual to a surface triangulation")
    res = reduce(Z, check_endpoint=True)
    chi, orient = surface_invariants(Z)
    r.add("deleted", [str(e) for e in res.deleted], f"deleted {len(res.deleted)} edges: {' '.join(map(str, res.deleted))}")
    r.add("endpoint", res.endpoint, f"endpoint: {res.endpoint}")
    r.add("surface", {"euler_characteristic": chi, "orientable": orient})
    if a.emit:
        _write(a.emit, io.write_cell(res.result))


def cmd_rp2_endpoints(a, r):
    from .rp2 import barnette_endpoints, primal

    out = Path(a.emit)
    for name, Z in zip(("z1", "z2"), barnette_endpoints()):
        _write(out / f"{name}.cell", io.write_cell(Z))
        _write(out / f"{name}.tri", io.write_tri(primal(Z)))
        r.add(name, list(Z.f_vector), f"{name}: f-vector {tuple(Z.f_vector)} -> {out / (name + '.cell')}")


def cmd_rp3_standard(a, r):
    from .rp3 import standard_triangulation

    T = standard_triangulation(a.which)
    _write(a.emit, io.write_tri(T))
    r.add("f_vector", list(T.f_vector))


def _emit_certificate(cert, path):
    path = Path(path)
    moves_name = path.with_suffix(".moves").name
    _write(path.parent / moves_name, io.write_moves(cert.sequence))
    _write(path, cert.to_json(moves_ref=moves_name))


def cmd_rp3_z1z2(a, r):
    from .rp3 import z1_z2_certificate

    cert = z1_z2_certificate(regenerate=a.regenerate)
    if not cert.complete:
        raise AssertionError("Z1 -> Z2 certificate does not end at T(Z2)")
    if a.emit:
        _write(a.emit, io.write_moves(cert.sequence))
    if a.cert:
        _emit_certificate(cert, a.cert)
    r.add("counts", cert.counts, f"{len(cert.sequence.moves)} moves ({cert.bounds['insertions']} insertions, "
                                 f"{cert.bounds['deletions']} deletions of 18 moves each)")
    r.add("checks", cert.checks)


def cmd_rp3_simplify(a, r):
    from .rp3 import Rejected, simplify_to_standard

    T = load_valid(a.file, (3,))
    try:
        cert = simplify_to_standard(T, a.budget)
    except Rejected as exc:
        raise Rejection(str(exc)) from None
    if a.cert:
        _emit_certificate(cert, a.cert)
    r.add("endpoint", cert.endpoint, f"endpoint: {cert.endpoint}  complete: {cert.complete}  "
                                     f"moves: {len(cert.sequence.moves)}")
    r.add("counts", cert.counts)
    r.add("stages", cert.stages)
    if not cert.complete:
        raise Incomplete("budget exhausted before a standard triangulation was reached")


def cmd_rp3_lemma8(a, r):
    from .rp3 import lemma8_pipeline

    Z = load_cell(a.file)
    try:
        cert, endpoint = lemma8_pipeline(Z)
    except CellError as exc:
        raise Rejection(str(exc)) from None
    if a.cert:
        _emit_certificate(cert, a.cert)
    r.add("endpoint", endpoint, f"endpoint: {endpoint}  contractions: {len(cert.sequence.moves)}")
    r.add("stages", cert.stages)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    common.add_argument("--force", action="store_true", help="allow outputs to overwrite inputs")
    common.add_argument("-v", "--verbose", action="count", default=0, help="log progress on stderr")
    common.add_argument("--seed", type=int, help="recorded in reports; core algorithms are deterministic")

    p = argparse.ArgumentParser(prog="p3", description="Edge moves, normal surfaces and standard RP^3 triangulations.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(parent, name, fn, help_):
        q = parent.add_parser(name, parents=[common], help=help_)
        q.set_defaults(fn=fn)
        return q

    q = add(sub, "validate", cmd_validate, "check a .tri file")
    q.add_argument("file")
    q = add(sub, "homology", cmd_homology, "integral homology")
    q.add_argument("file")
    q = add(sub, "subdivide", cmd_subdivide, "barycentric subdivision")
    q.add_argument("file")
    q.add_argument("--emit", help="output .tri (default stdout)")
    q = add(sub, "iso", cmd_iso, "isomorphism test")
    q.add_argument("file1")
    q.add_argument("file2")

    moves = sub.add_parser("moves", help="move sequences").add_subparsers(dest="sub", required=True)
    q = add(moves, "replay", cmd_replay, "replay a moves file or a certificate")
    q.add_argument("file", help=".tri file, or a certificate .json")
    q.add_argument("moves", nargs="?", help="moves file (omit when FILE is a certificate)")
    q.add_argument("--expect-hash", help="fail unless replay ends at this hash")
    q.add_argument("--emit", help="write the final triangulation")

    q = add(sub, "distance", cmd_distance, "bidirectional search for a shortest move sequence")
    q.add_argument("file1")
    q.add_argument("file2")
    q.add_argument("--depth", type=_positive, default=4)
    q.add_argument("--states", type=_positive, default=20000)
    q.add_argument("--kinds", choices=("both", "expand", "contract"), default="both")
    q.add_argument("--emit", help="write the moves file when found")

    q = add(sub, "dual", cmd_dual, "dual cell complex of a triangulation")
    q.add_argument("file")
    q.add_argument("--emit")
    q = add(sub, "ordercx", cmd_ordercx, "order complex of a .cell file")
    q.add_argument("file")
    q.add_argument("--emit")
    q = add(sub, "del2", cmd_del2, "delete a codimension-one cell and emit its contraction sequence")
    q.add_argument("file")
    q.add_argument("cell")
    q.add_argument("--emit-moves")
    q.add_argument("--emit-start", help="write the order complex the moves start from")
    q.add_argument("--emit", help="write the complex after deletion")

    normal = sub.add_parser("normal", help="normal surfaces").add_subparsers(dest="sub", required=True)
    q = add(normal, "enumerate", cmd_normal_enumerate, "fundamental surfaces up to a coordinate bound")
    q.add_argument("file")
    q.add_argument("--bound", type=_positive, default=4)
    q.add_argument("--emit-dir")
    q = add(normal, "euler", cmd_normal_euler, "reconstruct a surface")
    q.add_argument("file")
    q.add_argument("nsv")
    q = add(normal, "sum", cmd_normal_sum, "Haken sum of two vectors")
    q.add_argument("x")
    q.add_argument("y")
    q.add_argument("--tri", help="triangulation, to check admissibility and report chi")
    q.add_argument("--emit")
    q = add(normal, "findp2", cmd_normal_findp2, "smallest normal projective plane")
    q.add_argument("file")
    q.add_argument("--method", choices=("auto", "enumerate", "milp"), default="auto")
    q.add_argument("--bound", type=_positive, default=4)
    q.add_argument("--time-limit", type=float, default=600.0)
    q.add_argument("--emit")
    q = add(normal, "kneser", cmd_normal_kneser, "look for normally isotopic components")
    q.add_argument("file")
    q.add_argument("nsv")

    rp2 = sub.add_parser("rp2", help="decompositions of the projective plane").add_subparsers(dest="sub", required=True)
    q = add(rp2, "dual", cmd_rp2_dual, "dual decomposition of a surface triangulation")
    q.add_argument("file")
    q.add_argument("--emit")
    q = add(rp2, "reduce", cmd_rp2_reduce, "delete edges until irreducible")
    q.add_argument("file")
    q.add_argument("--emit")
    q = add(rp2, "endpoints", cmd_rp2_endpoints, "write the two irreducible decompositions")
    q.add_argument("--emit", required=True, help="output directory")

    rp3 = sub.add_parser("rp3", help="standard triangulations of RP^3").add_subparsers(dest="sub", required=True)
    q = add(rp3, "standard", cmd_rp3_standard, "T(Z1) or T(Z2)")
    q.add_argument("--which", choices=("z1", "z2"), required=True)
    q.add_argument("--emit")
    q = add(rp3, "z1z2", cmd_rp3_z1z2, "moves from T(Z1) to T(Z2)")
    q.add_argument("--emit", help="moves file")
    q.add_argument("--cert", help="certificate .json (moves file written alongside)")
    q.add_argument("--regenerate", action="store_true", help="search again instead of using frozen data")
    q = add(rp3, "simplify", cmd_rp3_simplify, "contract an RP^3 triangulation to a standard one")
    q.add_argument("file")
    q.add_argument("--budget", type=_positive, default=5000, help="expansion trials allowed on plateaus")
    q.add_argument("--cert", help="certificate .json (moves file written alongside)")
    q = add(rp3, "lemma8", cmd_rp3_lemma8, "contract T(Z) to T(Z1) or T(Z2) along a reduction of Z")
    q.add_argument("file", help=".cell decomposition of the projective plane")
    q.add_argument("--cert")
    return p


def _positive(s):
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


_OUTPUT_ARGS = ("emit", "emit_moves", "emit_start", "emit_dir", "cert")
_INPUT_ARGS = ("file", "file1", "file2", "moves", "nsv", "x", "y", "tri")
_BUDGET_ARGS = ("depth", "states", "bound", "budget", "time_limit")


def config_from_args(args) -> RunConfig:
    name = " ".join(x for x in (args.command, getattr(args, "sub", None)) if x)
    return RunConfig(
        name,
        [getattr(args, k) for k in _INPUT_ARGS if getattr(args, k, None)],
        [getattr(args, k) for k in _OUTPUT_ARGS if getattr(args, k, None)],
        {k: getattr(args, k) for k in _BUDGET_ARGS if getattr(args, k, None) is not None},
        args.force, args.json, args.verbose, args.seed)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors are rejections, not budget outcomes
        return OK if exc.code in (0, None) else REJECTED
    rep = Reporter(args.json)
    cfg = config_from_args(args)
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), stream=sys.stderr,
                        format="p3: %(message)s")
    code = OK
    try:
        cfg.check()
        log.info("%s: inputs %s, budgets %s", cfg.command, cfg.inputs, cfg.budgets)
        args.fn(args, rep)
    except Rejection as exc:
        rep.add("error", str(exc))
        print(f"p3: rejected: {exc}", file=sys.stderr)
        code = REJECTED
    except Incomplete as exc:
        rep.add("incomplete", str(exc))
        print(f"p3: incomplete: {exc}", file=sys.stderr)
        code = INCOMPLETE
    except (AssertionError, MoveError, CellError, NormalError) as exc:
        rep.add("invariant_failure", str(exc))
        print(f"p3: invariant failure: {exc}", file=sys.stderr)
        code = INVARIANT
    rep.add("exit_code", code)
    if cfg.seed is not None:
        rep.add("seed", cfg.seed)
    rep.emit()
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
