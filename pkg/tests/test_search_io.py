import random

import pytest

from rp3moves import io
from rp3moves.cells import dual
from rp3moves.constructions import barycentric_subdivision
from rp3moves.moves import (MoveSequence, contractible_edges, enumerate_expansions, expand, greedy_contractions,
                            replay)
from rp3moves.normal import fundamental_surfaces
from rp3moves.search import bfs_distance


# -- search -------------------------------------------------------------------

def test_distance_to_itself_is_zero(s3):
    res = bfs_distance(s3, s3)
    assert res.status == "found" and res.length == 0


def test_distance_to_one_expansion(s3):
    S = expand(s3, enumerate_expansions(s3, 2)[0])
    res = bfs_distance(s3, S.relabel({v: f"x{v}" for v in S.vertices}))
    assert res.status == "found" and res.length == 1


def test_found_sequences_replay(lens):
    a, b = contractible_edges(lens)[3]
    from rp3moves.moves import contract

    R, _ = contract(lens, (a, b))
    res = bfs_distance(R, lens, max_depth=2)
    assert res.status == "found" and res.length == 1
    replay(res.sequence)


def test_sphere_vs_rp3_is_exhausted_or_none(s3, rp3_small):
    res = bfs_distance(s3, rp3_small, max_depth=2, max_states=200)
    assert res.status in ("exhausted", "none_within_depth") and res.sequence is None


def test_budget_exhaustion_is_not_a_proof(s3, s2):
    sd = barycentric_subdivision(s2)
    res = bfs_distance(s2, sd, max_depth=12, max_states=30, kinds="expand")
    assert res.status == "exhausted"


def test_expansion_only_path_to_subdivision_of_triangle_sphere(s2):
    sd = barycentric_subdivision(s2)
    res = bfs_distance(s2, sd, max_depth=12, max_states=20000, kinds="expand")
    assert res.status == "found"
    assert res.length == len(sd.vertices) - len(s2.vertices) == 10
    assert all(type(m).__name__ == "Expand" for m in res.sequence.moves)


# -- formats ------------------------------------------------------------------

@pytest.mark.parametrize("name", ["s2", "s3", "rp2", "lens", "tz1"])
def test_tri_round_trip(name, request):
    T = request.getfixturevalue(name)
    text = io.write_tri(T)
    assert io.read_tri(text) == T
    assert io.write_tri(io.read_tri(text)) == text


def test_tri_parsing_is_whitespace_insensitive(s3):
    text = io.write_tri(s3)
    messy = "# comment\n" + "\n".join("   " + " \t ".join(line.split()) + "  " for line in text.splitlines()) + "\n\n"
    assert io.read_tri(messy) == s3


@pytest.mark.parametrize("bad", ["", "tet 0 1 2 3\n", "tri 3\ntet 0 1 2\n", "tri 3\ncube 0 1 2 3\n", "tri x\n"])
def test_tri_rejects_malformed(bad):
    with pytest.raises(io.FormatError):
        io.read_tri(bad)


def test_moves_round_trip_with_expansions(s3):
    rng = random.Random(3)
    T = s3
    moves = []
    from rp3moves.moves import Workspace

    ws = Workspace(T)
    for _ in range(12):
        cur = ws.snapshot()
        v = rng.choice(sorted(cur.vertices))
        ms = enumerate_expansions(cur, v)
        m = rng.choice(ms)
        ws.apply(m)
        moves.append(m)
    seq = MoveSequence(s3, moves + greedy_contractions(ws.snapshot()).moves)
    text = io.write_moves(seq)
    back = io.read_moves(text, s3)
    assert back.moves == seq.moves
    assert io.write_moves(back) == text


def test_moves_reject_bad_partition(s3):
    with pytest.raises(io.FormatError):
        io.read_moves("E 0 | A: 0 1 | B: 1 2 3 | N: 9\n", s3)


def test_moves_reject_illegal_contraction(s3):
    from rp3moves.moves import MoveError

    with pytest.raises(MoveError):
        io.read_moves("C 0 1\n", s3)


def test_cell_round_trip(s3, rp2):
    from rp3moves.rp2 import dual2

    for C in (dual(s3), dual2(rp2)):
        text = io.write_cell(C)
        back = io.read_cell(text)
        assert io.write_cell(back) == text


def test_cell_rejects_duplicates():
    with pytest.raises(io.FormatError):
        io.read_cell("cell a 0 :\ncell a 0 :\n")


def test_nsv_round_trip(s3):
    for v in fundamental_surfaces(s3).surfaces:
        text = io.write_nsv(v.x)
        assert tuple(io.read_nsv(text)) == v.x
        assert io.write_nsv(io.read_nsv(text)) == text


@pytest.mark.parametrize("bad", ["nsv 1\n1 0 0 0 0 0\n", "nsv 2\n1 0 0 0 0 0 0\n", "nsv 1\n-1 0 0 0 0 0 0\n", "x 1\n"])
def test_nsv_rejects_malformed(bad):
    with pytest.raises(io.FormatError):
        io.read_nsv(bad)
