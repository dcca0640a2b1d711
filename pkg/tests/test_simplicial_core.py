import random

import pytest

from rp3moves.constructions import barycentric_subdivision, join_of_cycles
from rp3moves.homology import homology
from rp3moves.isomorphism import iso_signature, isomorphism
from rp3moves.moves import (Contract, MoveError, MoveSequence, Workspace, contract, contractible_edges,
                            enumerate_expansions, expand, inverse, is_contractible, replay,
                            subdivision_moves)
from rp3moves.triangulation import Triangulation, validate


# -- validate -----------------------------------------------------------------

def test_boundary_of_4_simplex_is_valid(s3):
    rep = validate(s3)
    assert rep.valid and rep.orientable
    assert tuple(s3.f_vector) == (5, 10, 10, 5)
    assert rep.euler_characteristic == 0


def test_triangle_in_three_tets_is_reported():
    T = Triangulation([(0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 2, 5)], 3)
    rep = validate(T)
    assert not rep.valid and not rep.closed
    assert any("3 facets" in i for i in rep.issues)


def test_single_tet_is_not_closed():
    rep = validate(Triangulation([(0, 1, 2, 3)], 3))
    assert not rep.closed and rep.issues


def test_pinched_spheres_fail_manifold_check(s3):
    other = s3.relabel({v: v + 4 for v in s3.vertices})  # shares vertex 4 with s3
    rep = validate(Triangulation(list(s3.facets) + list(other.facets), 3))
    assert rep.closed and not rep.manifold


def test_disconnected_union_is_reported(s3):
    other = s3.relabel({v: v + 10 for v in s3.vertices})
    rep = validate(Triangulation(list(s3.facets) + list(other.facets), 3))
    assert not rep.connected and not rep.valid


def test_standard_rp3_is_valid_orientable(tz1):
    rep = validate(tz1)
    assert rep.valid and rep.orientable and rep.euler_characteristic == 0


def test_rp2_six_is_non_orientable(rp2):
    rep = validate(rp2)
    assert rep.valid and rep.orientable is False and rep.euler_characteristic == 1


# -- homology -----------------------------------------------------------------

def test_homology_of_sphere(s3):
    assert str(homology(s3)) == "(Z, 0, 0, Z)"


def test_homology_of_rp3(tz1):
    assert str(homology(tz1)) == "(Z, Z/2, 0, Z)"


def test_homology_of_rp2(rp2):
    assert str(homology(rp2)) == "(Z, Z/2, 0)"


def test_torsion_is_divisibility_chain(tz1):
    h = homology(tz1)
    for chain in h.torsion:
        assert all(b % a == 0 for a, b in zip(chain, chain[1:]))


# -- link condition and moves -------------------------------------------------

def test_no_edge_of_boundary_simplex_is_contractible(s3):
    assert contractible_edges(s3) == []
    for e in s3.faces(1):
        assert not is_contractible(s3, tuple(e))


def test_unknown_edge_is_an_error(s3):
    with pytest.raises(MoveError):
        is_contractible(s3, (0, 99))


def test_contract_rejects_with_witness(s3):
    ws = Workspace(s3)
    with pytest.raises(MoveError) as exc:
        ws.contract(0, 1)
    assert exc.value.witness is not None


def test_tet_barycentre_to_triangle_barycentre_is_contractible(s3):
    sd = barycentric_subdivision(s3)
    # vertices of sd are numbered by (dimension, labels): 0..4 vertices, then edges, triangles, tets
    tets = [v for v in sd.vertices if v >= 25]
    tris = [v for v in sd.vertices if 15 <= v < 25]
    edges = [(t, f) for t in tets for f in tris if sd.degree((t, f)) > 0]
    assert edges
    assert all(is_contractible(sd, e) for e in edges)


def test_empty_three_cycle_blocks_contraction(s3, rp3_small):
    checked = 0
    for T0 in (expand(s3, enumerate_expansions(s3, 0)[0]), rp3_small):
        tris = set(T0.faces(2))
        edges = set(T0.faces(1))
        for e in sorted(edges, key=sorted):
            a, b = sorted(e)
            if any(frozenset({a, c}) in edges and frozenset({b, c}) in edges and frozenset({a, b, c}) not in tris
                   for c in T0.vertices if c not in e):
                assert not is_contractible(T0, (a, b))
                checked += 1
    assert checked > 0


def test_contract_removes_star_and_inverse_restores(lens):
    for a, b in contractible_edges(lens):
        k = lens.degree((a, b))
        R, inv = contract(lens, (a, b))
        assert len(R.facets) == len(lens.facets) - k
        assert validate(R).valid
        assert expand(R, inv) == lens


def test_expansions_at_boundary_simplex_vertex(s3):
    ms = enumerate_expansions(s3, 0)
    assert ms
    for m in ms:
        S = expand(s3, m)
        assert len(S.vertices) == 6 and validate(S).valid
        assert is_contractible(S, (m.v, m.w))
        R, _ = contract(S, (m.v, m.w))
        assert isomorphism(R, s3) is not None


def test_expansion_rejects_non_disc_side(s3):
    from rp3moves.moves import Expand

    link = sorted(s3.link([0]), key=sorted)
    bad = Expand(0, 9, frozenset([link[0], link[1], link[2], link[3]]))  # whole sphere
    with pytest.raises(MoveError):
        expand(s3, bad)


def test_homology_unchanged_by_sampled_contractions(tz1):
    rng = random.Random(5)
    h = str(homology(tz1))
    edges = contractible_edges(tz1)
    for e in rng.sample(edges, 5):
        assert str(homology(contract(tz1, e)[0])) == h


# -- subdivision --------------------------------------------------------------

@pytest.mark.parametrize("name", ["s3", "lens"])
def test_subdivision_counts_and_homology(name, request):
    T = request.getfixturevalue(name)
    S = barycentric_subdivision(T)
    assert len(S.facets) == 24 * len(T.facets)
    assert S.euler_characteristic == 0
    assert str(homology(S)) == str(homology(T))


def test_subdivided_rp3_has_z2_first_homology(rp3_small):
    assert str(homology(barycentric_subdivision(rp3_small))) == "(Z, Z/2, 0, Z)"


@pytest.mark.parametrize("name", ["s2", "s3", "rp2", "lens", "rp3_small"])
def test_subdivision_by_expansions_only(name, request):
    T = request.getfixturevalue(name)
    moves = subdivision_moves(T)
    end = replay(MoveSequence(T, moves))
    assert isomorphism(end, barycentric_subdivision(T)) is not None
    assert len(moves) == len(end.vertices) - len(T.vertices)
    if T.dim == 3:
        assert len(moves) == len(T.vertices) + 4 * len(T.facets) <= 5 * len(T.facets)


# -- isomorphism --------------------------------------------------------------

def test_relabelled_copy_is_isomorphic(lens):
    rng = random.Random(1)
    labels = sorted(lens.vertices)
    perm = labels[:]
    rng.shuffle(perm)
    R = lens.relabel(dict(zip(labels, perm)))
    phi = isomorphism(lens, R)
    assert phi is not None and lens.relabel(phi) == R
    assert iso_signature(lens) == iso_signature(R)


def test_sphere_and_rp3_not_isomorphic(s3, tz1):
    assert isomorphism(s3, tz1) is None


def test_string_labels_allowed(s3):
    R = s3.relabel({v: f"v{v}" for v in s3.vertices})
    assert iso_signature(R) == iso_signature(s3)


def test_independent_copies_of_tz2_are_isomorphic(tz2):
    from rp3moves.rp2 import RP2_7, dual2
    from rp3moves.rp3 import build_standard

    again = build_standard(dual2(Triangulation(RP2_7, 2))).triangulation
    assert isomorphism(again, tz2) is not None


def test_joins_distinguished():
    assert isomorphism(join_of_cycles(4, 5), join_of_cycles(3, 6)) is None


# -- replay -------------------------------------------------------------------

def test_empty_sequence_replays_to_initial(s3):
    assert replay(MoveSequence(s3, [])) == s3


def test_sequence_then_inverse(tz1):
    from rp3moves.moves import greedy_contractions

    g = greedy_contractions(tz1, max_moves=10)
    inv = inverse(g)
    assert replay(inv) == tz1


def test_replay_reports_failing_index(s3):
    with pytest.raises(MoveError) as exc:
        replay(MoveSequence(s3, [Contract(0, 1)]))
    assert exc.value.index == 0


def test_replay_checks_final_hash(lens):
    a, b = contractible_edges(lens)[0]
    seq = MoveSequence(lens, [Contract(a, b)], final_hash="0" * 64)
    with pytest.raises(MoveError):
        replay(seq)
