import json
import time

import pytest

from rp3moves import io
from rp3moves.constructions import RP2_6
from rp3moves.homology import homology
from rp3moves.isomorphism import isomorphism
from rp3moves.moves import Contract, MoveSequence, inverse, replay
from rp3moves.rp2 import (RP2_7, barnette_endpoints, decompositions_isomorphic, deletable_edges, dual2,
                          reduce, surface_invariants, verify_reversible)
from rp3moves.rp3 import (Rejected, build_standard, certificate_from_dict, lemma8_pipeline,
                          simplify_to_standard, standard_triangulation, z1_z2_certificate)
from rp3moves.triangulation import Triangulation, validate


# -- projective plane decompositions -----------------------------------------

def test_dual_of_six_vertex_projective_plane(rp2):
    Z = dual2(rp2)
    assert tuple(Z.f_vector) == (10, 15, 6)
    assert all(len(Z.cells[f].boundary) == 5 for f in Z.of_dim(2))
    assert surface_invariants(Z) == (1, False)


def test_dual_of_tetrahedron_boundary(s2):
    Z = dual2(s2)
    assert tuple(Z.f_vector) == (4, 6, 4)
    assert surface_invariants(Z) == (2, True)


def test_endpoints_are_irreducible_and_distinct():
    z1, z2 = barnette_endpoints()
    assert len(z1.of_dim(2)) == 6 and len(z2.of_dim(2)) == 7
    assert surface_invariants(z1) == surface_invariants(z2) == (1, False)
    assert deletable_edges(z1) == [] and deletable_edges(z2) == []
    assert not decompositions_isomorphic(z1, z2)


def test_reduce_fixed_point():
    z1, _ = barnette_endpoints()
    red = reduce(z1)
    assert red.deleted == [] and red.endpoint == "z1"


def test_census_sizes(census):
    # independent brute force; counts of RP^2 triangulations with 6..9 vertices
    assert [len(census[n]) for n in range(6, 10)] == [1, 3, 16, 134]


def test_seven_vertex_instances(census):
    counts = sorted(len(deletable_edges(dual2(T))) for T in census[7])
    assert counts[0] == 0 and counts[-1] > 0
    for T in census[7]:
        Z = dual2(T)
        red = reduce(Z)
        assert red.endpoint in ("z1", "z2")
        assert len(red.deleted) <= len(Z.of_dim(1))
        for step, e in zip(red.steps, red.deleted):
            assert verify_reversible(step, e)
            assert surface_invariants(step) == (1, False)


# -- standard triangulations -------------------------------------------------

@pytest.mark.parametrize("which", ["z1", "z2"])
def test_build_standard(which):
    Z = barnette_endpoints()[0 if which == "z1" else 1]
    model = build_standard(Z)
    C = model.complex
    assert len(C.of_dim(0)) == 2 * len(Z.of_dim(0))
    assert C.euler_characteristic == 0
    assert C.is_simple() and C.is_regular()
    for v in C.of_dim(0):
        assert sum(v in C.cells[e].boundary for e in C.of_dim(1)) == 4
    T = model.triangulation
    rep = validate(T)
    assert rep.valid and rep.orientable
    assert str(homology(T)) == "(Z, Z/2, 0, Z)"


def test_build_standard_rejects_sphere(s2):
    from rp3moves.cells import CellError

    with pytest.raises(CellError):
        build_standard(dual2(s2))


def test_lemma8_irreducible_is_empty():
    cert, endpoint = lemma8_pipeline(barnette_endpoints()[1])
    assert endpoint == "z2" and cert.sequence.moves == []


def test_lemma8_counts(census):
    for T in census[7]:
        Z = dual2(T)
        cert, endpoint = lemma8_pipeline(Z)
        k = len(reduce(Z).deleted)
        assert len(cert.sequence.moves) == 18 * k
        assert all(isinstance(m, Contract) for m in cert.sequence.moves)
        assert len(cert.sequence.moves) <= 18 * len(Z.of_dim(1))
        end = cert.verify()
        assert isomorphism(end, standard_triangulation(endpoint)) is not None


def test_z1_z2_frozen_certificate():
    t = time.time()
    cert = z1_z2_certificate()
    end = cert.verify()
    assert time.time() - t < 1.0
    assert len(cert.sequence.moves) == 126
    assert cert.bounds["insertions"] == 4 and cert.bounds["deletions"] == 3
    assert isomorphism(end, standard_triangulation("z2")) is not None
    assert replay(inverse(cert.sequence)) == standard_triangulation("z1")


def test_z1_z2_regenerates_frozen_data():
    from rp3moves.rp3 import Z1Z2_MOVES, search_z1_z2

    seq = search_z1_z2()
    assert io.write_moves(seq) == Z1Z2_MOVES.read_text()


def test_certificate_json_round_trip():
    cert = z1_z2_certificate()
    d = json.loads(cert.to_json())
    again = certificate_from_dict(d)
    assert again.sequence.moves == cert.sequence.moves
    assert again.verify().digest() == d["final_hash"]


def test_simplify_identity_on_standard(tz1):
    cert = simplify_to_standard(tz1)
    assert cert.complete and cert.endpoint == "z1" and cert.sequence.moves == []


def test_simplify_rejects_sphere(s3):
    with pytest.raises(Rejected):
        simplify_to_standard(s3)


def test_simplify_partial_contraction(tz1):
    from rp3moves.moves import greedy_contractions

    T = replay(greedy_contractions(tz1, max_moves=20))
    cert = simplify_to_standard(T)
    assert cert.complete and cert.endpoint in ("z1", "z2")
    assert [s["stage"] for s in cert.stages] == ["greedy", "registered_form"]
    end = cert.verify()
    assert end.digest() == cert.sequence.final_hash
    assert isomorphism(end, standard_triangulation(cert.endpoint)) is not None


def test_standard_forms_use_listed_planes():
    assert isomorphism(standard_triangulation("z1"), build_standard(dual2(Triangulation(RP2_6, 2))).triangulation)
    assert isomorphism(standard_triangulation("z2"), build_standard(dual2(Triangulation(RP2_7, 2))).triangulation)


def test_moves_file_initial_is_tz1():
    cert = z1_z2_certificate()
    seq = io.read_moves(io.write_moves(cert.sequence), standard_triangulation("z1"))
    assert isinstance(seq, MoveSequence) and len(seq.moves) == 126
