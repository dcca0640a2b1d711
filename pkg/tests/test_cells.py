import time

import pytest

from rp3moves.cells import CellComplex, CellError, delete_2cell, dual, lemma4_sequence, order_complex
from rp3moves.constructions import barycentric_subdivision, join_of_cycles
from rp3moves.homology import homology
from rp3moves.isomorphism import isomorphism
from rp3moves.moves import Contract, inverse, replay
from rp3moves.triangulation import validate


def test_dual_of_boundary_simplex(s3):
    C = dual(s3)
    assert tuple(C.f_vector) == (5, 10, 10, 5)
    assert C.is_simple() and C.is_regular()
    assert C.euler_characteristic == 0


@pytest.mark.parametrize("name", ["s3", "lens", "rp3_small"])
def test_dual_is_simple_and_order_complex_is_subdivision(name, request):
    T = request.getfixturevalue(name)
    C = dual(T)
    assert C.is_simple()
    assert C.euler_characteristic == 0
    oc = order_complex(C)
    assert len(oc.facets) == 24 * len(T.facets)
    assert isomorphism(oc, barycentric_subdivision(T)) is not None


def test_order_complex_of_single_ball():
    # one 3-cell bounded by the boundary complex of a tetrahedron
    cells = {}
    for v in range(4):
        cells[f"v{v}"] = (0, ())
    edges = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    for a, b in edges:
        cells[f"e{a}{b}"] = (1, (f"v{a}", f"v{b}"))
    tris = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    for t in tris:
        cells["f" + "".join(map(str, t))] = (2, tuple(f"e{a}{b}" for a, b in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]))
    cells["ball"] = (3, tuple("f" + "".join(map(str, t)) for t in tris))
    C = CellComplex(cells)
    assert C.is_regular()
    B = order_complex(C)
    assert B.euler_characteristic == 1 and len(B.facets) == 24


def test_irregular_complex_rejected():
    # a 2-cell glued along a single loop edge is not regular
    C = CellComplex({"v": (0, ()), "e": (1, ("v", "v")), "f": (2, ("e",))})
    assert not C.is_regular()
    with pytest.raises(CellError):
        order_complex(C)


def test_order_complex_of_rp3_complex_has_z2(tz1):
    from rp3moves.rp2 import barnette_endpoints
    from rp3moves.rp3 import build_standard

    model = build_standard(barnette_endpoints()[0])
    assert str(homology(order_complex(model.complex))) == "(Z, Z/2, 0, Z)"


def test_delete_2cell_merges_two_3cells(s3):
    C = dual(s3)
    c = C.of_dim(2)[0]
    C2, rep = delete_2cell(C, c)
    assert len(C2.of_dim(3)) == 4
    assert rep.k == 3
    assert rep.euler_before == rep.euler_after == 0
    assert C2.is_simple() and C2.is_regular()


def test_delete_2cell_rejects_irregular_result(s3):
    C = dual(s3)
    C2, _ = delete_2cell(C, "*0.1")
    with pytest.raises(CellError, match="2-sphere"):
        delete_2cell(C2, "*0.2")


def test_delete_2cell_needs_a_2cell(s3):
    C = dual(s3)
    with pytest.raises(CellError):
        delete_2cell(C, C.of_dim(1)[0])


@pytest.mark.parametrize("m,n,k", [(3, 3, 3), (3, 4, 4), (3, 5, 5), (3, 6, 6)])
def test_lemma4_counts(m, n, k):
    C = dual(join_of_cycles(m, n))
    c = C.of_dim(2)[0]
    t = time.time()
    res = lemma4_sequence(C, c)
    assert res.ok and res.k == k
    assert len(res.sequence.moves) == 4 * k + 2
    assert all(isinstance(x, Contract) for x in res.sequence.moves)
    end = replay(res.sequence)
    assert validate(end).valid
    assert isomorphism(end, order_complex(res.after)) is not None
    assert time.time() - t < 10


def test_lemma4_inverse_is_insertion(s3):
    C = dual(s3)
    res = lemma4_sequence(C, C.of_dim(2)[0])
    back = inverse(res.sequence)
    assert replay(back) == order_complex(C)
