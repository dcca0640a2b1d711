import string

from hypothesis import given, settings
from hypothesis import strategies as st

from rp3moves import io
from rp3moves.constructions import boundary_of_simplex, join_of_cycles
from rp3moves.homology import homology
from rp3moves.isomorphism import iso_signature, isomorphism
from rp3moves.moves import Workspace, contractible_edges, enumerate_expansions
from rp3moves.normal import NormalCoordinates, compatibility_witness, fundamental_surfaces, is_admissible, reconstruct

S3 = boundary_of_simplex(4)
LENS = join_of_cycles(4, 5)
FUND = fundamental_surfaces(S3).surfaces
FIXTURES = [S3, LENS, join_of_cycles(3, 3)]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FIXTURES), st.randoms(use_true_random=False))
def test_signature_invariant_under_relabelling(T, rnd):
    labels = sorted(T.vertices)
    perm = labels[:]
    rnd.shuffle(perm)
    R = T.relabel(dict(zip(labels, perm)))
    assert iso_signature(R) == iso_signature(T)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FIXTURES), st.randoms(use_true_random=False))
def test_expand_contract_round_trip(T, rnd):
    v = rnd.choice(sorted(T.vertices))
    ms = enumerate_expansions(T, v)
    m = rnd.choice(ms)
    ws = Workspace(T)
    inv = ws.apply(m)
    assert str(homology(ws.snapshot())) == str(homology(T))
    ws.apply(inv)
    assert ws.snapshot() == T


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_contract_expand_round_trip(rnd):
    T = LENS
    a, b = rnd.choice(contractible_edges(T))
    ws = Workspace(T)
    inv = ws.contract(a, b)
    ws.apply(inv)
    assert ws.snapshot() == T


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(FIXTURES),
       st.lists(st.text(string.ascii_letters, min_size=1, max_size=4), min_size=30, max_size=30, unique=True))
def test_tri_round_trip_with_string_labels(T, names):
    R = T.relabel(dict(zip(sorted(T.vertices), names)))
    text = io.write_tri(R)
    back = io.read_tri(text)
    assert back == R and io.write_tri(back) == text
    assert isomorphism(back, T) is not None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, len(FUND) - 1), st.integers(1, 3)), min_size=1, max_size=5))
def test_compatible_sums_are_additive(terms):
    total = [0] * 35
    chi = weight = 0
    for i, k in terms:
        x = FUND[i]
        if compatibility_witness(total, x.x) is not None:
            continue
        total = [a + k * b for a, b in zip(total, x.x)]
        chi += k * x.euler_characteristic
        weight += k * x.weight
    v = NormalCoordinates.of(S3, total)
    assert is_admissible(v)
    r = reconstruct(v)
    assert r.euler_characteristic == chi and r.weight == weight
    assert tuple(io.read_nsv(io.write_nsv(v.x))) == v.x
