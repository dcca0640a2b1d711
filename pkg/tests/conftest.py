import pytest

from rp3moves.constructions import boundary_of_simplex, join_of_cycles, rp2_six
from rp3moves.moves import greedy_contractions, replay

ACCEPTANCE = {}


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE[n] = (ok, detail)
    print(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def s3():
    return boundary_of_simplex(4)


@pytest.fixture(scope="session")
def s2():
    return boundary_of_simplex(3)


@pytest.fixture(scope="session")
def rp2():
    return rp2_six()


@pytest.fixture(scope="session")
def lens():
    return join_of_cycles(4, 5)


@pytest.fixture(scope="session")
def tz1():
    from rp3moves.rp3 import standard_triangulation

    return standard_triangulation("z1")


@pytest.fixture(scope="session")
def tz2():
    from rp3moves.rp3 import standard_triangulation

    return standard_triangulation("z2")


@pytest.fixture(scope="session")
def rp3_small(tz1):
    """The 40-tetrahedron RP^3 reached from T(Z1) by greedy contraction."""
    return replay(greedy_contractions(tz1))


@pytest.fixture(scope="session")
def census():
    from rp3moves.rp2 import rp2_triangulations

    return {n: rp2_triangulations(n) for n in range(6, 10)}
