import numpy as np
import pytest
from hypothesis import settings

from parlouvain import EdgeList, build_csr

# numba compiles on first call, so per-example deadlines are meaningless
settings.register_profile("default", deadline=None)
settings.load_profile("default")


def graph_from(n, triples):
    return build_csr(EdgeList.from_triples(n, triples))


TRIANGLE = (3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
SINGLE_EDGE = (2, [(0, 1, 1.0)])
TWO_TRIANGLES = (6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)])
BARBELL = (6, TWO_TRIANGLES[1] + [(2, 3, 1.0)])

# name -> (graph spec, optimal modularity)
FIXTURES = {
    "triangle": (TRIANGLE, 0.0),
    "single_edge": (SINGLE_EDGE, 0.0),
    "two_triangles": (TWO_TRIANGLES, 0.5),
    "barbell": (BARBELL, 5 / 14),
}


@pytest.fixture
def barbell():
    return graph_from(*BARBELL)


@pytest.fixture
def triangle():
    return graph_from(*TRIANGLE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
