import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tensorsc import DirectedGraph, load_fixture

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_digraph(rng, n, p) -> DirectedGraph:
    A = rng.random((n, n)) < p
    np.fill_diagonal(A, False)
    return DirectedGraph.from_edges(n, np.argwhere(A))


def strongly_connected_digraph(rng, n, p) -> DirectedGraph:
    """Random digraph plus a random Hamiltonian cycle, so it is strongly connected."""
    A = rng.random((n, n)) < p
    perm = rng.permutation(n)
    A[perm, np.roll(perm, -1)] = True
    np.fill_diagonal(A, False)
    return DirectedGraph.from_edges(n, np.argwhere(A))


@st.composite
def digraphs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    flags = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return DirectedGraph.from_edges(n, [p for p, f in zip(pairs, flags) if f])


@pytest.fixture
def fig1():
    return load_fixture("fig1")


@pytest.fixture
def fig2():
    return load_fixture("fig2")


@pytest.fixture
def fig3():
    return load_fixture("fig3")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE
    except ImportError:
        return
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
