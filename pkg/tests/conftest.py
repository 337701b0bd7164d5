import numpy as np
import pytest
from hypothesis import settings, strategies as st

from pretrain_feasibility.graph import Graph
from pretrain_feasibility.graphon import Graphon

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("repo")


@st.composite
def graphs(draw, min_nodes=1, max_nodes=12):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, np.array([p for p, keep in zip(pairs, mask) if keep], dtype=np.int64).reshape(-1, 2))


@st.composite
def graphons(draw, min_r=1, max_r=6):
    r = draw(st.integers(min_r, max_r))
    vals = draw(st.lists(st.floats(0, 1), min_size=r * r, max_size=r * r))
    a = np.array(vals).reshape(r, r)
    return Graphon(np.triu(a) + np.triu(a, 1).T)


def random_graph(rng, n, p):
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return Graph(n, np.column_stack([iu[keep], ju[keep]]))


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def star_graph(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, 11):
        terminalreporter.write_line(results.get(number, f"criterion {number}: NOT RUN (deselected, or errored before recording)"))
