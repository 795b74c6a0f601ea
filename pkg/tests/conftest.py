from pathlib import Path

import pytest
from hypothesis import strategies as st

from gmzv.graph import build_graph, edges_from_tuples, load_graph, rooted_signs

DATA = Path(__file__).resolve().parent.parent / "data"


def graph_file(name):
    return DATA / "graphs" / f"{name}.json"


def star(s1, s2, s3):
    """Three-leaf star, two positive leaves and one negative."""
    return build_graph({
        "vertices": ["w", "v1", "v2", "v3"],
        "edges": edges_from_tuples([("n1", "w", "v1", s1, 0), ("n2", "w", "v2", s2, 0), ("n3", "w", "v3", s3, 1)]),
        "boundary": ["v1", "v2", "v3"],
    })


def gamma2(s1=1, s2=1, s3=1, s4=1, mu=1):
    return build_graph({
        "vertices": ["z", "y", "v1", "v2", "v3", "v4"],
        "edges": edges_from_tuples([
            ("e1", "z", "v1", s1, 0), ("e2", "z", "v2", s2, 0), ("m1", "y", "z", mu, 0),
            ("e3", "y", "v3", s3, 0), ("e4", "y", "v4", s4, 1),
        ]),
        "boundary": ["v1", "v2", "v3", "v4"],
    })


@st.composite
def random_trees(draw, max_edges=5, max_k=3):
    """Trees with leaves as boundary and signs rooted at a leaf (orthant cone)."""
    n_edges = draw(st.integers(2, max_edges))
    parents = [draw(st.integers(0, i)) for i in range(n_edges)]
    vertices = [f"u{i}" for i in range(n_edges + 1)]
    raw = []
    for i, p in enumerate(parents):
        a, b = vertices[p], vertices[i + 1]
        if draw(st.booleans()):
            a, b = b, a
        raw.append((f"e{i}", a, b, draw(st.integers(1, max_k)), 0))
    deg = {v: 0 for v in vertices}
    for _, a, b, _, _ in raw:
        deg[a] += 1
        deg[b] += 1
    leaves = sorted(v for v in vertices if deg[v] == 1)
    g = build_graph({"vertices": vertices, "edges": edges_from_tuples(raw), "boundary": leaves})
    root = draw(st.sampled_from(leaves))
    return rooted_signs(g, root)


@pytest.fixture
def gamma1():
    return load_graph(graph_file("gamma1"))


@pytest.fixture
def hat():
    return load_graph(graph_file("hat"))
