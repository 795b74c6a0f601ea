import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gamma2, graph_file, random_trees, star
from gmzv.config import SeriesConfig
from gmzv.eisenstein import gmzv_to_mzv
from gmzv.errors import ConvergenceGuardFailed
from gmzv.graph import build_graph, edges_from_tuples, load_graph
from gmzv.mzv import evaluate_combination, zeta_mzv
from gmzv.series import TorsionDecoration, gmzv_direct, higher_green_numeric, mordell_tornheim


def brute_star(s1, s2, s3, n):
    return sum(1 / (a**s1 * b**s2 * (a + b) ** s3) for a in range(1, n) for b in range(1, n - a + 1))


def test_star_against_brute_force():
    cfg = SeriesConfig(n_max=200, tail_mode="none")
    assert gmzv_direct(star(2, 1, 2), cfg).real == pytest.approx(brute_star(2, 1, 2, 200), rel=1e-12)


def test_single_edge():
    g = load_graph(graph_file("edge_k3"))
    assert abs(gmzv_direct(g).real - zeta_mzv((3,)).real) < 1e-9


def test_unrestricted_edge_counts_both_signs():
    g = load_graph(graph_file("edge_k2"))
    r = higher_green_numeric(g, restrict_signs=False)
    assert abs(r.real - math.pi**2 / 3) < 1e-8


def test_unrestricted_edge_with_decoration():
    # sum over n != 0 of e(n/2) / n^2 = 2 Li_2(-1)
    g = load_graph(graph_file("edge_k2"))
    r = higher_green_numeric(g, {"v1": Fraction(1, 2)}, restrict_signs=False)
    assert abs(r.value - (-math.pi**2 / 6)) < 1e-8


def test_empty_cone():
    r = gmzv_direct(star(1, 1, 1).with_signs((0, 0, 0)))
    assert r.empty and r.value == 0


def test_mixed_cone_refused():
    # n1 + n2 = n3 + n4 with all labels positive: a non-simplicial cone
    g = build_graph({
        "vertices": ["w", "a", "b", "c", "d"],
        "edges": edges_from_tuples([("p", "a", "w", 2), ("q", "b", "w", 2), ("r", "w", "c", 2), ("s", "w", "d", 2)]),
        "boundary": ["a", "b", "c", "d"],
    })
    with pytest.raises(ConvergenceGuardFailed):
        gmzv_direct(g)


def test_divergent_tree_refused():
    with pytest.raises(ConvergenceGuardFailed):
        gmzv_direct(load_graph(graph_file("edge_k2")).with_exponents((1,)))


def test_decorations_must_be_on_boundary(gamma1):
    with pytest.raises(ValueError):
        higher_green_numeric(gamma1, {"w": Fraction(1, 2)})


def test_two_vertex_tree_direct_vs_reduction():
    cfg = SeriesConfig(n_max=1500)
    direct = gmzv_direct(gamma2(), cfg)
    reduced = evaluate_combination(gmzv_to_mzv(gamma2()))
    assert abs(direct.real - reduced.real) < 1e-6


def test_relabelling_invariance():
    g = star(2, 1, 2)
    renamed = build_graph({
        "vertices": ["c", "p", "q", "r"],
        "edges": edges_from_tuples([("z", "c", "q", 1, 0), ("y", "c", "r", 2, 1), ("x", "c", "p", 2, 0)]),
        "boundary": ["p", "q", "r"],
    })
    assert abs(gmzv_direct(g).real - gmzv_direct(renamed).real) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(2, 5)]))
def test_conjugation_sign_free(x):
    g = load_graph(graph_file("bigon")).with_exponents((2, 2, 1, 1))
    cfg = SeriesConfig(n_max=300)
    a = higher_green_numeric(g, {"s1": x}, cfg, restrict_signs=False)
    b = higher_green_numeric(g, {"s1": -x}, cfg, restrict_signs=False)
    assert abs(a.value - b.value.conjugate()) < 1e-9


@settings(max_examples=10, deadline=None)
@given(random_trees(max_edges=4, max_k=3))
def test_monotone_truncation(g):
    vals = [gmzv_direct(g, SeriesConfig(n_max=n, tail_mode="none")).real for n in (50, 100, 200)]
    assert vals[0] <= vals[1] <= vals[2]


@pytest.mark.parametrize("xa", [Fraction(0), Fraction(1, 3), Fraction(1, 4)])
def test_convolution_of_edge_series(xa):
    # integrating the internal decoration of a 2-chain convolves the two edge series
    def edge(t):
        t = np.mod(t, 1.0)
        return 2 * np.pi**2 * (t * t - t + 1 / 6)  # sum_{n != 0} e(n t) / n^2

    grid = (np.arange(2048) + 0.5) / 2048
    riemann = np.mean(edge(float(xa) - grid) * edge(grid))
    chain = build_graph({
        "vertices": ["a", "m", "b"],
        "edges": edges_from_tuples([("p", "m", "a", 2), ("q", "b", "m", 2)]),
        "boundary": ["a", "b"],
    })
    direct = higher_green_numeric(chain, {"a": xa}, restrict_signs=False)
    assert abs(direct.value - riemann) < 1e-3
    assert abs(direct.value.imag) < 1e-9


def test_mordell_tornheim_star():
    for sig in [(1, 1, 1), (2, 1, 2), (1, 2, 3)]:
        mt = mordell_tornheim(sig[:2], sig[2])
        assert abs(mt.real - gmzv_direct(star(*sig)).real) < 1e-6


def test_mordell_tornheim_single_part():
    assert abs(mordell_tornheim([2], 2).real - zeta_mzv((4,)).real) < 1e-9


def test_mordell_tornheim_guard():
    with pytest.raises(ConvergenceGuardFailed):
        mordell_tornheim([1, 1], 0)


def test_torsion_decoration_normalises():
    d = TorsionDecoration.of({"b": Fraction(3, 2), "a": Fraction(1, 3), "c": 0})
    assert d.as_dict() == {"a": Fraction(1, 3), "b": Fraction(1, 2)}
    assert d.denominator == 6
    assert (-d).as_dict() == {"a": Fraction(2, 3), "b": Fraction(1, 2)}
