import itertools
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gamma2, random_trees, star
from gmzv.combination import IntCombination, MzvIndex, PolylogTerm
from gmzv.errors import DivergentTerm, NotATree, OverlappingSupports
from gmzv.graph import homology_rank, solve_constraints
from gmzv.eisenstein import (
    FormProduct,
    LinearForm,
    PrefixTerm,
    combination_at,
    eis_step,
    gmzv_to_mzv,
    gmzv_to_polylog,
    prefix_to_mzv,
    reduce_to_prefix_chains,
    tree_to_form_product,
)


def star_oracle(s1, s2, s3):
    """sum_{r+s=s1+s2} (C(r-1,s1-1) + C(r-1,s2-1)) zeta(s, r+s3)."""
    out = {}
    for r in range(1, s1 + s2):
        s = s1 + s2 - r
        c = comb(r - 1, s1 - 1) + comb(r - 1, s2 - 1)
        if c:
            key = MzvIndex((s, r + s3))
            out[key] = out.get(key, 0) + c
    return IntCombination(out)


def two_vertex_oracle(s1, s2, s3, s4, mu):
    """Three-family closed form for the two-internal-vertex tree."""
    out = {}

    def add(c, t):
        if c:
            key = MzvIndex(t)
            out[key] = out.get(key, 0) + c

    for a1 in range(1, s1 + s2):
        b1 = s1 + s2 - a1
        for a2 in range(1, s3 + a1 + mu):
            b2 = s3 + a1 + mu - a2
            c = (comb(a1 - 1, s1 - 1) + comb(a1 - 1, s2 - 1)) * comb(a2 - 1, s3 - 1)
            add(c, (b1, b2, a2 + s4))
            for top in (s1, s2):
                base = comb(a1 - 1, top - 1) * comb(a2 - 1, a1 + mu - 1)
                for a3 in range(1, b1 + b2):
                    b3 = b1 + b2 - a3
                    add(base * (comb(a3 - 1, b2 - 1) + comb(a3 - 1, b1 - 1)), (b3, a3, a2 + s4))
    return IntCombination(out)


@pytest.mark.parametrize("i, j", list(itertools.product(range(1, 5), repeat=2)))
def test_eis_step_exact_grid(i, j):
    a, b = LinearForm((1, 0)), LinearForm((0, 1))
    out = eis_step(a, i, b, j)
    for m, n in itertools.product(range(1, 31), repeat=2):
        assert combination_at(out, (m, n)) == Fraction(1, m**i * n**j)


@settings(max_examples=200)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 50), st.integers(1, 50))
def test_eis_step_exact_random(i, j, m, n):
    out = eis_step(LinearForm((1, 0)), i, LinearForm((0, 1)), j)
    assert combination_at(out, (m, n)) == Fraction(1, m**i * n**j)
    for key in out:
        assert sum(e for _, e in key) == i + j


def test_overlapping_forms_rejected():
    with pytest.raises(OverlappingSupports):
        LinearForm((1, 1)) + LinearForm((0, 1))


@pytest.mark.parametrize("sig", [(1, 1, 1), (2, 1, 2), (1, 2, 3), (3, 3, 2), (1, 4, 1)])
def test_star_matches_closed_form(sig):
    assert gmzv_to_mzv(star(*sig)) == star_oracle(*sig)


def test_star_frozen_values():
    assert str(gmzv_to_mzv(star(1, 1, 1))) == "2 * zeta(1,2)"
    assert gmzv_to_mzv(star(2, 1, 2)) == {MzvIndex((1, 4)): 2, MzvIndex((2, 3)): 1}


@pytest.mark.parametrize("sig", [(1, 1, 1, 1, 1), (2, 1, 1, 2, 1), (1, 2, 2, 1, 2), (1, 1, 3, 1, 1)])
def test_two_vertex_tree_matches_closed_form(sig):
    assert gmzv_to_mzv(gamma2(*sig)) == two_vertex_oracle(*sig)


def test_two_vertex_tree_all_ones():
    assert gmzv_to_mzv(gamma2()) == {MzvIndex((1, 1, 3)): 6, MzvIndex((1, 2, 2)): 2}


def test_chain_collapses_to_single_zeta():
    chain = FormProduct(((LinearForm((1,)), 4),))
    assert prefix_to_mzv(reduce_to_prefix_chains(chain)) == {MzvIndex((4,)): 1}


def test_non_tree_refused(hat):
    with pytest.raises(NotATree):
        gmzv_to_mzv(hat)


def test_infeasible_signs_give_empty_combination():
    assert len(gmzv_to_mzv(star(1, 1, 1).with_signs((0, 0, 0)))) == 0


def test_divergent_term_refused():
    fp = FormProduct(((LinearForm((1, 0)), 1), (LinearForm((0, 1)), 1)))
    with pytest.raises(DivergentTerm):
        prefix_to_mzv(reduce_to_prefix_chains(fp))


def test_polylog_reduction_half_decoration():
    c = gmzv_to_polylog(star(1, 1, 2), {"v2": Fraction(1, 2)})
    assert c == {
        PolylogTerm((1, 3), (Fraction(1, 2), Fraction(0))): 1,
        PolylogTerm((1, 3), (Fraction(1, 2), Fraction(1, 2))): 1,
    }


def test_polylog_reduction_zero_decoration_is_mzv():
    c = gmzv_to_polylog(star(1, 2, 3), {})
    mzv = {MzvIndex(term.t): k for term, k in c.items()}
    assert IntCombination(mzv) == star_oracle(1, 2, 3)


def _check_substitution(g, rng, points=3):
    fp, _ = tree_to_form_product(g)
    chains = reduce_to_prefix_chains(fp)
    for _ in range(points):
        m = [rng.randint(1, 40) for _ in range(fp.dim)]
        assert combination_at(chains, m) == fp.at(m)
    return chains


def test_two_vertex_tree_substitution_exhaustive():
    fp, _ = tree_to_form_product(gamma2())
    chains = reduce_to_prefix_chains(fp)
    for m in itertools.product(range(1, 4), repeat=3):
        assert combination_at(chains, m) == fp.at(m)


@settings(max_examples=60, deadline=None)
@given(random_trees(), st.randoms(use_true_random=False))
def test_random_tree_reduction_invariants(g, rng):
    d = homology_rank(g)
    chains = _check_substitution(g, rng)
    for term in chains:
        assert isinstance(term, PrefixTerm)
        assert len(term.t) == d
        assert term.weight == g.weight
    c = gmzv_to_mzv(g)
    assert all(idx.depth == d and idx.weight == g.weight for idx in c)
    assert gmzv_to_mzv(g) == c


def test_determinism_across_rebuilds():
    outs = {str(gmzv_to_mzv(gamma2(2, 1, 1, 2, 1))) for _ in range(3)}
    assert len(outs) == 1


def test_free_edges_recorded():
    _, free = tree_to_form_product(gamma2())
    assert free == solve_constraints(gamma2()).free_edges
