import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmzv.combination import IntCombination, MzvIndex, PolylogTerm
from gmzv.config import SeriesConfig
from gmzv.errors import DivergentIndex, DivergentTerm
from gmzv.mzv import evaluate_combination, nested_partial_sums, polylog_multi, zeta_mzv
from gmzv.numerics import extrapolate


def brute_nested(t, n):
    """Plain nested loops, increasing indices."""
    total = 0.0

    def rec(depth, lo, acc):
        nonlocal total
        if depth == len(t):
            total += acc
            return
        for k in range(lo, n + 1):
            rec(depth + 1, k + 1, acc / k ** t[depth])

    rec(0, 1, 1.0)
    return total


def test_zeta_two():
    assert abs(zeta_mzv((2,)).real - math.pi**2 / 6) < 1e-8


def test_duality_depth_two():
    assert abs(zeta_mzv((1, 2)).real - zeta_mzv((3,)).real) < 1e-7


def test_duality_depth_three():
    assert abs(zeta_mzv((1, 1, 2)).real - zeta_mzv((4,)).real) < 1e-7


def test_zeta_four_closed_form():
    assert abs(zeta_mzv((4,)).real - math.pi**4 / 90) < 1e-10


def test_alternating_dilog():
    li = polylog_multi(PolylogTerm((2,), (Fraction(1, 2),)))
    assert abs(li.value - (-math.pi**2 / 12)) < 1e-8
    assert abs(li.value.imag) < 1e-15


@pytest.mark.parametrize("t", [(2,), (1, 2), (2, 2), (1, 1, 2), (2, 1, 3)])
def test_partial_sums_match_loops(t):
    n = 30
    assert nested_partial_sums(t, [0] * len(t), n)[n] == pytest.approx(brute_nested(t, n), rel=1e-13)


def test_divergent_index():
    with pytest.raises(DivergentIndex):
        zeta_mzv((2, 1))
    with pytest.raises(DivergentTerm):
        polylog_multi(PolylogTerm((1,), (0,)))


def test_convergent_polylog_with_last_exponent_one():
    # Li_1(-1) = -log 2
    li = polylog_multi(PolylogTerm((1,), (Fraction(1, 2),)))
    assert abs(li.value + math.log(2)) < 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), st.fractions(0, 1, max_denominator=6))
def test_conjugate_symmetry(t1, t2, ph):
    term = PolylogTerm((t1, t2), (ph, Fraction(1, 3)))
    cfg = SeriesConfig(n_max=600)
    a, b = polylog_multi(term, cfg), polylog_multi(term.conjugate(), cfg)
    assert abs(a.value - b.value.conjugate()) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=3).map(lambda t: tuple(t[:-1]) + (t[-1] + 1,)))
def test_monotone_truncation(t):
    s = nested_partial_sums(t, [0] * len(t), 300)
    assert np.all(np.diff(s) >= 0)


def test_combination_evaluation():
    c = IntCombination({MzvIndex((1, 2)): 2})
    assert abs(evaluate_combination(c).real - 2 * zeta_mzv((3,)).real) < 1e-9


@pytest.mark.parametrize("mode, tol", [("none", 1e-2), ("richardson", 1e-5), ("fit", 1e-10)])
def test_tail_modes(mode, tol):
    n = np.arange(2001, dtype=float)
    part = np.concatenate([[0.0], np.cumsum(1 / n[1:] ** 2)])
    ex = extrapolate(part, 2000, mode)
    assert abs(ex.value - math.pi**2 / 6) < tol
    assert ex.residual >= 0
