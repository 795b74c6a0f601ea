"""Multiple zeta values and multiple polylogarithms at roots of unity.

Convention: ``zeta(t_1, ..., t_d) = sum_{0<n_1<...<n_d} prod_j n_j^{-t_j}``, so
the last exponent belongs to the largest index and must be at least 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from .combination import IntCombination, MzvIndex, PolylogTerm
from .config import DEFAULT, SeriesConfig
from .errors import DivergentIndex, DivergentTerm
from .numerics import extrapolate


@dataclass(frozen=True)
class EvalResult:
    value: complex
    residual: float
    n_max: int

    @property
    def real(self) -> float:
        return self.value.real


def root_of_unity_powers(phase: Fraction, n: np.ndarray) -> np.ndarray:
    """``exp(2 pi i phase n)`` with the exponent reduced exactly mod 1."""
    phase = Fraction(phase) % 1
    if phase == 0:
        return np.ones(len(n))
    num, den = phase.numerator, phase.denominator
    k = (num * n.astype(object)) % den if den > 2**31 else (num * n) % den
    table = np.exp(2j * np.pi * np.arange(den) / den)
    table[0] = 1.0
    if den % 2 == 0:
        table[den // 2] = -1.0
    return table[np.asarray(k, dtype=np.int64)]


def nested_partial_sums(t, phases, n_max: int) -> np.ndarray:
    """Array ``S`` with ``S[M]`` the truncation of the nested sum to ``n_d <= M``."""
    n = np.arange(1, n_max + 1)
    inner = np.ones(n_max)
    for j, (tj, ph) in enumerate(zip(t, phases)):
        level = inner / n.astype(float) ** tj
        if Fraction(ph) % 1:
            level = level * root_of_unity_powers(ph, n)
        if j == len(t) - 1:
            return np.concatenate([[0.0], np.cumsum(level)])
        # exclusive prefix sum: strictly smaller indices
        inner = np.concatenate([[0.0], np.cumsum(level)[:-1]])
    raise ValueError("empty index")


def _evaluate(t, phases, cfg: SeriesConfig) -> EvalResult:
    period = 1
    for p in phases:
        period = np.lcm(period, Fraction(p).denominator)
    partial = nested_partial_sums(t, phases, cfg.n_max)
    ex = extrapolate(partial, cfg.n_max, cfg.tail_mode, step=int(period), logs=len(t) - 1)
    value = ex.value
    if not any(Fraction(p) % 1 for p in phases):
        value = complex(value.real, 0.0)
    return EvalResult(value, ex.residual, ex.n_max)


def zeta_mzv(idx: MzvIndex | tuple, cfg: SeriesConfig = DEFAULT) -> EvalResult:
    idx = idx if isinstance(idx, MzvIndex) else MzvIndex(tuple(idx))
    if not idx.convergent:
        raise DivergentIndex(f"{idx} diverges: last exponent must be at least 2")
    return _evaluate(idx.t, [0] * idx.depth, cfg)


def polylog_multi(term: PolylogTerm, cfg: SeriesConfig = DEFAULT) -> EvalResult:
    if not term.convergent:
        raise DivergentTerm(f"{term} diverges: last exponent 1 at argument 1")
    return _evaluate(term.t, term.phases, cfg)


Term = Union[MzvIndex, PolylogTerm]


def evaluate_combination(c: Mapping[Term, int] | IntCombination, cfg: SeriesConfig = DEFAULT) -> EvalResult:
    total = 0j
    residual = 0.0
    for term, coeff in c.items():
        r = zeta_mzv(term, cfg) if isinstance(term, MzvIndex) else polylog_multi(term, cfg)
        total += coeff * r.value
        residual += abs(coeff) * r.residual
    return EvalResult(total, residual, cfg.n_max)
