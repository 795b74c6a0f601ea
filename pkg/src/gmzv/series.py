"""Truncated constrained sums over edge labellings (integers, rational decorations).

The sign-restricted labels are parametrised as ``n_e = sign_e * <form_e, m>``
with ``m`` ranging over positive integer vectors (see
:func:`gmzv.graph.normalize_signs`).  When the supports of the forms are
laminar the sum is evaluated by a convolution over the forest of supports,
truncated by the value of the root forms; otherwise by a box ``[1, M]^d``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .config import DEFAULT, SeriesConfig
from .errors import ConvergenceGuardFailed
from .graph import DecoratedGraph, SignedCone, normalize_signs, sign_feasible, solve_constraints
from .mzv import root_of_unity_powers
from .numerics import extrapolate

BOX_POINTS = 4_000_000


@dataclass(frozen=True)
class TorsionDecoration:
    """Rational decorations ``x_v`` in ``[0, 1)`` on boundary vertices; absent means 0."""

    values: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, object] | None = None) -> "TorsionDecoration":
        items = sorted((str(k), Fraction(v) % 1) for k, v in (mapping or {}).items())
        return cls(tuple((k, v) for k, v in items if v))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.values)

    @property
    def denominator(self) -> int:
        return math.lcm(1, *(v.denominator for _, v in self.values))

    def __neg__(self) -> "TorsionDecoration":
        return TorsionDecoration.of({k: -v for k, v in self.values})


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    residual: float
    n_max: int
    empty: bool = False
    method: str = ""

    @property
    def real(self) -> float:
        return self.value.real


# ---------------------------------------------------------------- kernels


def _conv(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    if len(a) * len(b) <= 4e7:
        return np.convolve(a, b)[: n + 1]
    return fftconvolve(a, b)[: n + 1]


def _forest_sum(forms: Sequence[tuple[int, float]], theta: Sequence[Fraction], d: int,
                n_max: int) -> np.ndarray:
    """Partial sums ``S[M]`` of the laminar sum with every root form at most ``M``."""
    masks = [m for m, _ in forms]
    exps = dict(forms)
    parent = {}
    for m in masks:
        sup = [y for y in masks if y != m and y & m == m]
        parent[m] = min(sup, key=int.bit_count) if sup else 0
    children: dict[int, list[int]] = {m: [] for m in masks + [0]}
    for m in masks:
        children[parent[m]].append(m)
    n = np.arange(n_max + 1)
    complex_mode = any(theta)

    def leaf(v: int) -> np.ndarray:
        a = np.ones(n_max + 1, dtype=complex if complex_mode else float)
        a[0] = 0
        if theta[v]:
            a[1:] = root_of_unity_powers(theta[v], n[1:])
        return a

    def node(m: int) -> np.ndarray:
        covered = 0
        parts = []
        for c in sorted(children[m]):
            parts.append(node(c))
            covered |= c
        for v in range(d):
            if m >> v & 1 and not covered >> v & 1:
                parts.append(leaf(v))
        acc = parts[0]
        for p in parts[1:]:
            acc = _conv(acc, p, n_max)
        acc = acc.copy()
        acc[1:] = acc[1:] / n[1:].astype(float) ** exps[m]
        acc[0] = 0
        return acc

    total = None
    for r in sorted(children[0]):
        s = np.cumsum(node(r))
        total = s if total is None else total * s
    return total


def _box_sum(forms: Sequence[tuple[int, float]], theta: Sequence[Fraction], d: int,
             n_max: int) -> tuple[np.ndarray, int]:
    """Partial sums over ``[1, M]^d`` accumulated by the largest coordinate."""
    side = min(n_max, int(BOX_POINTS ** (1.0 / d)))
    den = math.lcm(1, *(t.denominator for t in theta))
    num = [int(t * den) for t in theta]
    shells = np.zeros(side + 1, dtype=complex)
    axis = np.arange(1, side + 1)
    for first in range(1, side + 1):
        grids = np.meshgrid(*([np.array([first])] + [axis] * (d - 1)), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        term = np.ones(len(pts))
        for mask, e in forms:
            sel = [v for v in range(d) if mask >> v & 1]
            term = term / pts[:, sel].sum(axis=1).astype(float) ** e
        if den > 1:
            k = (pts @ np.array(num, dtype=np.int64)) % den
            term = term * np.exp(2j * np.pi * k / den)
        shells += np.bincount(pts.max(axis=1), weights=term.real, minlength=side + 1)
        if den > 1:
            shells += 1j * np.bincount(pts.max(axis=1), weights=term.imag, minlength=side + 1)
    return np.cumsum(shells), side


def _laminar(masks: Sequence[int]) -> bool:
    return all(not (x & y) or (x & y) in (x, y) for x in masks for y in masks)


# ---------------------------------------------------------------- guards


def _check_convergence(g: DecoratedGraph, cone: SignedCone, theta: Sequence[Fraction]) -> None:
    from .eisenstein import chain_phases, cone_form_product, reduce_to_prefix_chains

    d = cone.rank
    masks = [sum(1 << i for i, c in enumerate(f) if c) for f in cone.forms]
    if not g.is_tree() and g.weight < d + 1:
        raise ConvergenceGuardFailed(f"total exponent {g.weight} < rank + 1 = {d + 1}")
    if not _laminar(masks):
        return
    chains = reduce_to_prefix_chains(cone_form_product(g, cone))
    for term in chains:
        if term.t[-1] == 1 and chain_phases(term.gamma, theta)[-1] == 0:
            raise ConvergenceGuardFailed(
                f"sum diverges: reduction contains a term with last exponent 1 ({term.t})"
            )


def _free_theta(g: DecoratedGraph, cone: SignedCone, x: TorsionDecoration) -> list[Fraction]:
    from .eisenstein import free_phases

    return free_phases(g, cone, x.as_dict())


# ---------------------------------------------------------------- public


def _restricted(g: DecoratedGraph, x: TorsionDecoration, cfg: SeriesConfig) -> SeriesResult:
    basis = solve_constraints(g)
    if basis.rank == 0:
        return SeriesResult(0j, 0.0, cfg.n_max, empty=True, method="rank-zero")
    cone = normalize_signs(g, basis)
    if cone is None:
        ok, witness = sign_feasible(g, basis, cfg.sign_bound)
        if not ok:
            return SeriesResult(0j, 0.0, cfg.n_max, empty=True, method="empty")
        raise ConvergenceGuardFailed(
            f"mixed-sign summation cone (witness {witness}); only orthant cones are evaluated"
        )
    theta = _free_theta(g, cone, x)
    _check_convergence(g, cone, theta)
    d = cone.rank
    merged: dict[int, float] = {}
    for f, e in zip(cone.forms, g.edges):
        mask = sum(1 << i for i, c in enumerate(f) if c)
        merged[mask] = merged.get(mask, 0.0) + e.k * (1.0 + cfg.eta)
    forms = sorted(merged.items())
    step = math.lcm(1, *(t.denominator for t in theta))
    if _laminar([m for m, _ in forms]):
        partial = _forest_sum(forms, theta, d, cfg.n_max)
        n_eff, method = cfg.n_max, "forest"
    else:
        partial, n_eff = _box_sum(forms, theta, d, cfg.n_max)
        method = "box"
    ex = extrapolate(partial, n_eff, cfg.tail_mode, step=step, logs=d - 1)
    value = ex.value if any(theta) else complex(ex.value.real, 0.0)
    return SeriesResult(value, ex.residual, ex.n_max, method=method)


def higher_green_numeric(g: DecoratedGraph, x: TorsionDecoration | Mapping | None = None,
                         cfg: SeriesConfig = DEFAULT, restrict_signs: bool = True) -> SeriesResult:
    """Sum of ``exp(2 pi i sum_v x_v (dn)_v) / prod_e |n_e|^{k_e (1 + eta)}`` over admissible labels.

    With ``restrict_signs`` the labels obey ``sgn n_e = (-1)^nu_e``; otherwise all
    nonzero labellings are summed, one sign pattern at a time.  An empty
    sign-restricted domain yields ``value = 0`` with ``empty = True``.
    """
    if not isinstance(x, TorsionDecoration):
        x = TorsionDecoration.of(x)
    unknown = [v for v, _ in x.values if v not in g.boundary]
    if unknown:
        raise ValueError(f"decorations must sit on boundary vertices: {unknown}")
    if restrict_signs:
        return _restricted(g, x, cfg)
    total, residual, n_eff = 0j, 0.0, cfg.n_max
    nonempty = False
    for nus in itertools.product((0, 1), repeat=len(g.edges)):
        r = _restricted(g.with_signs(nus), x, cfg)
        if not r.empty:
            nonempty = True
            total += r.value
            residual += r.residual
            n_eff = min(n_eff, r.n_max)
    return SeriesResult(total, residual, n_eff, empty=not nonempty, method="sign-patterns")


def gmzv_direct(g: DecoratedGraph, cfg: SeriesConfig = DEFAULT) -> SeriesResult:
    r = higher_green_numeric(g, None, cfg)
    return SeriesResult(complex(r.value.real, 0.0), r.residual, r.n_max, r.empty, r.method)


def mordell_tornheim(parts: Sequence[int], s: int, cfg: SeriesConfig = DEFAULT) -> SeriesResult:
    """``sum_{m_i >= 1} 1 / (prod m_i^{s_i} (m_1 + ... + m_r)^s)``, truncated by the total."""
    parts = [int(p) for p in parts]
    r = len(parts)
    if r == 0 or any(p < 1 for p in parts) or s < 1 or sum(parts) + s < r + 1:
        raise ConvergenceGuardFailed(
            f"need every exponent >= 1 and total weight >= {r + 1}: parts={parts}, s={s}"
        )
    n = np.arange(cfg.n_max + 1, dtype=float)
    inv = np.zeros_like(n)
    acc = None
    for p in parts:
        inv[1:] = n[1:] ** -p
        acc = inv.copy() if acc is None else _conv(acc, inv, cfg.n_max)
    acc[1:] /= n[1:] ** s
    partial = np.cumsum(acc)
    ex = extrapolate(partial, cfg.n_max, cfg.tail_mode, logs=r - 1)
    return SeriesResult(complex(ex.value.real, 0.0), ex.residual, ex.n_max, method="convolution")

