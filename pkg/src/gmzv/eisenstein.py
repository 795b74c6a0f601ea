"""Reduction of tree sums to multiple zeta values by partial fractions.

A summand ``prod_i L_i(m)^{-k_i}`` with {0,1} linear forms ``L_i`` whose supports
form a laminar family is rewritten with

    1/(a^i b^j) = sum_{r+s=i+j} [C(r-1,i-1) / ((a+b)^r b^s) + C(r-1,j-1) / ((a+b)^r a^s)]

applied to disjoint sibling forms until the supports form a single chain
``{g_1} < {g_1,g_2} < ... < {g_1..g_d}``.  A chain is a multiple zeta value
after the substitution ``N_j = m_{g_1} + ... + m_{g_j}``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .combination import IntCombination, MzvIndex, PolylogTerm
from .errors import (
    DivergentTerm,
    NotATree,
    NotReducible,
    OverlappingSupports,
    SignInfeasible,
    SignNormalizationFailed,
)
from .graph import (
    DecoratedGraph,
    SignedCone,
    incidence_matrix,
    normalize_signs,
    sign_feasible,
    solve_constraints,
)


@dataclass(frozen=True, order=True)
class LinearForm:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if any(c not in (0, 1) for c in self.coeffs) or not any(self.coeffs):
            raise ValueError(f"not a nonzero 0/1 form: {self.coeffs}")

    @classmethod
    def from_mask(cls, mask: int, d: int) -> "LinearForm":
        return cls(tuple((mask >> i) & 1 for i in range(d)))

    @property
    def mask(self) -> int:
        return sum(1 << i for i, c in enumerate(self.coeffs) if c)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        if self.mask & other.mask:
            raise OverlappingSupports(f"{self.coeffs} and {other.coeffs} overlap")
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def at(self, m: Sequence[int]) -> int:
        return sum(x for c, x in zip(self.coeffs, m) if c)


@dataclass(frozen=True)
class FormProduct:
    """``coefficient / prod L^e`` over the listed (form, exponent) factors."""

    factors: tuple[tuple[LinearForm, int], ...]
    coefficient: int = 1

    def __post_init__(self):
        if self.coefficient == 0:
            raise ValueError("zero coefficient")
        if any(e < 1 for _, e in self.factors):
            raise ValueError("exponents must be positive")

    @property
    def dim(self) -> int:
        return len(self.factors[0][0].coeffs) if self.factors else 0

    @property
    def weight(self) -> int:
        return sum(e for _, e in self.factors)

    def at(self, m: Sequence[int]) -> Fraction:
        den = 1
        for form, e in self.factors:
            den *= form.at(m) ** e
        return Fraction(self.coefficient, den)


@dataclass(frozen=True, order=True)
class PrefixTerm:
    """``1 / prod_j (m_{gamma_1} + ... + m_{gamma_j})^{t_j}``; ``gamma`` is 0-based."""

    gamma: tuple[int, ...]
    t: tuple[int, ...]

    def at(self, m: Sequence[int]) -> Fraction:
        den, acc = 1, 0
        for g, t in zip(self.gamma, self.t):
            acc += m[g]
            den *= acc**t
        return Fraction(1, den)

    @property
    def weight(self) -> int:
        return sum(self.t)


def combination_at(c: Mapping, m: Sequence[int]) -> Fraction:
    """Exact value of a combination of prefix terms or form fragments at ``m``."""
    total = Fraction(0)
    for key, coeff in c.items():
        if isinstance(key, PrefixTerm):
            total += coeff * key.at(m)
        else:
            total += coeff * FormProduct(tuple(key)).at(m)
    return total


# ---------------------------------------------------------------- one step


def eis_step(a: LinearForm, i: int, b: LinearForm, j: int) -> IntCombination:
    """Partial-fraction expansion of ``1/(a^i b^j)``.

    Keys are fragments ``((a+b, r), (b, s))`` or ``((a+b, r), (a, s))``.
    """
    ab = a + b
    out: dict = {}
    for r in range(1, i + j):
        s = i + j - r
        for other, top in ((b, i), (a, j)):
            c = math.comb(r - 1, top - 1)
            if c:
                key = ((ab, r), (other, s))
                out[key] = out.get(key, 0) + c
    return IntCombination(out)


# ---------------------------------------------------------------- engine

State = tuple[tuple[int, int], ...]  # sorted (mask, exponent), masks distinct


def _canon(pairs) -> State:
    merged: dict[int, int] = {}
    for mask, e in pairs:
        merged[mask] = merged.get(mask, 0) + e
    return tuple(sorted(merged.items()))


def _laminar(masks: Sequence[int]) -> bool:
    for x in masks:
        for y in masks:
            if x & y and (x & y) not in (x, y):
                return False
    return True


def _parent(mask: int, masks: Sequence[int]) -> int:
    best = 0
    for y in masks:
        if y != mask and y & mask == mask and (best == 0 or y.bit_count() < best.bit_count()):
            best = y
    return best


def _sibling_pair(state: State):
    masks = [m for m, _ in state]
    parents = {m: _parent(m, masks) for m in masks}
    best = None
    for x, ex in state:
        for y, ey in state:
            if x < y and not (x & y) and parents[x] == parents[y]:
                kx = (_bits(x), ex)
                ky = (_bits(y), ey)
                key = max(kx, ky), min(kx, ky)
                if best is None or key > best[0]:
                    best = (key, (x, ex), (y, ey))
    return None if best is None else best[1:]


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _measure(state: State, d: int) -> int:
    return sum(d - m.bit_count() for m, _ in state)


def _rewrite(state: State, a, b) -> list[tuple[State, int]]:
    (ma, i), (mb, j) = a, b
    rest = [p for p in state if p[0] not in (ma, mb)]
    out = []
    for r in range(1, i + j):
        s = i + j - r
        for keep, top in ((mb, i), (ma, j)):
            c = math.comb(r - 1, top - 1)
            if c:
                out.append((_canon(rest + [(ma | mb, r), (keep, s)]), c))
    return out


def _chain(state: State, d: int) -> PrefixTerm:
    prev = 0
    gamma, t = [], []
    for mask, e in sorted(state, key=lambda p: p[0].bit_count()):
        new = mask & ~prev
        if mask & prev != prev or new.bit_count() != 1:
            raise NotReducible(f"final supports do not form a full chain: {state}")
        gamma.append(new.bit_length() - 1)
        t.append(e)
        prev = mask
    if len(gamma) != d:
        raise NotReducible(f"chain has length {len(gamma)}, expected {d}")
    return PrefixTerm(tuple(gamma), tuple(t))


def reduce_to_prefix_chains(fp: FormProduct) -> IntCombination:
    """Rewrite a laminar form product into an exact combination of prefix chains.

    The rewrite always acts on the lexicographically largest pair of disjoint
    forms sharing a parent, which keeps the supports laminar.  The quantity
    ``sum (d - |support|)`` drops at every step, so the process terminates;
    states are merged across branches before being expanded further.
    """
    d = fp.dim
    start = _canon((f.mask, e) for f, e in fp.factors)
    if not _laminar([m for m, _ in start]):
        raise NotReducible("supports are not laminar")
    heap: list = []
    pending: dict[State, int] = {}

    def push(st: State, c: int):
        if st in pending:
            pending[st] += c
        else:
            pending[st] = c
            heapq.heappush(heap, (-_measure(st, d), st))

    push(start, fp.coefficient)
    result: dict[PrefixTerm, int] = {}
    while heap:
        _, st = heapq.heappop(heap)
        c = pending.pop(st)
        if c == 0:
            continue
        pair = _sibling_pair(st)
        if pair is None:
            term = _chain(st, d)
            result[term] = result.get(term, 0) + c
            continue
        for new, k in _rewrite(st, *pair):
            push(new, c * k)
    return IntCombination(result)


def prefix_to_mzv(c: Mapping[PrefixTerm, int]) -> IntCombination:
    out: dict[MzvIndex, int] = {}
    for term, coeff in c.items():
        idx = MzvIndex(term.t)
        if not idx.convergent:
            raise DivergentTerm(f"reduction produced divergent {idx}")
        out[idx] = out.get(idx, 0) + coeff
    return IntCombination(out)


# ---------------------------------------------------------------- graphs


def signed_cone(g: DecoratedGraph) -> SignedCone:
    """Orthant description of the sign-restricted labels, or an error explaining why not."""
    basis = solve_constraints(g)
    cone = normalize_signs(g, basis)
    if cone is not None:
        return cone
    ok, witness = sign_feasible(g, basis)
    if not ok:
        raise SignInfeasible("no labelling has the prescribed signs; the sum is empty")
    raise SignNormalizationFailed(
        f"sign-restricted labels (e.g. free values {witness}) do not form a positive orthant"
    )


def cone_form_product(g: DecoratedGraph, cone: SignedCone) -> FormProduct:
    factors = [(LinearForm(f), e.k) for f, e in zip(cone.forms, g.edges)]
    return FormProduct(tuple(factors))


def tree_to_form_product(g: DecoratedGraph) -> tuple[FormProduct, tuple[str, ...]]:
    if not g.is_tree():
        raise NotATree(f"graph has {len(g.edges)} edges on {len(g.vertices)} vertices; not a tree")
    cone = signed_cone(g)
    return cone_form_product(g, cone), cone.free_edges


def gmzv_to_mzv(g: DecoratedGraph) -> IntCombination:
    try:
        fp, _ = tree_to_form_product(g)
    except SignInfeasible:
        return IntCombination()
    return prefix_to_mzv(reduce_to_prefix_chains(fp))


def free_phases(g: DecoratedGraph, cone: SignedCone, x: Mapping[str, Fraction]) -> list[Fraction]:
    """Phase per positive free variable, exact and reduced mod 1."""
    inc = incidence_matrix(g)
    vidx = {v: i for i, v in enumerate(g.vertices)}
    out = []
    for f in range(cone.rank):
        acc = Fraction(0)
        for v, xv in x.items():
            if not xv:
                continue
            row = inc[vidx[v]]
            coeff = sum(int(row[e]) * cone.signs[e] * cone.forms[e][f] for e in range(len(g.edges)))
            acc += coeff * Fraction(xv)
        out.append(acc % 1)
    return out


def chain_phases(gamma: Sequence[int], theta: Sequence[Fraction]) -> tuple[Fraction, ...]:
    th = [theta[g] for g in gamma] + [Fraction(0)]
    return tuple((th[j] - th[j + 1]) % 1 for j in range(len(gamma)))


def gmzv_to_polylog(g: DecoratedGraph, x: Mapping[str, Fraction] | None = None) -> IntCombination:
    x = dict(x or {})
    if not g.is_tree():
        raise NotATree(f"graph has {len(g.edges)} edges on {len(g.vertices)} vertices; not a tree")
    try:
        cone = signed_cone(g)
    except SignInfeasible:
        return IntCombination()
    theta = free_phases(g, cone, x)
    chains = reduce_to_prefix_chains(cone_form_product(g, cone))
    out: dict[PolylogTerm, int] = {}
    for term, coeff in chains.items():
        pt = PolylogTerm(term.t, chain_phases(term.gamma, theta))
        if not pt.convergent:
            raise DivergentTerm(f"reduction produced divergent {pt}")
        out[pt] = out.get(pt, 0) + coeff
    return IntCombination(out)
