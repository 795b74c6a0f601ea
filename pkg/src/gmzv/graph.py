"""Decorated graphs, flow constraints and sign normalisation.

Edge labels live on oriented edges.  At every vertex outside the boundary
set the signed incidence sum (labels of incoming edges minus labels of
outgoing edges) must vanish.  The solution lattice has rank
``|E| - |V| + |S|`` and is parameterised by the labels of a set of free
edges.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BoundaryMissingExternal,
    Disconnected,
    GraphValidationError,
    InconsistentSigns,
    LoopEdge,
    NonPositiveSubdivision,
)


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    k: int = 1
    nu: int = 0

    @property
    def sign(self) -> int:
        return -1 if self.nu else 1


@dataclass(frozen=True)
class DecoratedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    boundary: frozenset[str]

    @property
    def internal(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.boundary)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e.k for e in self.edges)

    @property
    def weight(self) -> int:
        return sum(e.k for e in self.edges)

    def degree(self, v: str) -> int:
        return sum((e.tail == v) + (e.head == v) for e in self.edges)

    def is_tree(self) -> bool:
        return len(self.edges) == len(self.vertices) - 1

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def with_signs(self, nus: Sequence[int]) -> "DecoratedGraph":
        edges = tuple(replace(e, nu=int(n)) for e, n in zip(self.edges, nus))
        return replace(self, edges=edges)

    def with_exponents(self, ks: Sequence[int]) -> "DecoratedGraph":
        edges = tuple(replace(e, k=int(k)) for e, k in zip(self.edges, ks))
        return build_graph(to_record(replace(self, edges=edges)))

    def to_record(self) -> dict:
        return to_record(self)


@dataclass(frozen=True)
class FlowBasis:
    """Integer parametrisation of all admissible edge labellings.

    ``matrix[i][j]`` is the coefficient of free variable ``j`` in the label of
    edge ``i``; the free variables are the labels of ``free_edges``.
    """

    rank: int
    matrix: tuple[tuple[int, ...], ...]
    free_edges: tuple[str, ...]

    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(len(self.matrix), self.rank)

    def labels(self, free_values: Sequence[int]) -> list[int]:
        return [sum(c * x for c, x in zip(row, free_values)) for row in self.matrix]


@dataclass(frozen=True)
class SignedCone:
    """Edge labels written as ``n_e = sign_e * <forms[e], m>`` with ``m`` positive.

    ``free_edges[j]`` carries ``m_j`` up to its prescribed sign, so the
    sign-restricted summation domain is exactly ``m`` in the positive orthant.
    """

    free_edges: tuple[str, ...]
    forms: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.free_edges)


# ---------------------------------------------------------------- building


def _as_str(x: Any) -> str:
    return str(x)


def build_graph(record: Mapping[str, Any]) -> DecoratedGraph:
    """Validate a graph record with keys ``vertices``, ``edges``, ``boundary``."""
    try:
        vertices = tuple(_as_str(v) for v in record["vertices"])
        raw_edges = list(record["edges"])
        boundary = frozenset(_as_str(v) for v in record["boundary"])
    except KeyError as exc:
        raise GraphValidationError(f"missing key {exc}") from None
    if len(set(vertices)) != len(vertices):
        raise GraphValidationError("duplicate vertex ids")
    vset = set(vertices)
    edges = []
    for raw in raw_edges:
        if isinstance(raw, Edge):
            e = raw
        else:
            e = Edge(
                id=_as_str(raw["id"]),
                tail=_as_str(raw["tail"]),
                head=_as_str(raw["head"]),
                k=raw.get("k", 1),
                nu=raw.get("nu", 0),
            )
        if e.tail not in vset or e.head not in vset:
            raise GraphValidationError(f"edge {e.id} references an unknown vertex")
        if e.tail == e.head:
            raise LoopEdge(f"edge {e.id} is a loop at {e.tail}; loops are not allowed")
        if not isinstance(e.k, int) or isinstance(e.k, bool) or e.k < 1:
            raise NonPositiveSubdivision(f"edge {e.id} has exponent {e.k!r}; need an integer >= 1")
        if e.nu not in (0, 1):
            raise GraphValidationError(f"edge {e.id} has sign {e.nu!r}; need 0 or 1")
        edges.append(e)
    if len({e.id for e in edges}) != len(edges):
        raise GraphValidationError("duplicate edge ids")
    if not boundary:
        raise BoundaryMissingExternal("boundary set is empty")
    if not boundary <= vset:
        raise GraphValidationError("boundary contains unknown vertices")

    g = DecoratedGraph(vertices, tuple(edges), boundary)
    if not _connected(g):
        raise Disconnected("graph is not connected")
    for v in vertices:
        if g.degree(v) == 1 and v not in boundary:
            raise BoundaryMissingExternal(f"external vertex {v} is missing from the boundary set")
    return g


def _connected(g: DecoratedGraph) -> bool:
    if not g.vertices:
        return False
    adj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        adj[e.tail].add(e.head)
        adj[e.head].add(e.tail)
    seen = {g.vertices[0]}
    stack = [g.vertices[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.vertices)


def to_record(g: DecoratedGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head, "k": e.k, "nu": e.nu} for e in g.edges
        ],
        "boundary": [v for v in g.vertices if v in g.boundary],
    }


def load_graph(path: str | Path) -> DecoratedGraph:
    with open(path) as fh:
        return build_graph(json.load(fh))


# ---------------------------------------------------------------- linear algebra


def incidence_matrix(g: DecoratedGraph) -> np.ndarray:
    """``|V| x |E|`` matrix with +1 at the head and -1 at the tail of each edge."""
    vidx = {v: i for i, v in enumerate(g.vertices)}
    a = np.zeros((len(g.vertices), len(g.edges)), dtype=np.int64)
    for j, e in enumerate(g.edges):
        a[vidx[e.head], j] += 1
        a[vidx[e.tail], j] -= 1
    return a


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    m = [r[:] for r in rows]
    pivots: list[int] = []
    ncols = len(m[0]) if m else 0
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _rank(rows: list[list[Fraction]]) -> int:
    if not rows:
        return 0
    return len(_rref(rows)[1])


def _solve_square(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    """Return ``X`` with ``X a = b`` (row-vector convention), ``a`` invertible."""
    n = len(a)
    # transpose: a^T X^T = b^T
    at = [[a[j][i] for j in range(n)] for i in range(n)]
    cols = []
    for row in b:
        aug = [at[i][:] + [row[i]] for i in range(n)]
        red, piv = _rref(aug)
        if piv != list(range(n)):
            raise ValueError("singular")
        cols.append([red[i][n] for i in range(n)])
    return cols


def homology_rank(g: DecoratedGraph) -> int:
    return len(g.edges) - len(g.vertices) + len(g.boundary)


def _kernel(g: DecoratedGraph) -> list[list[Fraction]]:
    """Kernel of the internal-vertex rows; returned as ``|E|`` rows of length d."""
    inc = incidence_matrix(g)
    vidx = {v: i for i, v in enumerate(g.vertices)}
    ne = len(g.edges)
    rows = [[Fraction(int(x)) for x in inc[vidx[v]]] for v in g.internal]
    if not rows or not any(any(r) for r in rows):
        return [[Fraction(int(i == j)) for j in range(ne)] for i in range(ne)]
    red, piv = _rref(rows)
    free = [c for c in range(ne) if c not in piv]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ne
        vec[f] = Fraction(1)
        for i, p in enumerate(piv):
            vec[p] = -red[i][f]
        basis.append(vec)
    return [[basis[j][i] for j in range(len(basis))] for i in range(ne)]


def _reparametrise(kernel: list[list[Fraction]], free_idx: Sequence[int]) -> list[list[int]]:
    kf = [kernel[i] for i in free_idx]
    mat = _solve_square(kf, kernel)
    out = []
    for row in mat:
        if any(x.denominator != 1 for x in row):
            raise ArithmeticError("non-integral flow matrix")
        out.append([int(x) for x in row])
    return out


def solve_constraints(g: DecoratedGraph) -> FlowBasis:
    """Integer basis of the admissible labellings, free edges chosen greedily in edge order."""
    d = homology_rank(g)
    if d == 0:
        return FlowBasis(0, tuple(() for _ in g.edges), ())
    kernel = _kernel(g)
    assert len(kernel[0]) == d
    chosen: list[int] = []
    for i in range(len(g.edges)):
        if _rank([kernel[j] for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
        if len(chosen) == d:
            break
    mat = _reparametrise(kernel, chosen)
    return FlowBasis(d, tuple(tuple(r) for r in mat), tuple(g.edges[i].id for i in chosen))


def check_flow(g: DecoratedGraph, basis: FlowBasis) -> bool:
    """True iff every column of the basis satisfies the internal constraints."""
    if basis.rank == 0:
        return True
    inc = incidence_matrix(g)
    vidx = [g.vertices.index(v) for v in g.internal]
    return bool(np.all(inc[vidx] @ basis.array() == 0))


# ---------------------------------------------------------------- signs


def _shell(d: int, r: int) -> np.ndarray:
    """Integer points of ``[-r, r]^d`` with max-norm exactly ``r``, lexicographic."""
    axis = np.arange(-r, r + 1)
    pts = np.array(list(itertools.product(axis, repeat=d)), dtype=np.int64).reshape(-1, d)
    return pts[np.abs(pts).max(axis=1) == r]


def sign_feasible(g: DecoratedGraph, basis: FlowBasis, bound: int = 8) -> tuple[bool, tuple[int, ...] | None]:
    """Search ``[-bound, bound]^d`` for labels that are nonzero with the prescribed signs.

    Points are visited by increasing max-norm, lexicographically within a shell,
    so the returned witness is deterministic.
    """
    signs = np.array([e.sign for e in g.edges], dtype=np.int64)
    if basis.rank == 0:
        return False, None
    mat = basis.array()
    for r in range(1, bound + 1):
        pts = _shell(basis.rank, r)
        labels = pts @ mat.T
        ok = np.all(labels * signs > 0, axis=1)
        if ok.any():
            return True, tuple(int(x) for x in pts[np.argmax(ok)])
    return False, None


def _try_free_set(g: DecoratedGraph, basis: FlowBasis, free_idx: Sequence[int]) -> SignedCone | None:
    fb = basis.array()
    sub = fb[list(free_idx)]
    if round(abs(np.linalg.det(sub.astype(float)))) != 1:
        return None
    kern = [[Fraction(int(x)) for x in row] for row in basis.matrix]
    mat = np.array(_reparametrise(kern, free_idx), dtype=np.int64)
    s = np.array([e.sign for e in g.edges], dtype=np.int64)
    sf = s[list(free_idx)]
    forms = (s[:, None] * mat) * sf[None, :]
    if np.any(forms < 0) or np.any(forms > 1) or np.any(forms.sum(axis=1) == 0):
        return None
    return SignedCone(
        free_edges=tuple(g.edges[i].id for i in free_idx),
        forms=tuple(tuple(int(x) for x in row) for row in forms),
        signs=tuple(int(x) for x in s),
        matrix=tuple(tuple(int(x) for x in row) for row in mat),
    )


def normalize_signs(g: DecoratedGraph, basis: FlowBasis | None = None) -> SignedCone | None:
    """Find free edges making the sign-restricted cone a positive orthant.

    Returns ``None`` when no choice of free edges works.  Each edge label then
    reads ``sign_e * <form_e, m>`` with a {0,1} form and ``m`` strictly positive.
    """
    basis = basis or solve_constraints(g)
    d = basis.rank
    if d == 0:
        return None
    idx = {e.id: i for i, e in enumerate(g.edges)}
    first = [idx[f] for f in basis.free_edges]
    candidates = itertools.chain([first], itertools.combinations(range(len(g.edges)), d))
    for cand in candidates:
        cone = _try_free_set(g, basis, list(cand))
        if cone is not None:
            return cone
    return None


# ---------------------------------------------------------------- valency two


def normalize_valency_two(g: DecoratedGraph) -> DecoratedGraph:
    """Merge the two edges at each internal vertex of valency two.

    The merged edge keeps the id, position, orientation and sign of the first
    of the two edges (in edge order) and carries the summed exponent.  Merges
    that would produce a loop are skipped.
    """
    edges = list(g.edges)
    vertices = list(g.vertices)
    changed = True
    while changed:
        changed = False
        for v in vertices:
            if v in g.boundary:
                continue
            inc = [i for i, e in enumerate(edges) if v in (e.tail, e.head)]
            if len(inc) != 2:
                continue
            i1, i2 = inc
            e1, e2 = edges[i1], edges[i2]
            u = e1.tail if e1.head == v else e1.head
            w = e2.tail if e2.head == v else e2.head
            if u == w:
                continue
            # orientation relative to the path u -> v -> w
            o1 = 1 if e1.head == v else -1
            o2 = 1 if e2.tail == v else -1
            if o1 * e1.sign != o2 * e2.sign:
                raise InconsistentSigns(
                    f"edges {e1.id} and {e2.id} at vertex {v} force labels of opposite sign"
                )
            if o1 == 1:
                merged = Edge(e1.id, u, w, e1.k + e2.k, e1.nu)
            else:
                merged = Edge(e1.id, w, u, e1.k + e2.k, e1.nu)
            edges[i1] = merged
            del edges[i2]
            vertices.remove(v)
            changed = True
            break
    if len(edges) == len(g.edges):
        return g
    return build_graph({"vertices": vertices, "edges": edges, "boundary": sorted(g.boundary)})


# ---------------------------------------------------------------- helpers


def edges_from_tuples(items: Iterable[tuple]) -> list[dict]:
    """Convenience: ``(id, tail, head[, k[, nu]])`` tuples to edge records."""
    out = []
    for it in items:
        eid, tail, head, *rest = it
        k = rest[0] if len(rest) > 0 else 1
        nu = rest[1] if len(rest) > 1 else 0
        out.append({"id": eid, "tail": tail, "head": head, "k": k, "nu": nu})
    return out


def rooted_signs(g: DecoratedGraph, root: str) -> DecoratedGraph:
    """Signs making every label positive in the direction of a boundary vertex ``root``.

    For a tree this gives an orthant-shaped summation cone: each edge carries
    the total flow of the boundary vertices on its far side.
    """
    if not g.is_tree():
        raise ValueError("rooted signs are defined for trees")
    adj: dict[str, list[tuple[str, Edge]]] = {v: [] for v in g.vertices}
    for e in g.edges:
        adj[e.tail].append((e.head, e))
        adj[e.head].append((e.tail, e))
    toward: dict[str, int] = {}
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w, e in adj[v]:
            if w in seen:
                continue
            seen.add(w)
            # flow runs from w to v
            toward[e.id] = 0 if e.head == v else 1
            stack.append(w)
    return g.with_signs([toward[e.id] for e in g.edges])
