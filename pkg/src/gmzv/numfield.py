"""Real quadratic fields: lattices, unit reduction, Hecke transform, torus integrals.

Elements of ``F = Q(sqrt D)`` are pairs ``(a, b)`` meaning ``a + b*omega`` with
``omega = (1 + sqrt D)/2`` when ``D = 1 mod 4`` and ``omega = sqrt D`` otherwise.
The unit torus ``U_R = {(u, 1/u)}`` is parametrised by ``u_1 = e^v`` with Haar
measure ``dv``; ``U = <eps^m>`` acts by shifting ``v`` by ``m log eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .config import QUAD_TOL
from .errors import GammaPole, PreconditionError, QuadratureNonConvergent

# totally positive generator of the norm-one units, coordinates in (1, omega)
UNITS = {2: (3, 2), 3: (2, 1), 5: (1, 1), 13: (4, 3)}

Elem = tuple[Fraction, Fraction]


def _frac_pair(x) -> Elem:
    a, b = x
    return Fraction(a), Fraction(b)


@dataclass(frozen=True)
class RealQuadraticField:
    D: int

    def __post_init__(self):
        if self.D not in UNITS:
            raise PreconditionError(f"D = {self.D} unsupported; choose one of {sorted(UNITS)}")

    @property
    def half_integral(self) -> bool:
        return self.D % 4 == 1

    @property
    def trace_omega(self) -> int:
        return 1 if self.half_integral else 0

    @property
    def norm_omega(self) -> Fraction:
        return Fraction(1 - self.D, 4) if self.half_integral else Fraction(-self.D)

    @property
    def omegas(self) -> tuple[float, float]:
        r = math.sqrt(self.D)
        return ((1 + r) / 2, (1 - r) / 2) if self.half_integral else (r, -r)

    @property
    def epsilon(self) -> Elem:
        return _frac_pair(UNITS[self.D])

    @property
    def log_epsilon(self) -> float:
        return math.log(self.embed(self.epsilon)[0])

    # exact arithmetic
    def mul(self, x, y) -> Elem:
        a, b = _frac_pair(x)
        c, d = _frac_pair(y)
        # omega^2 = trace * omega - norm
        bd = b * d
        return a * c - bd * self.norm_omega, a * d + b * c + bd * self.trace_omega

    def conj(self, x) -> Elem:
        a, b = _frac_pair(x)
        return a + b * self.trace_omega, -b

    def norm(self, x) -> Fraction:
        a, b = _frac_pair(x)
        return a * a + a * b * self.trace_omega + b * b * self.norm_omega

    def trace(self, x) -> Fraction:
        a, b = _frac_pair(x)
        return 2 * a + b * self.trace_omega

    def power(self, x, k: int) -> Elem:
        if k < 0:
            n = self.norm(x)
            c = self.conj(x)
            x = (c[0] / n, c[1] / n)
            k = -k
        out: Elem = (Fraction(1), Fraction(0))
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def embed(self, x) -> tuple[float, float]:
        a, b = (float(t) for t in _frac_pair(x))
        w1, w2 = self.omegas
        return a + b * w1, a + b * w2

    def ring_of_integers(self) -> "Lattice":
        return Lattice(self, ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))))


def field(D: int) -> RealQuadraticField:
    return RealQuadraticField(D)


@dataclass(frozen=True)
class Lattice:
    """A full-rank Z-lattice in F with basis ``basis[0], basis[1]``."""

    field: RealQuadraticField
    basis: tuple[Elem, Elem]

    @cached_property
    def embedding(self) -> np.ndarray:
        """Columns are the embeddings of the basis vectors."""
        cols = [self.field.embed(e) for e in self.basis]
        return np.array(cols, dtype=float).T

    @property
    def covolume(self) -> float:
        return abs(float(np.linalg.det(self.embedding)))

    def dual(self) -> "Lattice":
        """Basis ``f_i`` with ``Tr(f_i e_j) = delta_ij``."""
        f = self.field
        t = [[f.trace(f.mul(x, y)) for y in self.basis] for x in self.basis]
        det = t[0][0] * t[1][1] - t[0][1] * t[1][0]
        inv = [[t[1][1] / det, -t[0][1] / det], [-t[1][0] / det, t[0][0] / det]]
        out = []
        for i in range(2):
            a = inv[i][0] * self.basis[0][0] + inv[i][1] * self.basis[1][0]
            b = inv[i][0] * self.basis[0][1] + inv[i][1] * self.basis[1][1]
            out.append((a, b))
        return Lattice(self.field, (out[0], out[1]))

    def scaled(self, alpha) -> "Lattice":
        return Lattice(self.field, tuple(self.field.mul(alpha, e) for e in self.basis))

    def element(self, coords: Sequence) -> Elem:
        c0, c1 = (Fraction(c) for c in coords)
        (a0, b0), (a1, b1) = self.basis
        return c0 * a0 + c1 * a1, c0 * b0 + c1 * b1

    def coords(self, x) -> tuple[Fraction, Fraction]:
        """Coordinates of ``x`` in this basis (rational)."""
        a, b = _frac_pair(x)
        (a0, b0), (a1, b1) = self.basis
        det = a0 * b1 - a1 * b0
        return (a * b1 - a1 * b) / det, (a0 * b - a * b0) / det

    def act(self, alpha, coords) -> tuple[Fraction, Fraction]:
        """Coordinates of ``alpha * x`` for ``x`` given by coordinates."""
        return self.coords(self.field.mul(alpha, self.element(coords)))

    def integer_frame(self) -> tuple[np.ndarray, int]:
        """Integer matrix ``P`` and positive ``q`` with element coords ``= P c / q``."""
        q = math.lcm(*(x.denominator for e in self.basis for x in e))
        p = np.array([[int(self.basis[j][i] * q) for j in range(2)] for i in range(2)], dtype=np.int64)
        return p, q


def reduction_sign(fld: RealQuadraticField, a, b):
    """Sign of ``sigma_1(x)^2 - sigma_2(x)^2`` for ``x = a + b omega`` (exact for integers)."""
    return np.sign(b) * np.sign(2 * a + b * fld.trace_omega)


def in_fundamental_domain(fld: RealQuadraticField, a, b, m: int = 1):
    """``0 <= log|s1/s2| / (2 m log eps) < 1``, decided exactly on integer coordinates."""
    ea, eb = fld.power(fld.epsilon, -m)
    ea, eb = int(ea), int(eb)
    tw, nw = fld.trace_omega, int(fld.norm_omega)
    a2 = a * ea - b * eb * nw
    b2 = a * eb + b * ea + b * eb * tw
    return (reduction_sign(fld, a, b) >= 0) & (reduction_sign(fld, a2, b2) < 0)


def reduce_mod_units(fld: RealQuadraticField, x, m: int = 1) -> Elem:
    """Representative of ``x * <eps^m>`` in the fundamental domain (exact)."""
    x = _frac_pair(x)
    s1, s2 = fld.embed(x)
    k = math.floor(math.log(abs(s1 / s2)) / (2 * m * fld.log_epsilon))
    y = fld.mul(x, fld.power(fld.epsilon, -m * k))
    q = math.lcm(y[0].denominator, y[1].denominator)
    step_down = fld.power(fld.epsilon, -m)
    step_up = fld.power(fld.epsilon, m)
    for _ in range(8):
        ia, ib = int(y[0] * q), int(y[1] * q)
        if reduction_sign(fld, ia, ib) < 0:
            y = fld.mul(y, step_up)
        elif not in_fundamental_domain(fld, ia, ib, m):
            y = fld.mul(y, step_down)
        else:
            return y
    raise ArithmeticError("unit reduction did not settle")


# ---------------------------------------------------------------- enumeration


@dataclass(frozen=True)
class LatticePoints:
    coords: np.ndarray  # integer coordinates in the lattice basis, shape (n, 2)
    y: np.ndarray  # embeddings, shape (n, 2)
    norm: np.ndarray  # |sigma_1 sigma_2|


def _box_points(lat: Lattice, y1_max: float, y2_max: float) -> LatticePoints:
    a = lat.embedding
    ainv = np.linalg.inv(a)
    ext = np.abs(ainv) @ np.array([y1_max, y2_max])
    c0 = np.arange(-math.ceil(ext[0]), math.ceil(ext[0]) + 1)
    c1 = np.arange(-math.ceil(ext[1]), math.ceil(ext[1]) + 1)
    g0, g1 = np.meshgrid(c0, c1, indexing="ij")
    c = np.stack([g0.ravel(), g1.ravel()], axis=1)
    y = c @ a.T
    keep = (np.abs(y[:, 0]) <= y1_max * (1 + 1e-12)) & (np.abs(y[:, 1]) <= y2_max * (1 + 1e-12))
    keep &= np.any(c != 0, axis=1)
    c, y = c[keep], y[keep]
    order = np.lexsort((c[:, 1], c[:, 0]))
    c, y = c[order], y[order]
    return LatticePoints(c, y, np.abs(y[:, 0] * y[:, 1]))


def orbit_representatives(lat: Lattice, bound: float, m: int = 1) -> LatticePoints:
    """Nonzero lattice points with ``|N| <= bound``, one per ``<eps^m>``-orbit."""
    fld = lat.field
    em = math.exp(m * fld.log_epsilon)
    pts = _box_points(lat, em * math.sqrt(bound), math.sqrt(bound))
    p, q = lat.integer_frame()
    ab = pts.coords @ p.T  # q * (a, b)
    keep = in_fundamental_domain(fld, ab[:, 0], ab[:, 1], m) & (pts.norm <= bound * (1 + 1e-12))
    return LatticePoints(pts.coords[keep], pts.y[keep], pts.norm[keep])


def _sign_weight(y: np.ndarray, nu: Sequence[int]) -> np.ndarray:
    w = np.ones(len(y))
    for j, n in enumerate(nu):
        if n:
            w = w * np.sign(y[:, j])
    return w


def _phase(coords: np.ndarray, x: Sequence | None) -> np.ndarray | None:
    if x is None or not any(Fraction(t) for t in x):
        return None
    x = [Fraction(t) for t in x]
    den = math.lcm(*(t.denominator for t in x))
    num = np.array([int(t * den) for t in x], dtype=np.int64)
    k = (coords @ num) % den
    return np.exp(2j * np.pi * k / den)


def stabilizer_power(lat: Lattice, x: Sequence | None) -> int:
    """Least ``m >= 1`` with ``eps^m x = x`` modulo the lattice."""
    if x is None:
        return 1
    x = tuple(Fraction(t) for t in x)
    eps = lat.field.epsilon
    cur = x
    for m in range(1, 10_000):
        cur = tuple(c % 1 for c in lat.act(eps, cur))
        if all((c - t).denominator == 1 for c, t in zip(cur, x)):
            return m
    raise ArithmeticError("torsion point has no finite stabiliser power")


def partial_zeta_rq(fld_or_lattice, nu: Sequence[int] = (0, 0), w: float = 2.0, bound: float = 1e3,
                    x: Sequence | None = None, unit_power: int | None = None) -> complex:
    """``sum sgn(n)^nu e(Tr(n x)) / |N n|^w`` over orbit representatives with ``|N n| <= bound``.

    The default lattice is the trace dual of the ring of integers; ``x`` is a
    point of ``F_R / O_F`` in coordinates of the ring-of-integers basis and is
    paired exactly with the dual lattice.  Orbits of ``U = <eps^m>`` are listed
    as ``eps^k n`` (``0 <= k < m``) over representatives ``n`` modulo ``eps``.
    """
    if w <= 1:
        raise PreconditionError("exponent must exceed 1")
    lat = fld_or_lattice.ring_of_integers().dual() if isinstance(fld_or_lattice, RealQuadraticField) else fld_or_lattice
    base = lat.dual()
    m = unit_power or stabilizer_power(base, x)
    pts = orbit_representatives(lat, bound, 1)
    terms = _sign_weight(pts.y, nu) / pts.norm**w
    if x is None:
        total = m * terms.astype(complex)
    else:
        total = np.zeros(len(terms), dtype=complex)
        xk = tuple(Fraction(t) for t in x)
        for _ in range(m):
            ph = _phase(pts.coords, xk)
            total += terms if ph is None else terms * ph
            xk = tuple(c % 1 for c in base.act(lat.field.epsilon, xk))
    return complex(math.fsum(total.real), math.fsum(total.imag))


# ---------------------------------------------------------------- green function


@dataclass(frozen=True)
class GreenValue:
    value: complex
    residual: float
    count: int


def plectic_green_numeric(lat: Lattice | RealQuadraticField, x: Sequence = (0, 0), u: Sequence[float] = (1.0, 1.0),
                          nu: Sequence[int] = (0, 0), radius: float = 200.0, eta: float = 0.0) -> GreenValue:
    """Truncated ``sum sgn(n)^nu e(Tr(n x)) / ||u n||^{2 + eta}`` over the dual lattice.

    ``lat`` is the lattice ``I``; ``x`` its coordinates in the basis of ``I``;
    the sum runs over ``||u n|| <= radius``.  The residual compares with the
    truncation at ``radius / 2``.
    """
    if isinstance(lat, RealQuadraticField):
        lat = lat.ring_of_integers()
    dual = lat.dual()
    u1, u2 = float(u[0]), float(u[1])
    pts = _box_points(dual, radius / abs(u1), radius / abs(u2))
    uy = pts.y * np.array([u1, u2])
    r = np.hypot(uy[:, 0], uy[:, 1])
    keep = r <= radius
    c, y, r = pts.coords[keep], pts.y[keep], r[keep]
    terms = _sign_weight(y, nu) / r ** (2 + eta)
    ph = _phase(c, x)
    if ph is not None:
        terms = terms * ph
    total = complex(math.fsum(np.real(terms)), math.fsum(np.imag(terms)))
    inner = r <= radius / 2
    half = complex(math.fsum(np.real(terms[inner])), math.fsum(np.imag(terms[inner])))
    return GreenValue(total, abs(total - half), int(keep.sum()))


def torus_point(v: float) -> tuple[float, float]:
    return math.exp(v), math.exp(-v)


def unit_action(fld: RealQuadraticField, alpha, u: Sequence[float]) -> tuple[float, float]:
    s1, s2 = fld.embed(alpha)
    return s1 * u[0], s2 * u[1]


# ---------------------------------------------------------------- hecke transform


@dataclass(frozen=True)
class HeckeParams:
    x: tuple[float, ...]
    s: complex
    p: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        p = tuple(int(t) for t in self.p) or (0,) * len(self.x)
        object.__setattr__(self, "p", p)
        if len(p) != len(self.x):
            raise ValueError("x and p differ in length")
        if any(t == 0 for t in self.x):
            raise ValueError("every x_j must be nonzero")
        if complex(self.s).real <= 0:
            raise ValueError("Re(s) must be positive")

    @property
    def r(self) -> int:
        return len(self.x)

    def gamma_args(self) -> list[complex]:
        ps = sum(self.p) + self.s
        return [ps / self.r - pj for pj in self.p]


def hecke_rhs(hp: HeckeParams) -> complex:
    """Closed form ``2^{1-r}/(r Gamma(s)) prod Gamma((p+s)/r - p_j) |x_j|^{2(p_j - (p+s)/r)}``."""
    r = hp.r
    args = hp.gamma_args()
    for a in args:
        a = complex(a)
        if a.imag == 0 and a.real <= 0 and a.real == round(a.real):
            raise GammaPole(f"Gamma has a pole at {a.real}")
    val = 2.0 ** (1 - r) / (r * special.gamma(complex(hp.s)))
    for a, xj, pj in zip(args, hp.x, hp.p):
        val *= special.gamma(complex(a)) * abs(xj) ** (2 * (pj - (complex(sum(hp.p)) + hp.s) / r))
    return complex(val)


def _integrand(hp: HeckeParams):
    logx2 = np.array([2 * math.log(abs(t)) for t in hp.x])
    p = np.array(hp.p, dtype=float)
    s = complex(hp.s)

    def f(*v):
        logu = np.array(list(v) + [-sum(v)])
        logq = float(special.logsumexp(2 * logu + logx2))
        return np.exp(-s * logq - 2 * float(np.dot(p, logu)))

    return f


def hecke_quadrature(hp: HeckeParams, tol: float = QUAD_TOL) -> complex:
    """``int_{U_R} ||u x||^{-2s} prod u_j^{-2 p_j} d^x u`` by adaptive quadrature (r <= 3)."""
    if hp.r == 1:
        return complex(abs(hp.x[0]) ** (-2 * complex(hp.s)))
    if any(complex(a).real <= 0 for a in hp.gamma_args()):
        raise QuadratureNonConvergent("integral diverges: some (p+s)/r - p_j has non-positive real part")
    f = _integrand(hp)
    parts = []
    for comp in (np.real, np.imag):
        if comp is np.imag and complex(hp.s).imag == 0:
            parts.append(0.0)
            continue
        g = lambda *v, comp=comp: float(comp(f(*v)))  # noqa: E731
        if hp.r == 2:
            val, err = integrate.quad(g, -np.inf, np.inf, epsabs=tol, epsrel=tol, limit=400)
        elif hp.r == 3:
            val, err = integrate.dblquad(lambda b, a: g(a, b), -np.inf, np.inf, -np.inf, np.inf,
                                         epsabs=tol, epsrel=tol)
        else:
            raise PreconditionError("quadrature supports r <= 3")
        if not np.isfinite(val) or err > max(1e3 * tol, 1e-6) * max(1.0, abs(val)):
            raise QuadratureNonConvergent(f"quadrature error estimate {err:g} too large")
        parts.append(val)
    return complex(parts[0], parts[1])


# ---------------------------------------------------------------- torus integrals


def _torus_integral(lat: Lattice, exponent: float, bound_sq: float, periods: int = 1,
                    nu: Sequence[int] = (0, 0), x: Sequence | None = None, nodes: int = 96) -> complex:
    """``int_0^{periods log eps} sum_{||u n||^2 <= bound_sq} sgn^nu e(..) / ||u n||^exponent dv``.

    Shifting ``v`` by ``log eps`` is the same as multiplying ``n`` by ``eps``, so
    period ``k`` is integrated over ``[0, log eps)`` with ``x`` replaced by
    ``eps^-k x``.  Each period uses Gauss-Legendre nodes in ``v``.
    """
    fld = lat.field
    span = fld.log_epsilon
    r = math.sqrt(bound_sq)
    pts = _box_points(lat, r, r * math.exp(span))
    sign = _sign_weight(pts.y, nu).astype(complex)
    weights = np.zeros(len(pts.coords), dtype=complex)
    base = lat.dual()
    inv = fld.power(fld.epsilon, -1)
    xk = tuple(Fraction(t) for t in x) if x is not None else None
    for _ in range(periods):
        ph = _phase(pts.coords, xk)
        weights += sign if ph is None else sign * ph
        if xk is not None:
            xk = tuple(c % 1 for c in base.act(inv, xk))
    y2 = pts.y**2
    t, wt = np.polynomial.legendre.leggauss(nodes)
    vs = (t + 1) * span / 2
    total = 0j
    for v, wv in zip(vs, wt):
        q = y2[:, 0] * math.exp(2 * v) + y2[:, 1] * math.exp(-2 * v)
        keep = q <= bound_sq
        g = weights[keep] / q[keep] ** (exponent / 2)
        total += wv * complex(math.fsum(g.real), math.fsum(g.imag))
    return total * span / 2


@dataclass(frozen=True)
class CheckReport:
    lhs: complex
    rhs: complex
    constant: float
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "lhs", complex(self.lhs))
        object.__setattr__(self, "rhs", complex(self.rhs))

    @property
    def relative_error(self) -> float:
        """Relative difference; the absolute one when the right side vanishes."""
        diff = abs(self.lhs - self.rhs)
        return float(diff / abs(self.rhs)) if self.rhs else float(diff)

    def as_dict(self) -> dict:
        return {
            "lhs": complex(self.lhs),
            "rhs": complex(self.rhs),
            "constant": float(self.constant),
            "bound": float(self.bound),
            "relative_error": self.relative_error,
        }


def hecke_formula_check(fld: RealQuadraticField, s: float = 2.0, bound: float = 1e4, nodes: int = 96) -> CheckReport:
    """Torus integral of the Eisenstein series against Gamma factors times the partial zeta.

    Left: ``int_{U_R/U} sum_{a in O_F - 0} ||u a||^{-2s} dv`` with ``||u a||^2 <= bound``.
    Right: ``Gamma(s/2)^2 / (4 Gamma(s)) sum_{a mod U} |N a|^{-s}`` with ``|N a| <= bound``.
    """
    if s <= 1:
        raise PreconditionError("need s > 1")
    lat = fld.ring_of_integers()
    lhs = _torus_integral(lat, 2 * s, bound, nodes=nodes)
    const = special.gamma(s / 2) ** 2 / (4 * special.gamma(s))
    rhs = const * partial_zeta_rq(lat, (0, 0), s, bound, unit_power=1)
    return CheckReport(complex(lhs.real, 0), complex(rhs.real, 0), float(const), bound)


def period_constant(delta: float, r: int = 2) -> float:
    """Hecke-transform factor of ``||u n||^{-(r + delta)}``; tends to ``2^{1-r} Gamma(1/2)^r / (r Gamma(r/2))``."""
    a = (r + delta) / 2
    return float(2.0 ** (1 - r) * special.gamma(a / r) ** r / (r * special.gamma(a)))


def green_period_check(fld: RealQuadraticField, delta: float = 2.0, nu: Sequence[int] = (0, 0),
                       x: Sequence | None = None, bound: float = 1e4, nodes: int = 96) -> CheckReport:
    """Integral of the plectic Green function over ``U_R/U`` against the twisted partial zeta.

    The exponent is ``2 + delta`` with ``delta > 0`` so both sides converge
    absolutely; ``U = <eps^m>`` is the stabiliser of ``x``.
    """
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    lat = fld.ring_of_integers()
    dual = lat.dual()
    m = stabilizer_power(lat, x)
    lhs = _torus_integral(dual, 2 + delta, bound, m, nu, x, nodes)
    const = period_constant(delta)
    rhs = const * partial_zeta_rq(dual, nu, (2 + delta) / 2, bound, x=x, unit_power=m)
    return CheckReport(lhs, complex(rhs), const, bound)
