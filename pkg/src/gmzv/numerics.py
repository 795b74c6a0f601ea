"""Tail extrapolation for sequences of partial sums."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

TAIL_MODES = ("none", "richardson", "fit")


@dataclass(frozen=True)
class Extrapolated:
    value: complex
    residual: float
    n_max: int


def _sample_points(n_max: int, step: int, count: int, lo_frac: float) -> np.ndarray:
    lo = max(step, int(n_max * lo_frac))
    pts = np.unique(np.geomspace(lo, n_max, count).astype(np.int64) // step * step)
    return pts[pts >= step]


def _fit_constant(ms: np.ndarray, vals: np.ndarray, powers: int, logs: int) -> complex:
    x = ms.astype(float)
    cols = [np.ones_like(x)]
    lx = np.log(x)
    for p in range(1, powers + 1):
        for j in range(logs + 1):
            cols.append(lx**j / x**p)
    a = np.stack(cols, axis=1)
    # column scaling keeps lstsq well behaved
    scale = np.abs(a).max(axis=0)
    coef, *_ = np.linalg.lstsq(a / scale, vals, rcond=None)
    return complex(coef[0] / scale[0])


def extrapolate(partial: Callable[[np.ndarray], np.ndarray] | np.ndarray, n_max: int, mode: str = "fit",
                step: int = 1, logs: int = 0, powers: int = 3) -> Extrapolated:
    """Estimate ``lim S(M)`` from partial sums up to ``n_max``.

    ``partial`` is either an array with ``partial[M] = S(M)`` for ``0 <= M <= n_max``
    or a callable evaluating ``S`` on an integer array.  ``step`` restricts samples
    to multiples of a period (oscillating summands); ``logs`` is the highest power
    of ``log M`` expected in the tail.

    ``fit`` least-squares fits ``Z + sum c_pj log^j M / M^p`` on geometric samples
    and reports the disagreement with the same fit on the lower half of the range.
    ``richardson`` is the two-point rule ``2 S(M) - S(M/2)``.
    """
    if mode not in TAIL_MODES:
        raise ValueError(f"unknown tail mode {mode!r}")
    get = partial if callable(partial) else (lambda idx: np.asarray(partial)[idx])
    top = n_max // step * step
    half = max(step, (top // 2) // step * step)
    if mode == "none":
        v = complex(get(np.array([top]))[0])
        w = complex(get(np.array([half]))[0])
        return Extrapolated(v, abs(v - w), top)
    if mode == "richardson":
        q = max(step, (half // 2) // step * step)
        s1, s2, s4 = (complex(x) for x in get(np.array([top, half, q])))
        v = 2 * s1 - s2
        return Extrapolated(v, abs(v - (2 * s2 - s4)), top)

    nbasis = 1 + powers * (logs + 1)
    count = max(4 * nbasis, 24)
    ms = _sample_points(top, step, count, 1 / 16)
    if len(ms) < 2 * nbasis:
        # too few distinct samples: fall back to the two-point rule
        return extrapolate(get, n_max, "richardson", step)
    vals = np.asarray(get(ms))
    v = _fit_constant(ms, vals, powers, logs)
    lower = ms <= top // 2
    if lower.sum() >= nbasis + 2:
        w = _fit_constant(ms[lower], vals[lower], powers, logs)
    else:
        w = _fit_constant(ms, vals, max(1, powers - 1), logs)
    if np.isrealobj(vals):
        v, w = complex(v.real), complex(w.real)
    return Extrapolated(v, abs(v - w), top)
