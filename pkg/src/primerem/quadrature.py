"""Vectorised adaptive Gauss-Kronrod (7/15) quadrature.

The integrand must accept a numpy array of abscissae. All intervals of the
current partition are evaluated in one call, so splitting at thousands of
prime breakpoints costs a handful of vectorised evaluations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = ["QuadResult", "gauss_kronrod"]

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate((-_XK[:-1], _XK[::-1]))
_KRONROD = np.concatenate((_WK[:-1], _WK[::-1]))
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:14:2] = _WG[2::-1]


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error: float
    intervals: int
    converged: bool


def _rule(f: Callable, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k = half * (fx @ _KRONROD)
    g = half * (fx @ _GAUSS)
    return k, np.abs(k - g)


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    breakpoints=None,
    max_intervals: int = 2_000_000,
) -> QuadResult:
    """Integrate ``f`` over [a, b] to max(abs_tol, rel_tol*|I|).

    ``breakpoints`` (inside (a, b)) seed the initial partition; use them at
    discontinuities of ``f`` or its derivatives.
    """
    if b < a:
        raise DomainError("gauss_kronrod requires a <= b")
    if a == b:
        return QuadResult(0.0, 0.0, 0, True)
    edges = [float(a)]
    if breakpoints is not None:
        bp = np.unique(np.asarray(breakpoints, dtype=float))
        edges.extend(bp[(bp > a) & (bp < b)].tolist())
    edges.append(float(b))
    edges = np.asarray(edges)
    lo, hi = edges[:-1], edges[1:]
    val, err = _rule(f, lo, hi)
    while True:
        total = float(np.sum(val))
        total_err = float(np.sum(err))
        target = max(abs_tol, rel_tol * abs(total))
        if total_err <= target:
            return QuadResult(total, total_err, len(lo), True)
        if len(lo) >= max_intervals:
            return QuadResult(total, total_err, len(lo), False)
        split = err > target / len(lo)
        split[np.argmax(err)] = True
        # stop refining intervals that are already at machine resolution
        split &= (hi - lo) > 4 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        if not split.any():
            return QuadResult(total, total_err, len(lo), False)
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate((lo[split], mid))
        new_hi = np.concatenate((mid, hi[split]))
        nv, ne = _rule(f, new_lo, new_hi)
        keep = ~split
        # keep the partition sorted so summation order is deterministic
        lo = np.concatenate((lo[keep], new_lo))
        hi = np.concatenate((hi[keep], new_hi))
        val = np.concatenate((val[keep], nv))
        err = np.concatenate((err[keep], ne))
        order = np.argsort(lo, kind="stable")
        lo, hi, val, err = lo[order], hi[order], val[order], err[order]
