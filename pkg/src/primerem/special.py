"""Logarithmic integral and the closed-form antiderivatives built on it.

li(x) is evaluated as Ei(ln x). Ei uses its convergent power series for
|u| <= 40 when u > 0 and |u| <= 1 when u < 0, the asymptotic expansion for
u > 40, and the E1 continued fraction for u < -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError

__all__ = [
    "EULER_GAMMA",
    "LiValue",
    "ei",
    "li",
    "li_array",
    "li_antiderivative",
    "weight",
    "weight_antiderivative",
]

EULER_GAMMA = 0.57721566490153286060651209008240243
EPS = np.finfo(float).eps
SERIES_SWITCH = 40.0
_MAX_TERMS = 400


@dataclass(frozen=True)
class LiValue:
    x: float
    value: float
    abs_error: float

    def __float__(self) -> float:
        return self.value


def _ei_series(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Ei(u) = gamma + ln|u| + sum_{k>=1} u^k / (k k!)
    term = np.ones_like(u)
    total = np.zeros_like(u)
    mag = np.zeros_like(u)
    for k in range(1, _MAX_TERMS):
        term = term * u / k
        contrib = term / k
        total += contrib
        mag += np.abs(contrib)
        if np.all(np.abs(contrib) <= EPS * np.abs(total) * 0.25):
            break
    head = EULER_GAMMA + np.log(np.abs(u))
    value = head + total
    err = (k + 4) * EPS * (np.abs(head) + mag + EULER_GAMMA)
    return value, err


def _ei_asymptotic(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Ei(u) ~ e^u/u * sum_k k!/u^k, truncated near the smallest term
    term = np.ones_like(u)
    total = np.ones_like(u)
    last = np.ones_like(u)
    active = np.ones(u.shape, dtype=bool)
    for k in range(1, _MAX_TERMS):
        nxt = term * k / u
        active &= np.abs(nxt) < np.abs(term)
        if not active.any():
            break
        term = np.where(active, nxt, term)
        total = total + np.where(active, term, 0.0)
        last = np.where(active, np.abs(term), last)
        if np.all(last <= EPS * 0.25):
            break
    scale = np.exp(u) / u
    value = scale * total
    err = np.abs(scale) * (last + 8 * EPS * total)
    return value, err


def _e1_continued_fraction(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))), modified Lentz
    tiny = 1e-300
    b = z + 1.0
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_TERMS):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= EPS):
            break
    value = h * np.exp(-z)
    return value, (i + 4) * EPS * np.abs(value)


def _ei_with_error(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    value = np.empty_like(u)
    err = np.empty_like(u)
    big = u > SERIES_SWITCH
    neg_far = u < -1.0
    mid = ~(big | neg_far)
    if mid.any():
        value[mid], err[mid] = _ei_series(u[mid])
    if big.any():
        value[big], err[big] = _ei_asymptotic(u[big])
    if neg_far.any():
        v, e = _e1_continued_fraction(-u[neg_far])
        value[neg_far], err[neg_far] = -v, e
    return value, err


def ei(u):
    """Exponential integral Ei(u) for real u != 0."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr == 0):
        raise SingularityError("Ei has a logarithmic singularity at 0")
    value, _ = _ei_with_error(np.atleast_1d(arr))
    return float(value[0]) if arr.ndim == 0 else value.reshape(arr.shape)


def _check_li_domain(x: np.ndarray) -> None:
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("li requires finite x > 0")
    if np.any(x == 1):
        raise SingularityError("li(x) is singular at x = 1")


def li(x: float) -> LiValue:
    """Principal-value logarithmic integral with an error estimate."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    _check_li_domain(arr)
    value, err = _ei_with_error(np.log(arr))
    return LiValue(float(arr[0]), float(value[0]), float(err[0]))


def li_array(x) -> np.ndarray:
    """Vectorised li(x); returns plain values."""
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr)
    _check_li_domain(flat)
    value, _ = _ei_with_error(np.log(flat))
    return value.reshape(arr.shape) if arr.ndim else value[0]


def li_with_error_array(x) -> tuple[np.ndarray, np.ndarray]:
    flat = np.atleast_1d(np.asarray(x, dtype=float))
    _check_li_domain(flat)
    return _ei_with_error(np.log(flat))


def li_antiderivative(x: float) -> float:
    """L(x) = x li(x) - li(x^2), so that L'(x) = li(x). Requires x >= 2."""
    return li_antiderivative_with_error(x)[0]


def li_antiderivative_with_error(x: float) -> tuple[float, float]:
    if not x >= 2:
        raise DomainError(f"li_antiderivative requires x >= 2, got {x}")
    x = float(x)
    (v1, v2), (e1, e2) = li_with_error_array([x, x * x])
    value = x * v1 - v2
    err = x * e1 + e2 + EPS * (abs(x * v1) + abs(v2))
    return float(value), float(err)


def _exponent(delta: float) -> float:
    s = 0.5 + float(delta)
    if not s > 0:
        raise DomainError(f"weight requires delta > -1/2, got {delta}")
    return s


def weight(x, delta: float):
    """w(x) = (ln x - 2) x^{-3/2-delta}."""
    s = _exponent(delta)
    x = np.asarray(x, dtype=float)
    out = (np.log(x) - 2.0) * x ** (-1.0 - s)
    return float(out) if out.ndim == 0 else out


def weight_antiderivative(x, delta: float):
    """W(x) = -x^{-s} ((ln x - 2)/s + 1/s^2) with s = 1/2 + delta; W' = w."""
    s = _exponent(delta)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 2):
        raise DomainError("weight_antiderivative requires x >= 2")
    out = -(arr ** (-s)) * ((np.log(arr) - 2.0) / s + 1.0 / (s * s))
    return float(out) if out.ndim == 0 else out
