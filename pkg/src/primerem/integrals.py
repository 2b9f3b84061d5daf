"""The remainder P(x) = pi(x) - li(x) and its plain and weighted integrals.

Both integrals are evaluated semi-analytically: the pi(x) part is a finite
sum over primes of closed-form antiderivative increments and the li(x) part
is either closed form (plain integral) or a smooth adaptive quadrature
(weighted integral). A prime-splitting quadrature route is kept alongside
for cross-checking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DomainError
from .primes import PrimeEngine
from .quadrature import gauss_kronrod
from .special import (
    EPS,
    li_antiderivative_with_error,
    li_array,
    li_with_error_array,
    weight_antiderivative,
)

__all__ = [
    "DEFAULT_DELTA_MAX",
    "Delta",
    "IntegralValue",
    "RemainderIntegrals",
    "TCutoff",
    "TailBound",
    "as_delta",
    "calibrate_tail_constant",
    "t_of_delta",
    "tail_bound",
]

DEFAULT_DELTA_MAX = 0.5
E3 = math.exp(3.0)
_CHUNK = 200_000


@dataclass(frozen=True)
class Delta:
    """Shift parameter with 0 < value <= delta_max."""

    value: float
    delta_max: float = DEFAULT_DELTA_MAX

    def __post_init__(self) -> None:
        v = self.value
        if not (isinstance(v, (int, float, Fraction)) and math.isfinite(v)):
            raise DomainError(f"delta must be a finite real, got {v!r}")
        if not 0 < self.delta_max:
            raise DomainError("delta_max must be positive")
        if not 0 < v <= self.delta_max:
            raise DomainError(f"delta={v} outside (0, {self.delta_max}]")

    def __float__(self) -> float:
        return float(self.value)


def as_delta(delta, delta_max: float = DEFAULT_DELTA_MAX) -> Delta:
    if isinstance(delta, Delta):
        return delta
    return Delta(delta, delta_max)


@dataclass(frozen=True)
class IntegralValue:
    value: float
    abs_error: float
    method: str  # "semi-analytic" | "quadrature"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.abs_error) and self.abs_error >= 0):
            raise ValueError(f"bad error bound {self.abs_error}")


@dataclass(frozen=True)
class TailBound:
    y: float
    delta: Delta
    a_const: float
    bound: float


@dataclass(frozen=True)
class TCutoff:
    """(A/delta)^{2/delta}, saturated at ``cap``."""

    delta: Delta
    a_const: float
    value: float
    log_value: float
    overflow: bool


def tail_bound(y: float, delta, a_const: float) -> TailBound:
    """(A/delta) * y^{-delta/2}, the bound on the weighted tail beyond y."""
    d = as_delta(delta)
    if y < 2:
        raise DomainError("tail_bound requires y >= 2")
    if not a_const > 0:
        raise DomainError("tail constant must be positive")
    dv = float(d)
    return TailBound(y, d, a_const, (a_const / dv) * y ** (-dv / 2))


def t_of_delta(delta, a_const: float, cap: float = 1e10) -> TCutoff:
    d = as_delta(delta)
    if not a_const > 0:
        raise DomainError("tail constant must be positive")
    dv = float(d)
    log_t = (2.0 / dv) * math.log(a_const / dv)
    if log_t > math.log(cap):
        return TCutoff(d, a_const, float(cap), log_t, True)
    return TCutoff(d, a_const, math.exp(log_t), log_t, False)


def calibrate_tail_constant(delta, c: float = 1.0, y_min: float = math.exp(2.0)) -> float:
    """Smallest A with c * int_Y^inf (ln x - 2) ln x x^{-1-delta} dx <= (A/delta) Y^{-delta/2}.

    The integrand bounds |w(x) P(x)| under |P(x)| <= c sqrt(x) ln x. With
    y = ln Y the tail equals e^{-delta y} q(y) for a quadratic q, so the
    supremum over Y >= y_min is attained at y_min or at a root of
    q' - (delta/2) q.
    """
    dv = float(as_delta(delta))
    if not c > 0:
        raise DomainError("von Koch constant must be positive")
    y0 = math.log(y_min)
    if y0 < 2:
        raise DomainError("calibration needs y_min >= e^2 where the weight is non-negative")
    q = np.polynomial.Polynomial([-2 / dv**2 + 2 / dv**3, -2 / dv + 2 / dv**2, 1 / dv])
    crit = (q.deriv() - (dv / 2) * q).roots()
    cands = [y0] + [float(r.real) for r in np.atleast_1d(crit) if abs(r.imag) < 1e-12 and r.real > y0]
    return max(c * dv * math.exp(-dv * y / 2) * q(y) for y in cands)


class RemainderIntegrals:
    """P(x) and its integrals on top of a ``PrimeEngine``."""

    def __init__(
        self,
        engine: PrimeEngine | None = None,
        quad_rel_tol: float = 1e-9,
        quad_abs_tol: float = 1e-12,
        delta_max: float = DEFAULT_DELTA_MAX,
    ):
        self.engine = engine if engine is not None else PrimeEngine()
        self.quad_rel_tol = quad_rel_tol
        self.quad_abs_tol = quad_abs_tol
        self.delta_max = delta_max

    def _delta(self, delta) -> Delta:
        return as_delta(delta, self.delta_max)

    @staticmethod
    def _check_limits(a, b) -> None:
        if not a >= 2:
            raise DomainError(f"lower limit must be >= 2, got {a}")
        if b < a:
            raise DomainError(f"need a <= b, got a={a}, b={b}")

    # -- pointwise -----------------------------------------------------------

    def p_of(self, x) -> float:
        if not x >= 2:
            raise DomainError(f"P(x) defined here for x >= 2, got {x}")
        pi = self.engine.pi_of(x)
        return pi - float(li_array(float(x)))

    def pi_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size == 0:
            return np.zeros(0, dtype=np.int64)
        top = float(np.max(xs))
        if top <= self.engine.table_limit:
            return np.searchsorted(self.engine.table_primes, np.floor(xs), side="right")
        return np.array([self.engine.pi_of(x) for x in xs.ravel()]).reshape(xs.shape)

    def p_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if np.any(xs < 2):
            raise DomainError("P(x) defined here for x >= 2")
        return self.pi_array(xs) - li_array(xs)

    # -- plain integral ------------------------------------------------------

    def exact_integral_P(self, a, b) -> IntegralValue:
        """int_a^b P(x) dx from exact prime sums and L(x) = x li(x) - li(x^2)."""
        self._check_limits(a, b)
        if a == b:
            return IntegralValue(0.0, 0.0, "semi-analytic")
        ca = self.engine.checkpoint(a)
        cb = self.engine.checkpoint(b)
        fa, fb = Fraction(a), Fraction(b)
        step = (fb - fa) * ca.pi + fb * (cb.pi - ca.pi) - (cb.prime_sum - ca.prime_sum)
        la, ea = li_antiderivative_with_error(a)
        lb, eb = li_antiderivative_with_error(b)
        step_f = float(step)
        value = math.fsum([step_f, -lb, la])
        err = ea + eb + EPS * (abs(step_f) + abs(lb) + abs(la) + abs(value))
        return IntegralValue(value, float(err), "semi-analytic")

    def _prime_split(self, a: float, b: float, integrand: Callable) -> IntegralValue:
        # integrand(x, pi_at_x) -> values; pi is constant on each prime gap
        pi_a = self.engine.pi_of(a)
        total, err = [], 0.0
        lo = float(a)
        for chunk in self.engine.prime_chunks(a, b):
            for start in range(0, len(chunk), _CHUNK):
                bps = chunk[start : start + _CHUNK].astype(float)
                hi = float(bps[-1]) if start + _CHUNK < len(chunk) else None
                if hi is None:
                    continue
                r = self._quad_piece(lo, hi, bps[:-1], pi_a, integrand)
                total.append(r.value)
                err += r.abs_error
                pi_a += len(bps)
                lo = hi
        rest = self.engine.primes_between(lo, b).astype(float)
        r = self._quad_piece(lo, float(b), rest, self.engine.pi_of(lo), integrand)
        total.append(r.value)
        err += r.abs_error
        return IntegralValue(math.fsum(total), float(err), "quadrature")

    def _quad_piece(self, lo, hi, primes, pi_lo, integrand):
        primes = primes[(primes > lo) & (primes <= hi)]

        def f(x):
            return integrand(x, pi_lo + np.searchsorted(primes, x, side="right"))

        return gauss_kronrod(f, lo, hi, self.quad_rel_tol, self.quad_abs_tol, breakpoints=primes)

    def quadrature_integral_P(self, a, b) -> IntegralValue:
        """int_a^b P(x) dx by adaptive quadrature split at every prime."""
        self._check_limits(a, b)
        if a == b:
            return IntegralValue(0.0, 0.0, "quadrature")
        return self._prime_split(float(a), float(b), lambda x, pi: pi - li_array(x))

    def cumulative(self, y, lower: float = 2.0) -> float:
        return self.exact_integral_P(lower, y).value

    # -- weighted integral ---------------------------------------------------

    def weighted_integral(self, delta, a, b) -> IntegralValue:
        """int_a^b (ln x - 2) x^{-3/2-delta} P(x) dx.

        The pi-part is sum_{p<=b} [W(b) - W(max(p, a))]; the li-part is an
        adaptive quadrature in u = ln x.
        """
        d = self._delta(delta)
        self._check_limits(a, b)
        if a == b:
            return IntegralValue(0.0, 0.0, "semi-analytic")
        dv = float(d)
        a, b = float(a), float(b)
        pi_a = self.engine.pi_of(a)
        pi_b = self.engine.pi_of(b)
        wa = weight_antiderivative(a, dv)
        wb = weight_antiderivative(b, dv)
        partial = [math.fsum(weight_antiderivative(c.astype(float), dv))
                   for c in self.engine.prime_chunks(a, b) if len(c)]
        w_sum = math.fsum(partial)
        pi_terms = [pi_b * wb, -pi_a * wa, -w_sum]
        pi_part = math.fsum(pi_terms)
        pi_err = EPS * (sum(abs(t) for t in pi_terms) + 4 * (pi_b - pi_a + 2) * abs(wb - wa + 1e-300))

        s = 0.5 + dv

        def li_integrand(u):
            vals, _ = li_with_error_array(np.exp(u))
            return (u - 2.0) * np.exp(-s * u) * vals

        q = gauss_kronrod(li_integrand, math.log(a), math.log(b), self.quad_rel_tol, self.quad_abs_tol)
        value = pi_part - q.value
        err = pi_err + q.abs_error + EPS * abs(q.value)
        return IntegralValue(value, float(err), "semi-analytic")

    def weighted_integral_quadrature(self, delta, a, b) -> IntegralValue:
        d = self._delta(delta)
        self._check_limits(a, b)
        if a == b:
            return IntegralValue(0.0, 0.0, "quadrature")
        e = -1.5 - float(d)
        return self._prime_split(
            float(a), float(b), lambda x, pi: (np.log(x) - 2.0) * x**e * (pi - li_array(x))
        )
