"""Operational N(delta): the smallest Y with int_lower^Y P(x) dx = target.

Also hosts the diagnostics around it: a continuity scan over delta grids,
the mean value of P over an interval, and an exact sign-change scan of P.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .integrals import DEFAULT_DELTA_MAX, E3, Delta, RemainderIntegrals, as_delta
from .special import li_array

__all__ = [
    "A_CONST",
    "ContinuityPoint",
    "NEstimate",
    "NSolver",
    "SignChange",
    "VARIANTS",
    "continuity_scan",
    "littlewood_scan",
    "mean_value_check",
    "scan_remainder",
    "target_value",
]

A_CONST = math.exp(4.5)
VARIANTS = ("eq12", "eq55")
LOWER = {"eq12": 2.0, "eq55": E3}


def target_value(delta, variant: str = "eq12", delta_max: float = DEFAULT_DELTA_MAX) -> float:
    """-a/delta (eq12) or -e^{9/2 + 3 delta}/delta (eq55), with a = e^{9/2}."""
    dv = float(as_delta(delta, delta_max))
    if variant == "eq12":
        return -A_CONST / dv
    if variant == "eq55":
        return -math.exp(4.5 + 3.0 * dv) / dv
    raise DomainError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


@dataclass(frozen=True)
class NEstimate:
    delta: Delta | None
    variant: str
    target: float
    n_value: float
    achieved: float
    bracket: tuple[float, float]
    lower: float
    flags: frozenset = field(default_factory=frozenset)

    @property
    def ok(self) -> bool:
        return not self.flags

    def as_dict(self) -> dict:
        return {
            "delta": None if self.delta is None else float(self.delta),
            "variant": self.variant,
            "lower": self.lower,
            "target": self.target,
            "n_value": self.n_value,
            "achieved": self.achieved,
            "bracket_lo": self.bracket[0],
            "bracket_hi": self.bracket[1],
            "multiple_roots": "multiple-roots" in self.flags,
            "cap_hit": "cap-hit" in self.flags,
        }


@dataclass(frozen=True)
class SignChange:
    lo: float
    hi: float


class NSolver:
    """Root-solve the cumulative integral of P against a target.

    ``cumulative(lower, y)`` and ``sign_scan(lo, hi)`` default to the exact
    integral and the exact sign-change scan of ``integrals``; tests inject
    synthetic versions.
    """

    def __init__(
        self,
        integrals: RemainderIntegrals | None = None,
        y_cap: float = 1e8,
        rel_tol: float = 1e-3,
        cumulative: Callable[[float, float], float] | None = None,
        sign_scan: Callable[[float, float], list] | None = None,
    ):
        self.integrals = integrals if integrals is not None else RemainderIntegrals()
        self.y_cap = float(y_cap)
        self.rel_tol = rel_tol
        self._cumulative = cumulative or (lambda lo, y: self.integrals.exact_integral_P(lo, y).value)
        self._sign_scan = sign_scan or (lambda lo, hi: littlewood_scan(lo, hi, self.integrals))
        self.delta_max = self.integrals.delta_max

    def solve_n(self, delta, variant: str = "eq12") -> NEstimate:
        d = as_delta(delta, self.delta_max)
        target = target_value(d, variant, self.delta_max)
        return self.solve_for_target(target, LOWER[variant], delta=d, variant=variant)

    def solve_for_target(
        self, target: float, lower: float = 2.0, delta: Delta | None = None, variant: str = "eq12"
    ) -> NEstimate:
        if not target < 0:
            raise DomainError(f"target must be negative, got {target}")
        f = lambda y: self._cumulative(lower, y) - target  # noqa: E731
        tol = self.rel_tol * abs(target)
        flags = set()

        lo, hi = lower, max(2.0 * lower, lower + 1.0)
        f_hi = f(min(hi, self.y_cap))
        while f_hi > 0:
            if hi >= self.y_cap:
                achieved = f_hi + target
                est = NEstimate(delta, variant, target, self.y_cap, achieved,
                                (lo, self.y_cap), lower, frozenset({"cap-hit"}))
                return est
            lo, hi = hi, min(2.0 * hi, self.y_cap)
            f_hi = f(hi)

        changes = self._sign_scan(lower, hi)
        if changes:
            flags.add("multiple-roots")
            edges = [lower] + [c.lo for c in changes] + [hi]
            for e0, e1 in zip(edges, edges[1:]):
                if e1 > e0 and f(e1) <= 0:
                    lo, hi = e0, e1
                    break

        f_lo = f(lo)
        f_hi = f(hi)
        while hi - lo >= 0.5:
            mid = 0.5 * (lo + hi)
            f_mid = f(mid)
            if f_mid > 0:
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid
        y = self._secant(lo, f_lo, hi, f_hi)
        f_y = f(y)
        # fall back to Illinois when the secant step lands on a prime kink
        side = 0
        while abs(f_y) >= tol and hi - lo > 1e-12 * hi:
            if f_y > 0:
                lo, f_lo = y, f_y
                if side == 1:
                    f_hi *= 0.5
                side = 1
            else:
                hi, f_hi = y, f_y
                if side == -1:
                    f_lo *= 0.5
                side = -1
            y = self._secant(lo, f_lo, hi, f_hi)
            f_y = f(y)
        return NEstimate(delta, variant, target, y, f_y + target, (lo, hi), lower, frozenset(flags))

    @staticmethod
    def _secant(lo, f_lo, hi, f_hi) -> float:
        if f_lo == f_hi:
            return 0.5 * (lo + hi)
        y = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        return min(max(y, lo), hi)


@dataclass(frozen=True)
class ContinuityPoint:
    delta: float
    n_value: float
    jump: bool
    flags: frozenset = field(default_factory=frozenset)


def continuity_scan(
    solver: NSolver, delta_grid: Sequence, variant: str = "eq12", threshold: float = 10.0, window: int = 2
) -> list[ContinuityPoint]:
    """N-hat over a descending delta grid with jump indicators.

    An increment is a jump when it exceeds ``threshold`` times the median of
    the neighbouring increments (``window`` on each side).
    """
    deltas = [float(d) for d in delta_grid]
    if any(b > a for a, b in zip(deltas, deltas[1:])):
        raise DomainError("delta grid must be sorted descending")
    ests = [solver.solve_n(d, variant) for d in deltas]
    ns = [e.n_value for e in ests]
    incs = [abs(b - a) for a, b in zip(ns, ns[1:])]
    jumps = [False] * len(ns)
    for i, inc in enumerate(incs):
        nbrs = [incs[j] for j in range(max(0, i - window), min(len(incs), i + window + 1)) if j != i]
        if nbrs and inc > threshold * statistics.median(nbrs):
            jumps[i + 1] = True
    return [ContinuityPoint(d, n, j, e.flags) for d, n, j, e in zip(deltas, ns, jumps, ests)]


def mean_value_check(integrals: RemainderIntegrals, x_lo: float, x_hi: float) -> float:
    """Mean value of P over [x_lo, x_hi]."""
    if not 2 <= x_lo < x_hi:
        raise DomainError(f"need 2 <= x_lo < x_hi, got ({x_lo}, {x_hi})")
    return integrals.exact_integral_P(x_lo, x_hi).value / (x_hi - x_lo)


@dataclass(frozen=True)
class ScanResult:
    changes: list
    max_value: float
    argmax: float
    samples: int


def scan_remainder(
    integrals: RemainderIntegrals,
    x_lo: float,
    x_hi: float,
    step_policy: str = "exact",
    li_func: Callable = li_array,
) -> ScanResult:
    """Sample P on [x_lo, x_hi] so that no sign change can be missed.

    Between consecutive primes P is strictly decreasing, so its supremum on
    each gap is the value at the left prime. ``"exact"`` samples the value at
    each prime, the gap midpoint and the left limit at the next prime;
    ``"primes"`` keeps only the values at primes and the endpoints.
    """
    if step_policy not in ("exact", "primes"):
        raise DomainError(f"unknown step policy {step_policy!r}")
    if not 2 <= x_lo <= x_hi:
        raise DomainError(f"need 2 <= x_lo <= x_hi, got ({x_lo}, {x_hi})")
    engine = integrals.engine
    x_lo, x_hi = float(x_lo), float(x_hi)
    changes: list[SignChange] = []
    state = {"x": None, "neg": None, "max": -math.inf, "arg": x_lo, "n": 0}

    def feed(xs: np.ndarray, vals: np.ndarray) -> None:
        if not len(xs):
            return
        neg = vals < 0
        if state["neg"] is not None and neg[0] != state["neg"]:
            changes.append(SignChange(state["x"], float(xs[0])))
        flips = np.flatnonzero(neg[1:] != neg[:-1])
        changes.extend(SignChange(float(xs[i]), float(xs[i + 1])) for i in flips)
        k = int(np.argmax(vals))
        if vals[k] > state["max"]:
            state["max"], state["arg"] = float(vals[k]), float(xs[k])
        state["x"], state["neg"] = float(xs[-1]), bool(neg[-1])
        state["n"] += len(xs)

    g0 = x_lo
    pi0 = engine.pi_of(x_lo)
    for chunk in engine.prime_chunks(x_lo, x_hi):
        if not len(chunk):
            continue
        starts = np.concatenate(([g0], chunk[:-1].astype(float)))
        ends = chunk.astype(float)
        pis = pi0 + np.arange(len(chunk), dtype=np.int64)
        _feed_gaps(feed, starts, ends, pis, step_policy, li_func)
        g0 = float(chunk[-1])
        pi0 = int(pis[-1]) + 1
    if x_hi > g0:
        _feed_gaps(feed, np.array([g0]), np.array([x_hi]), np.array([pi0]), step_policy, li_func)
    feed(np.array([x_hi]), np.array([engine.pi_of(x_hi) - float(li_func(np.array([x_hi]))[0])]))
    return ScanResult(changes, state["max"], state["arg"], state["n"])


def _feed_gaps(feed, starts, ends, pis, policy, li_func) -> None:
    # pi is constant (= pis) on each [start, end)
    if policy == "primes":
        feed(starts, pis - li_func(starts))
        return
    mids = 0.5 * (starts + ends)
    xs = np.stack((starts, mids, ends), axis=1)
    vals = pis[:, None] - li_func(xs.ravel()).reshape(xs.shape)
    feed(xs.ravel(), vals.ravel())


def littlewood_scan(
    x_lo: float,
    x_hi: float,
    integrals: RemainderIntegrals | None = None,
    step_policy: str = "exact",
    li_func: Callable = li_array,
) -> list[SignChange]:
    """Brackets (lo, hi) around every sign change of P on [x_lo, x_hi]."""
    integrals = integrals if integrals is not None else RemainderIntegrals()
    return scan_remainder(integrals, x_lo, x_hi, step_policy, li_func).changes
