"""Residual checks of the product, division and equal-parts relations.

Every relation is written once as a list of integral *requests* plus a
``combine`` function. Two evaluators resolve the requests:

* ``SolvedEvaluator`` solves N-hat for each target and integrates P exactly;
* ``SurrogateEvaluator`` returns the defining targets themselves, in exact
  rational arithmetic, which turns each relation into an algebraic identity.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .integrals import Delta
from .nsolve import A_CONST, NEstimate, NSolver

__all__ = [
    "ResidualReport",
    "SolvedEvaluator",
    "SurrogateEvaluator",
    "canonical_product_demo",
    "division_relation",
    "equal_parts_check",
    "general_sequence_check",
    "mean_slope_check",
    "product_relation",
    "ulp_distance",
]

DIVISION_NOTE = "factor identity: 1/d2^n - 1/d1^n = (1/d2 - 1/d1) * sum_k d1^-k d2^-(n-1-k)"


def ulp_distance(x: float, y: float) -> int:
    """Number of representable doubles between x and y."""
    if x == y:
        return 0
    if math.isnan(x) or math.isnan(y):
        return 2**63

    def key(v: float) -> int:
        i = int(np.float64(v).view(np.int64))
        return i if i >= 0 else -(i & 0x7FFFFFFFFFFFFFFF)

    return abs(key(x) - key(y))


@dataclass(frozen=True)
class ResidualReport:
    identifier: str
    inputs: dict
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    mode: str
    flags: frozenset = field(default_factory=frozenset)
    solver_bound: float | None = None
    slack: float | None = None
    exact: bool | None = None
    ulps: int | None = None
    notes: tuple = ()
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "identifier": self.identifier,
            "mode": self.mode,
            "inputs": self.inputs,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "flags": sorted(self.flags),
            "solver_bound": self.solver_bound,
            "slack": self.slack,
            "exact": self.exact,
            "ulps": self.ulps,
            "notes": list(self.notes),
        }
        for k, v in self.extras.items():
            out[k] = v.as_dict() if hasattr(v, "as_dict") else v
        return out


def _rel(lhs: float, rhs: float) -> float:
    if lhs == rhs:
        return 0.0
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


# requests: ("cum", t) -> int_2^{N(t)} P ;  ("between", t0, t1) -> int_{N(t0)}^{N(t1)} P


class SurrogateEvaluator:
    """Replace each integral by its defining target, exactly."""

    mode = "surrogate"
    num = staticmethod(Fraction)

    def __init__(self, delta_max: float = 0.5):
        self.delta_max = delta_max

    def resolve(self, request) -> tuple[Fraction, float, frozenset]:
        if request[0] == "cum":
            return request[1], 0.0, frozenset()
        return request[2] - request[1], 0.0, frozenset()


class SolvedEvaluator:
    """Resolve requests through N-hat solves and exact integrals of P."""

    mode = "computed"
    num = staticmethod(float)

    def __init__(self, solver: NSolver):
        self.solver = solver
        self.delta_max = solver.delta_max
        self._cache: dict[float, NEstimate] = {}

    def estimate(self, target: float) -> NEstimate:
        t = float(target)
        if t not in self._cache:
            self._cache[t] = self.solver.solve_for_target(t, 2.0)
        return self._cache[t]

    def resolve(self, request) -> tuple[float, float, frozenset]:
        if request[0] == "cum":
            e = self.estimate(request[1])
            return e.achieved, abs(e.achieved - e.target), e.flags
        e0, e1 = self.estimate(request[1]), self.estimate(request[2])
        lo, hi = sorted((e0.n_value, e1.n_value))
        v = self.solver.integrals.exact_integral_P(lo, hi).value
        if e1.n_value < e0.n_value:
            v = -v
        radius = abs(e0.achieved - e0.target) + abs(e1.achieved - e1.target)
        return v, radius, e0.flags | e1.flags


def _run(evaluator, identifier: str, inputs: dict, requests: list, combine: Callable,
         notes: tuple = (), extras_fn: Callable | None = None) -> ResidualReport:
    resolved = [evaluator.resolve(r) for r in requests]
    values = [r[0] for r in resolved]
    radii = [r[1] for r in resolved]
    flags = frozenset().union(*[r[2] for r in resolved]) if resolved else frozenset()
    lhs, rhs = combine(values)
    extras = extras_fn(values) if extras_fn else {}
    lhs_f, rhs_f = float(lhs), float(rhs)
    abs_res = abs(lhs_f - rhs_f)
    if evaluator.mode == "surrogate":
        extras = {k: [float(x) for x in v] if isinstance(v, tuple) else v for k, v in extras.items()}
        return ResidualReport(identifier, inputs, lhs_f, rhs_f, abs_res, _rel(lhs_f, rhs_f),
                              evaluator.mode, flags, exact=(lhs == rhs),
                              ulps=ulp_distance(lhs_f, rhs_f), notes=notes, extras=extras)
    base = lhs_f - rhs_f
    bound = 0.0
    for i, rad in enumerate(radii):
        if rad:
            bumped = list(values)
            bumped[i] = values[i] + rad
            l2, r2 = combine(bumped)
            bound += abs((l2 - r2) - base)
    extras = {k: [float(x) for x in v] if isinstance(v, tuple) else v for k, v in extras.items()}
    return ResidualReport(identifier, inputs, lhs_f, rhs_f, abs_res, _rel(lhs_f, rhs_f),
                          evaluator.mode, flags, solver_bound=bound,
                          slack=max(0.0, abs_res - bound), notes=notes, extras=extras)


def _validated(d, delta_max: float) -> Fraction | float:
    Delta(d, delta_max)
    return d


def product_relation(evaluator, deltas: Sequence) -> ResidualReport:
    """prod_k I(2, N(d_k)) against (-a)^{l-1} I(2, N(prod_k d_k))."""
    if not deltas:
        raise DomainError("need at least one delta")
    num = evaluator.num
    ds = sorted(num(d) for d in deltas)
    for d in ds:
        _validated(d, evaluator.delta_max)
    prod = math.prod(ds)
    _validated(prod, evaluator.delta_max)
    a = num(A_CONST)
    l = len(ds)
    requests = [("cum", -a / d) for d in ds] + [("cum", -a / prod)]

    def combine(v):
        return math.prod(v[:l]), (-a) ** (l - 1) * v[l]

    def normalized(v):
        return {"normalized": (math.prod(x / a for x in v[:l]), (-1) ** (l - 1) * v[l] / a)}

    return _run(evaluator, "eq21", {"deltas": [float(d) for d in ds], "l": l},
                requests, combine, extras_fn=normalized)


def canonical_product_demo(evaluator, primes: Sequence[int], exponents: Sequence[int]) -> ResidualReport:
    """Product relation with d_k = p_k^{-alpha_k} from a canonical factorisation."""
    if len(primes) != len(exponents) or not primes:
        raise DomainError("primes and exponents must be non-empty and of equal length")
    if len(set(primes)) != len(primes):
        raise DomainError("primes must be distinct")
    for p, e in zip(primes, exponents):
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise DomainError(f"{p} is not prime")
        if int(e) != e or e < 0:
            raise DomainError(f"exponent {e} must be a non-negative integer")
    deltas = [Fraction(1, int(p) ** int(e)) for p, e in zip(primes, exponents)]
    for d in deltas:
        _validated(d, evaluator.delta_max)
    rep = product_relation(evaluator, [evaluator.num(d) for d in deltas])
    n = math.prod(int(p) ** int(e) for p, e in zip(primes, exponents))
    return dataclasses.replace(rep, identifier="eq23", inputs={
        **rep.inputs, "primes": list(primes), "exponents": list(exponents), "n": n})


def division_relation(evaluator, delta1, delta2, n: int, allow_unit: bool = False) -> ResidualReport:
    """I(N(d1^n), N(d2^n)) / I(N(d1), N(d2)) against -sum_k I(2, N(d1^k d2^{n-k-1})) / a.

    ``n = 1`` needs the convention d^0 = 1 inside the sum and is rejected
    unless ``allow_unit`` is set (and delta = 1 is admissible).
    """
    num = evaluator.num
    d1, d2 = num(delta1), num(delta2)
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if n == 1 and not allow_unit:
        raise DomainError("n = 1 needs the delta^0 = 1 convention; pass allow_unit=True")
    if not d2 < d1:
        raise DomainError("division relation requires delta2 < delta1")
    for d in (d1, d2, d1**n, d2**n):
        _validated(d, evaluator.delta_max)
    a = num(A_CONST)
    mixed = [d1**k * d2 ** (n - k - 1) for k in range(n)]
    for d in mixed:
        _validated(d, evaluator.delta_max)
    requests = [("between", -a / d1**n, -a / d2**n), ("between", -a / d1, -a / d2)]
    requests += [("cum", -a / d) for d in mixed]

    def combine(v):
        return (v[0] / a) / (v[1] / a), -sum(x / a for x in v[2:])

    return _run(evaluator, "eq31",
                {"delta1": float(d1), "delta2": float(d2), "n": int(n)},
                requests, combine, notes=(DIVISION_NOTE,))


def _part_targets(evaluator, delta, denominators: Sequence, mode: str) -> list:
    num = evaluator.num
    dv = num(delta)
    Delta(dv, math.inf)
    a = num(A_CONST)
    if mode == "scaled":
        shifted = [a * dv / num(m) for m in denominators]
        for s in shifted:
            _validated(s, evaluator.delta_max)
        return [-a / s for s in shifted]
    if mode == "raw":
        return [-num(m) / dv for m in denominators]
    raise DomainError(f"unknown mode {mode!r}; expected 'scaled' or 'raw'")


def mean_slope_check(evaluator, delta, n: int, mode: str = "scaled") -> ResidualReport:
    """I(2, N(a delta / n)) against -n/delta."""
    (t,) = _part_targets(evaluator, delta, [n], mode)
    num = evaluator.num
    expected = -num(n) / num(delta)
    return _run(evaluator, "eq41", {"delta": float(delta), "n": int(n), "mode": mode},
                [("cum", t)], lambda v: (v[0], expected))


def equal_parts_check(evaluator, delta, k: int, l: int, mode: str = "scaled") -> ResidualReport:
    """I(N(a delta/k), N(a delta/(k+1))) against the same with l.

    ``mode="raw"`` uses the targets -m/delta directly, so delta need not be
    scaled into the admissible range by 1/a.
    """
    for m in (k, l):
        if int(m) != m or m < 1:
            raise DomainError("k and l must be positive integers")
    tk, tk1, tl, tl1 = _part_targets(evaluator, delta, [k, k + 1, l, l + 1], mode)
    requests = [("between", tk, tk1), ("between", tl, tl1)]
    rep = _run(evaluator, "eq42", {"delta": float(delta), "k": int(k), "l": int(l), "mode": mode},
               requests, lambda v: (v[0], v[1]))
    slopes = {f"eq41_n{m}": mean_slope_check(evaluator, delta, m, mode) for m in sorted({k, l})}
    return dataclasses.replace(rep, extras={**rep.extras, **slopes})


def general_sequence_check(evaluator, delta, alpha0, r, indices: Sequence[int],
                           mode: str = "scaled") -> ResidualReport:
    """Consecutive parts between N(a delta/(alpha0 + k r)) and N(a delta/(alpha0 + (k+1) r)).

    lhs is the part at ``indices[0]``; rhs is the part that deviates most
    from it. All parts are listed under ``parts``.
    """
    if not indices:
        raise DomainError("need at least one index")
    num = evaluator.num
    if not (num(alpha0) > 0 and num(r) > 0):
        raise DomainError("alpha0 and r must be positive")
    if any(int(i) != i or i < 0 for i in indices):
        raise DomainError("indices must be non-negative integers")
    denoms = sorted({num(alpha0) + num(r) * int(i) for i in indices}
                    | {num(alpha0) + num(r) * (int(i) + 1) for i in indices})
    targets = dict(zip(denoms, _part_targets(evaluator, delta, denoms, mode)))
    requests = [("between", targets[num(alpha0) + num(r) * int(i)],
                 targets[num(alpha0) + num(r) * (int(i) + 1)]) for i in indices]

    def combine(v):
        far = max(v, key=lambda x: abs(x - v[0]))
        return v[0], far

    return _run(evaluator, "eq42",
                {"delta": float(delta), "alpha0": float(alpha0), "r": float(r),
                 "indices": [int(i) for i in indices], "mode": mode},
                requests, combine, extras_fn=lambda v: {"parts": tuple(v)})
