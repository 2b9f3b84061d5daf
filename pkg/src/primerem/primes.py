"""Exact prime counting, prime sums and streaming prime enumeration.

Two independent routes are provided and cross-checked in the test-suite:

* a segmented sieve of Eratosthenes (``sieve_segment``/``iter_segments``),
  used directly below the table limit and as the enumeration stream;
* the Lucy_Hedgehog recursion (``lucy_hedgehog``), which returns pi(n) and
  the prime sum S(n) in O(n^{3/4}) time.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, DomainError, RangeError

log = logging.getLogger(__name__)

__all__ = [
    "ALGORITHM_VERSION",
    "DEFAULT_MAX_X",
    "DEFAULT_SEGMENT_SIZE",
    "PrimeCheckpoint",
    "PrimeEngine",
    "SieveSegment",
    "iter_segments",
    "lucy_hedgehog",
    "sieve_segment",
    "simple_sieve",
]

ALGORITHM_VERSION = 1
DEFAULT_MAX_X = 10**10
DEFAULT_SEGMENT_SIZE = 2**24
# pi and S above this are never requested; S(10^10) ~ 2.2e18 < 2^64, which
# keeps the wrapping uint64 accumulation in ``lucy_hedgehog`` exact.
HARD_MAX_X = 10**10


@dataclass(frozen=True)
class PrimeCheckpoint:
    """Exact triple (x, pi(x), sum of primes <= x)."""

    x: int
    pi: int
    prime_sum: int

    def __post_init__(self) -> None:
        if self.x < 0 or self.pi < 0 or self.prime_sum < 0:
            raise DomainError("checkpoint fields must be non-negative")
        if self.prime_sum < 2 * self.pi or self.prime_sum > self.x * self.pi:
            raise DomainError(f"inconsistent checkpoint {self}")


@dataclass(frozen=True, eq=False)
class SieveSegment:
    """Primality bitmap over the half-open range [lo, hi)."""

    lo: int
    hi: int
    bits: np.ndarray

    def primes(self) -> np.ndarray:
        return np.flatnonzero(self.bits).astype(np.int64) + self.lo

    def __len__(self) -> int:
        return self.hi - self.lo


def simple_sieve(n: int) -> np.ndarray:
    """All primes <= n as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    bits = np.ones(n + 1, dtype=bool)
    bits[:2] = False
    bits[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if bits[p]:
            bits[p * p :: 2 * p] = False
    return np.flatnonzero(bits).astype(np.int64)


_BASE_LIMIT = math.isqrt(HARD_MAX_X) + 1
_base_primes: np.ndarray | None = None


def _base_primes_upto(n: int) -> np.ndarray:
    global _base_primes
    if n > _BASE_LIMIT:
        return simple_sieve(n)
    if _base_primes is None:
        _base_primes = simple_sieve(_BASE_LIMIT)
    return _base_primes[: np.searchsorted(_base_primes, n, side="right")]


def sieve_segment(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> SieveSegment:
    """Sieve the half-open range [lo, hi).

    Raises ``ConfigError`` when the range is wider than ``segment_size``.
    """
    lo, hi = int(lo), int(hi)
    if not 0 <= lo < hi:
        raise DomainError(f"need 0 <= lo < hi, got lo={lo}, hi={hi}")
    if hi - lo > segment_size:
        raise ConfigError(f"segment width {hi - lo} exceeds segment size {segment_size}")
    bits = np.ones(hi - lo, dtype=bool)
    if lo < 2:
        bits[: 2 - lo] = False
    for p in _base_primes_upto(math.isqrt(hi - 1)):
        p = int(p)
        start = max(p * p, -(-lo // p) * p)
        if start < hi:
            bits[start - lo :: p] = False
    return SieveSegment(lo, hi, bits)


def _segment_bounds(lo: int, hi: int, segment_size: int) -> list[tuple[int, int]]:
    return [(s, min(s + segment_size, hi)) for s in range(lo, hi, segment_size)]


def iter_segments(
    lo: int,
    hi: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> Iterator[SieveSegment]:
    """Yield consecutive sieved segments covering [lo, hi), in order.

    With ``threads > 1`` segments are sieved concurrently; results are still
    yielded in ascending order so reductions stay deterministic.
    """
    if hi <= lo:
        return
    bounds = _segment_bounds(lo, hi, segment_size)
    if threads <= 1 or len(bounds) == 1:
        for a, b in bounds:
            yield sieve_segment(a, b, segment_size)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(lambda ab: sieve_segment(ab[0], ab[1], segment_size), bounds)


def _triangular_minus_one(v: np.ndarray) -> np.ndarray:
    """v(v+1)/2 - 1 modulo 2^64."""
    v = v.astype(np.uint64)
    half_even = (v // np.uint64(2)) * (v + np.uint64(1))
    half_odd = v * ((v + np.uint64(1)) // np.uint64(2))
    return np.where(v % np.uint64(2) == 0, half_even, half_odd) - np.uint64(1)


def lucy_hedgehog(n: int) -> tuple[int, int]:
    """Return ``(pi(n), S(n))`` using the Lucy_Hedgehog recursion.

    Prime sums are accumulated in wrapping uint64 arithmetic. The recursion is
    a ring computation, so the result is exact modulo 2^64 and therefore exact
    outright whenever S(n) < 2^64, which holds for n <= 10^10.
    """
    n = int(n)
    if n > HARD_MAX_X:
        raise RangeError(f"n={n} above sublinear limit {HARD_MAX_X}")
    if n < 2:
        return 0, 0
    r = math.isqrt(n)
    small = np.arange(r + 1, dtype=np.int64)
    big = n // np.arange(1, r + 1, dtype=np.int64)
    cnt_lo = small - 1
    cnt_lo[0] = 0
    cnt_hi = big - 1
    sum_lo = _triangular_minus_one(small)
    sum_lo[0] = 0
    sum_hi = _triangular_minus_one(big)

    for p in range(2, r + 1):
        if cnt_lo[p] == cnt_lo[p - 1]:
            continue
        c = cnt_lo[p - 1]
        cs = sum_lo[p - 1]
        pu = np.uint64(p)
        p2 = p * p
        imax = min(r, n // p2)
        k = min(imax, r // p)
        if k:
            cnt_hi[:k] -= cnt_hi[p - 1 : p * k : p] - c
            sum_hi[:k] -= pu * (sum_hi[p - 1 : p * k : p] - cs)
        if imax > k:
            vv = n // (np.arange(k + 1, imax + 1, dtype=np.int64) * p)
            cnt_hi[k:imax] -= cnt_lo[vv] - c
            sum_hi[k:imax] -= pu * (sum_lo[vv] - cs)
        if p2 <= r:
            vv = np.arange(p2, r + 1, dtype=np.int64) // p
            cnt_lo[p2:] -= cnt_lo[vv] - c
            sum_lo[p2:] -= pu * (sum_lo[vv] - cs)
    return int(cnt_hi[0]), int(sum_hi[0])


def _floor_arg(x) -> int:
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x}")
    return math.floor(x)


class PrimeEngine:
    """Query object for pi(x), S(x) and prime enumeration.

    Values up to ``table_limit`` come from an in-memory sieve table; above it
    the sublinear recursion is used, optionally backed by a checkpoint cache.
    Queries are read-only once the table is built.
    """

    def __init__(
        self,
        max_x: int = DEFAULT_MAX_X,
        segment_size: int = DEFAULT_SEGMENT_SIZE,
        table_limit: int = DEFAULT_SEGMENT_SIZE,
        threads: int = 1,
        cache=None,
    ):
        if not 2 <= max_x <= HARD_MAX_X:
            raise ConfigError(f"max_x must lie in [2, {HARD_MAX_X}], got {max_x}")
        if segment_size < 16:
            raise ConfigError("segment_size too small")
        if table_limit < 2 or table_limit > 2**31:
            raise ConfigError(f"table_limit out of range: {table_limit}")
        self.max_x = int(max_x)
        self.segment_size = int(segment_size)
        self.table_limit = int(min(table_limit, max_x))
        self.threads = max(1, int(threads))
        self.cache = cache
        self._primes: np.ndarray | None = None
        self._prefix: np.ndarray | None = None
        self._sublinear: dict[int, tuple[int, int]] = {}

    # -- table ---------------------------------------------------------------

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        if self._primes is None:
            parts = [s.primes() for s in self.segments(0, self.table_limit + 1)]
            primes = np.concatenate(parts) if parts else np.zeros(0, np.int64)
            self._prefix = np.concatenate(([0], np.cumsum(primes)))
            self._primes = primes
        return self._primes, self._prefix

    @property
    def table_primes(self) -> np.ndarray:
        return self._table()[0]

    def _check_range(self, n: int) -> None:
        if n > self.max_x:
            raise RangeError(f"x={n} above configured maximum {self.max_x}")

    # -- public queries ------------------------------------------------------

    def pi_of(self, x) -> int:
        n = _floor_arg(x)
        self._check_range(n)
        if n <= self.table_limit:
            return int(np.searchsorted(self._table()[0], n, side="right"))
        return self._sublinear_pair(n)[0]

    def prime_sum_of(self, x) -> int:
        n = _floor_arg(x)
        self._check_range(n)
        if n <= self.table_limit:
            primes, prefix = self._table()
            return int(prefix[np.searchsorted(primes, n, side="right")])
        return self._sublinear_pair(n)[1]

    def checkpoint(self, x) -> PrimeCheckpoint:
        n = _floor_arg(x)
        return PrimeCheckpoint(n, self.pi_of(n), self.prime_sum_of(n))

    def pi_sublinear(self, x) -> int:
        n = _floor_arg(x)
        self._check_range(n)
        return self._sublinear_pair(n)[0]

    def prime_sum_sublinear(self, x) -> int:
        n = _floor_arg(x)
        self._check_range(n)
        return self._sublinear_pair(n)[1]

    def _sublinear_pair(self, n: int) -> tuple[int, int]:
        hit = self._sublinear.get(n)
        if hit is not None:
            return hit
        if self.cache is not None:
            cp = self.cache.get(n)
            if cp is not None:
                self._sublinear[n] = (cp.pi, cp.prime_sum)
                return self._sublinear[n]
        pair = lucy_hedgehog(n)
        self._sublinear[n] = pair
        if self.cache is not None:
            self.cache.put(PrimeCheckpoint(n, *pair))
        return pair

    def counts_by_sieve(self, points: Iterable) -> list[tuple[int, int]]:
        """pi and S at every point by a single streaming sieve pass."""
        ns = [_floor_arg(x) for x in points]
        if not ns:
            return []
        for n in ns:
            self._check_range(n)
        order = sorted(range(len(ns)), key=ns.__getitem__)
        out: list[tuple[int, int]] = [(0, 0)] * len(ns)
        pi_acc = 0
        sum_acc = 0
        j = 0
        for seg in self.segments(0, ns[order[-1]] + 1):
            primes = seg.primes()
            csum = np.concatenate(([0], np.cumsum(primes)))
            while j < len(order) and ns[order[j]] < seg.hi:
                k = int(np.searchsorted(primes, ns[order[j]], side="right"))
                out[order[j]] = (pi_acc + k, sum_acc + int(csum[k]))
                j += 1
            pi_acc += len(primes)
            sum_acc += int(csum[-1])
        return out

    def pi_sieve(self, x) -> int:
        return self.counts_by_sieve([x])[0][0]

    def prime_sum_sieve(self, x) -> int:
        return self.counts_by_sieve([x])[0][1]

    # -- enumeration ---------------------------------------------------------

    def segments(self, lo: int, hi: int) -> Iterator[SieveSegment]:
        return iter_segments(lo, hi, self.segment_size, self.threads)

    def prime_chunks(self, lo, hi) -> Iterator[np.ndarray]:
        """Yield ascending int64 arrays of the primes p with lo < p <= hi."""
        a = _floor_arg(lo) + 1
        b = _floor_arg(hi) + 1
        if b <= a:
            return
        self._check_range(b - 1)
        if b - 1 <= self.table_limit:
            primes = self._table()[0]
            i = np.searchsorted(primes, a, side="left")
            j = np.searchsorted(primes, b, side="left")
            yield primes[i:j]
            return
        for seg in self.segments(a, b):
            yield seg.primes()

    def primes_between(self, lo, hi) -> np.ndarray:
        parts = list(self.prime_chunks(lo, hi))
        return np.concatenate(parts) if parts else np.zeros(0, np.int64)
