"""Binary checkpoint cache for exact (x, pi(x), S(x)) triples.

Layout, little-endian::

    header   magic[8] format_version:u32 algorithm_version:u32 max_x:u64 count:u64
    records  count * (x:u64 pi:u64 sum_lo:u64 sum_hi:u64)
    trailer  crc32:u32 over header and records
"""
from __future__ import annotations

import logging
import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

from .errors import ChecksumError
from .primes import ALGORITHM_VERSION, DEFAULT_MAX_X, PrimeCheckpoint

log = logging.getLogger(__name__)

__all__ = [
    "CACHE_ENV",
    "CheckpointCache",
    "CacheHeader",
    "FORMAT_VERSION",
    "MAGIC",
    "decode_checkpoints",
    "encode_checkpoints",
]

MAGIC = b"PRIMCKPT"
FORMAT_VERSION = 1
CACHE_ENV = "PRIMEREM_CACHE"
_HEADER = struct.Struct("<8sIIQQ")
_RECORD = struct.Struct("<QQQQ")
_CRC = struct.Struct("<I")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class CacheHeader:
    format_version: int
    algorithm_version: int
    max_x: int
    count: int


def encode_checkpoints(records, max_x: int = DEFAULT_MAX_X,
                       algorithm_version: int = ALGORITHM_VERSION) -> bytes:
    recs = sorted(records, key=lambda r: r.x)
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, algorithm_version, max_x, len(recs))]
    for r in recs:
        if r.prime_sum >> 128:
            raise OverflowError("prime sum exceeds 128 bits")
        parts.append(_RECORD.pack(r.x, r.pi, r.prime_sum & _MASK64, r.prime_sum >> 64))
    body = b"".join(parts)
    return body + _CRC.pack(zlib.crc32(body))


def decode_checkpoints(data: bytes) -> tuple[CacheHeader, list[PrimeCheckpoint]]:
    if len(data) < _HEADER.size + _CRC.size:
        raise ChecksumError("cache file truncated")
    body, (crc,) = data[: -_CRC.size], _CRC.unpack(data[-_CRC.size :])
    if zlib.crc32(body) != crc:
        raise ChecksumError("cache CRC mismatch")
    magic, fmt, algo, max_x, count = _HEADER.unpack_from(body)
    if magic != MAGIC:
        raise ChecksumError("bad cache magic")
    if fmt != FORMAT_VERSION:
        raise ChecksumError(f"unsupported cache format version {fmt}")
    if len(body) != _HEADER.size + count * _RECORD.size:
        raise ChecksumError("cache record count does not match file length")
    records = []
    for i in range(count):
        x, pi, lo, hi = _RECORD.unpack_from(body, _HEADER.size + i * _RECORD.size)
        try:
            records.append(PrimeCheckpoint(x, pi, lo | (hi << 64)))
        except ValueError as exc:
            raise ChecksumError(f"invalid record {i}: {exc}") from exc
    return CacheHeader(fmt, algo, max_x, count), records


class CheckpointCache:
    """Persistent map x -> PrimeCheckpoint.

    A corrupt file or one written by another algorithm version is discarded
    (``self.discarded`` says why) and its entries are recomputed on demand.
    """

    def __init__(self, path, max_x: int = DEFAULT_MAX_X,
                 algorithm_version: int = ALGORITHM_VERSION, autosave: bool = True):
        self.path = Path(path)
        self.max_x = max_x
        self.algorithm_version = algorithm_version
        self.autosave = autosave
        self.discarded: str | None = None
        self._records: dict[int, PrimeCheckpoint] = {}
        self.load()

    def load(self) -> None:
        self._records = {}
        if not self.path.exists():
            return
        try:
            header, records = decode_checkpoints(self.path.read_bytes())
        except ChecksumError as exc:
            log.warning("discarding checkpoint cache %s: %s", self.path, exc)
            self.discarded = f"corrupt: {exc}"
            return
        if header.algorithm_version != self.algorithm_version:
            log.warning("discarding stale checkpoint cache %s (algorithm v%d, want v%d)",
                        self.path, header.algorithm_version, self.algorithm_version)
            self.discarded = "stale"
            return
        self._records = {r.x: r for r in records}

    def get(self, x: int) -> PrimeCheckpoint | None:
        return self._records.get(int(x))

    def put(self, cp: PrimeCheckpoint) -> None:
        if self._records.get(cp.x) == cp:
            return
        self._records[cp.x] = cp
        if self.autosave:
            self.save()

    def records(self) -> list[PrimeCheckpoint]:
        return [self._records[k] for k in sorted(self._records)]

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_name(self.path.name + ".tmp")
        tmp.write_bytes(encode_checkpoints(self.records(), self.max_x, self.algorithm_version))
        os.replace(tmp, self.path)

    def clear(self) -> None:
        self._records = {}
        if self.path.exists():
            self.path.unlink()

    def __len__(self) -> int:
        return len(self._records)
