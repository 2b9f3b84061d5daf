import struct
import zlib

import pytest

from primerem.checkpoints import (
    MAGIC,
    CheckpointCache,
    decode_checkpoints,
    encode_checkpoints,
)
from primerem.errors import ChecksumError
from primerem.primes import PrimeCheckpoint, PrimeEngine

RECS = [PrimeCheckpoint(10, 4, 17), PrimeCheckpoint(2, 1, 2),
        PrimeCheckpoint(10**10, 455052511, 2220822432581729238)]


def test_round_trip_bit_identical():
    blob = encode_checkpoints(RECS)
    header, recs = decode_checkpoints(blob)
    assert header.count == 3
    assert recs == sorted(RECS, key=lambda r: r.x)
    assert encode_checkpoints(recs) == blob


def test_layout():
    blob = encode_checkpoints([PrimeCheckpoint(10, 4, 17)], max_x=1000, algorithm_version=7)
    assert blob[:8] == MAGIC
    assert struct.unpack_from("<IIQQ", blob, 8) == (1, 7, 1000, 1)
    assert struct.unpack_from("<QQQQ", blob, 32) == (10, 4, 17, 0)
    assert struct.unpack("<I", blob[-4:])[0] == zlib.crc32(blob[:-4])
    assert len(blob) == 32 + 32 + 4


def test_wide_sum_uses_high_word():
    big = PrimeCheckpoint(2**40, 2**36, 2**70 + 5)
    blob = encode_checkpoints([big])
    assert struct.unpack_from("<QQ", blob, 48) == (5, 2**6)
    assert decode_checkpoints(blob)[1] == [big]


@pytest.mark.parametrize("mutate", [
    lambda b: b[:-1],
    lambda b: b[:40] + bytes([b[40] ^ 1]) + b[41:],
    lambda b: b"XXXXXXXX" + b[8:],
    lambda b: b"",
])
def test_corruption_detected(mutate):
    with pytest.raises(ChecksumError):
        decode_checkpoints(mutate(encode_checkpoints(RECS)))


def test_cache_recovers_from_corruption(tmp_path):
    path = tmp_path / "c.bin"
    path.write_bytes(b"garbage" * 10)
    cache = CheckpointCache(path)
    assert cache.discarded.startswith("corrupt")
    assert len(cache) == 0
    eng = PrimeEngine(table_limit=1000, cache=cache)
    assert eng.pi_of(10**6) == 78498
    assert decode_checkpoints(path.read_bytes())[1] == [PrimeCheckpoint(10**6, 78498, 37550402023)]


def test_stale_version_invalidated(tmp_path):
    path = tmp_path / "c.bin"
    path.write_bytes(encode_checkpoints(RECS, algorithm_version=99))
    cache = CheckpointCache(path)
    assert cache.discarded == "stale"
    assert cache.get(10) is None


def test_warm_equals_cold(tmp_path):
    path = tmp_path / "c.bin"
    xs = [10**7 + 3, 3 * 10**7, 123456789]
    cold = PrimeEngine(table_limit=1000, cache=CheckpointCache(path))
    a = [cold.checkpoint(x) for x in xs]
    warm_cache = CheckpointCache(path)
    assert len(warm_cache) == 3
    warm = PrimeEngine(table_limit=1000, cache=warm_cache)
    # a poisoned recursion would raise; warm reads must not recompute
    import primerem.primes as primes_mod

    orig = primes_mod.lucy_hedgehog
    primes_mod.lucy_hedgehog = lambda n: (_ for _ in ()).throw(AssertionError("recomputed"))
    try:
        b = [warm.checkpoint(x) for x in xs]
    finally:
        primes_mod.lucy_hedgehog = orig
    assert a == b


def test_clear(tmp_path):
    path = tmp_path / "c.bin"
    cache = CheckpointCache(path)
    cache.put(PrimeCheckpoint(10, 4, 17))
    assert path.exists()
    cache.clear()
    assert not path.exists() and len(cache) == 0
