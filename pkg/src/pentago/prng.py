"""Counter-based pseudorandomness from one shared 256-bit seed.

Two primitives, both pure functions of (key, counter):

* Threefry-2x64 (20 rounds): the workhorse for key derivation, boundary
  value injection, and sample selection.
* ``mix64``: a cheap keyed 64-bit bijection (multiply/xor-shift rounds)
  used in the hot partitioning paths where Threefry would dominate the
  metadata iteration cost.

Every participant holding the same seed derives identical streams; no
state is shared or advanced.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_PARITY = 0x1BD11BDAA9FC1A22
_ROTS = (16, 42, 12, 31, 16, 32, 24, 21)


def _rotl(x: int, r: int) -> int:
    return ((x << r) | (x >> (64 - r))) & MASK64


def threefry2x64(key: tuple[int, int], ctr: tuple[int, int], rounds: int = 20) -> tuple[int, int]:
    k0, k1 = key[0] & MASK64, key[1] & MASK64
    ks = (k0, k1, k0 ^ k1 ^ _PARITY)
    x0 = (ctr[0] + k0) & MASK64
    x1 = (ctr[1] + k1) & MASK64
    for r in range(rounds):
        x0 = (x0 + x1) & MASK64
        x1 = _rotl(x1, _ROTS[r % 8])
        x1 ^= x0
        if r % 4 == 3:
            j = r // 4 + 1
            x0 = (x0 + ks[j % 3]) & MASK64
            x1 = (x1 + ks[(j + 1) % 3] + j) & MASK64
    return x0, x1


def threefry2x64_array(key: tuple[int, int], ctr0: np.ndarray, ctr1, rounds: int = 20):
    """Vectorized Threefry over arrays of counters."""
    k0 = np.uint64(key[0] & MASK64)
    k1 = np.uint64(key[1] & MASK64)
    k2 = np.uint64((key[0] ^ key[1] ^ _PARITY) & MASK64)
    ks = (k0, k1, k2)
    x0 = np.asarray(ctr0, dtype=np.uint64) + k0
    x1 = np.broadcast_to(np.asarray(ctr1, dtype=np.uint64), x0.shape).copy() + k1
    for r in range(rounds):
        x0 = x0 + x1
        rot = np.uint64(_ROTS[r % 8])
        x1 = (x1 << rot) | (x1 >> np.uint64(64 - _ROTS[r % 8]))
        x1 = x1 ^ x0
        if r % 4 == 3:
            j = r // 4 + 1
            x0 = x0 + ks[j % 3]
            x1 = x1 + ks[(j + 1) % 3] + np.uint64(j)
    return x0, x1


# keyed 64-bit bijection; constants from the splitmix64 finalizer family
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(key: int, x: int) -> int:
    z = (x ^ key) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(key: int, x: np.ndarray) -> np.ndarray:
    z = np.asarray(x, dtype=np.uint64) ^ np.uint64(key)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


# ---------------------------------------------------------------------------
# Seeds

SEED_BYTES = 32
DEFAULT_SEED = bytes(range(32))  # documented default; all published stats use it


def check_seed(seed: bytes) -> bytes:
    if len(seed) != SEED_BYTES:
        raise ValueError(f"seed must be {SEED_BYTES} bytes, got {len(seed)}")
    return seed


def seed_words(seed: bytes) -> tuple[int, int, int, int]:
    check_seed(seed)
    return tuple(int.from_bytes(seed[8 * i : 8 * i + 8], "little") for i in range(4))


def derive_key(seed: bytes, tag: int, extra: int = 0) -> tuple[int, int]:
    """A (k0, k1) subkey for one purpose; tag/extra separate the domains."""
    s0, s1, s2, s3 = seed_words(seed)
    return threefry2x64((s0, s1), ((s2 ^ tag) & MASK64, (s3 ^ extra) & MASK64))


def uniform_trits(key: tuple[int, int], start: int, count: int) -> np.ndarray:
    """`count` iid uniform values in {0,1,2}, positions start..start+count-1.

    Deterministic rejection sampling: draw at (position, attempt) until the
    draw falls under the largest multiple of 3.
    """
    limit = np.uint64(MASK64 - (MASK64 % 3))  # values >= limit are rejected
    ctr = np.arange(start, start + count, dtype=np.uint64)
    out = np.zeros(count, dtype=np.uint64)
    pending = np.ones(count, dtype=bool)
    attempt = 0
    while pending.any():
        x0, _ = threefry2x64_array(key, ctr[pending], np.uint64(attempt))
        ok = x0 < limit
        vals = x0 % np.uint64(3)
        idx = np.flatnonzero(pending)
        out[idx[ok]] = vals[ok]
        pending[idx[ok]] = False
        attempt += 1
        if attempt > 64:
            raise AssertionError("rejection sampling failed to terminate")
    return out.astype(np.int8)
