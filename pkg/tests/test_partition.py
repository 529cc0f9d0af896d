import random

import numpy as np
import pytest

from pentago import layout as L
from pentago import partition as P
from pentago import prng


def test_threefry_deterministic():
    a = prng.threefry2x64((1, 2), (3, 4))
    assert a == prng.threefry2x64((1, 2), (3, 4))
    assert a != prng.threefry2x64((1, 2), (3, 5))
    x0, x1 = prng.threefry2x64_array((1, 2), np.array([3], dtype=np.uint64), np.uint64(4))
    assert (int(x0[0]), int(x1[0])) == a


def test_threefry_array_matches_scalar():
    rng = random.Random(3)
    key = (rng.getrandbits(64), rng.getrandbits(64))
    c0 = np.array([rng.getrandbits(64) for _ in range(200)], dtype=np.uint64)
    c1 = np.array([rng.getrandbits(64) for _ in range(200)], dtype=np.uint64)
    x0, x1 = prng.threefry2x64_array(key, c0, c1)
    for i in range(200):
        s0, s1 = prng.threefry2x64(key, (int(c0[i]), int(c1[i])))
        assert (int(x0[i]), int(x1[i])) == (s0, s1)


def test_mix64_bijective_low():
    key = 0xDEADBEEF
    seen = {prng.mix64(key, x) for x in range(10000)}
    assert len(seen) == 10000
    arr = prng.mix64_array(key, np.arange(10000, dtype=np.uint64))
    assert [int(a) for a in arr[:50]] == [prng.mix64(key, x) for x in range(50)]


def test_uniform_trits():
    key = prng.derive_key(prng.DEFAULT_SEED, 1)
    a = prng.uniform_trits(key, 0, 50_000)
    b = prng.uniform_trits(key, 0, 50_000)
    assert np.array_equal(a, b)
    c = prng.uniform_trits(key, 10, 100)
    assert np.array_equal(a[10:110], c)
    counts = np.bincount(a, minlength=3)
    assert counts.min() > 15_000  # roughly uniform


SEED = prng.DEFAULT_SEED


def test_permute_identity_n1():
    assert P.permute(SEED, 1, 0) == 0


def test_permute_bijective_roundtrip():
    rng = random.Random(9)
    for n in (1, 2, 3, 7, 8, 100, 1023, 1024, 1025, 65536, 999_983):
        for trial in range(3):
            seed = bytes(rng.getrandbits(8) for _ in range(32))
            size = min(n, 500)
            picks = rng.sample(range(n), size) if n > size else list(range(n))
            outs = set()
            for i in picks:
                p = P.permute(seed, n, i, "forward")
                assert 0 <= p < n
                assert P.permute(seed, n, p, "inverse") == i
                outs.add(p)
            assert len(outs) == len(picks)


def test_permute_exhaustive_small():
    for n in (2, 5, 16, 17, 255, 256, 1000):
        fwd = [P.permute(SEED, n, i) for i in range(n)]
        assert sorted(fwd) == list(range(n))
        for i in range(n):
            assert P.permute(SEED, n, fwd[i], "inverse") == i


def test_permute_errors():
    with pytest.raises(L.IndexOutOfRange):
        P.permute(SEED, 10, 10)
    with pytest.raises(ValueError):
        P.permute(SEED, 10, 3, "sideways")


def test_line_owner_cross_check_small_slice():
    n = 3
    total = L.line_count(n)
    for ranks in (1, 2, 5, total):
        owners = {}
        for k in range(total):
            line = L.line_from_ordinal(n, k)
            owners[k] = P.line_owner(SEED, n, ranks, line)
        # chunk sizes differ by <= 1 and owners match enumeration exactly
        per = [0] * ranks
        for r in range(ranks):
            got = list(P.lines_of_rank(SEED, n, ranks, r))
            per[r] = len(got)
            for line in got:
                assert owners[L.ordinal_from_line(line)] == r
        assert sum(per) == total
        assert max(per) - min(per) <= 1
    assert all(P.line_owner(SEED, n, 1, L.line_from_ordinal(n, k)) == 0 for k in range(5))


def test_block_owner_properties():
    rng = random.Random(17)
    n = 4
    for _ in range(300):
        k = rng.randrange(L.block_count(n))
        blk = L.block_from_ordinal(n, k)
        r1 = P.block_owner(SEED, n, 7, blk)
        assert r1 == P.block_owner(SEED, n, 7, blk)  # deterministic
        assert r1 == 0 if False else True
        # the owner owns at least one line containing the block
        owned = False
        for line in L.lines_of_block(blk):
            if P.line_owner(SEED, n, 7, line) == r1:
                assert blk in list(L.blocks_of_line(line))
                owned = True
        assert owned
    assert P.block_owner(SEED, n, 1, L.block_from_ordinal(n, 0)) == 0


def test_partition_stats_small_matches_bruteforce():
    n, ranks = 4, 2
    rep = P.partition_stats(SEED, n, ranks)
    lines = np.zeros(ranks, dtype=np.int64)
    linesize = np.zeros(ranks, dtype=np.int64)
    for k in range(L.line_count(n)):
        line = L.line_from_ordinal(n, k)
        r = P.line_owner(SEED, n, ranks, line)
        lines[r] += 1
        s, d, coords = line
        dims = s.dims()
        size = dims[d]
        others = [q for q in range(4) if q != d]
        for qq, c in zip(others, coords):
            size *= min(8, dims[qq] - 8 * c)
        linesize[r] += size
    blocks = np.zeros(ranks, dtype=np.int64)
    supers = np.zeros(ranks, dtype=np.int64)
    for k in range(L.block_count(n)):
        blk = L.block_from_ordinal(n, k)
        r = P.block_owner(SEED, n, ranks, blk)
        blocks[r] += 1
        supers[r] += int(np.prod(L.block_extent(blk.section, blk.coords)))
    assert np.array_equal(rep.lines, lines)
    assert np.array_equal(rep.line_size, linesize)
    assert np.array_equal(rep.blocks, blocks)
    assert np.array_equal(rep.supers, supers)


def test_partition_stats_degenerate():
    n = 2
    total = L.line_count(n)
    rep = P.partition_stats(SEED, n, total)
    assert rep.degenerate
    assert rep.lines.sum() == total
    rep.ratios()  # no division by zero


def test_balance_moderate_slice():
    # a mid-size slice balances reasonably at modest rank counts
    rep = P.partition_stats(SEED, 12, 8)
    r = rep.ratios()
    assert r["lines"] < 1.3
    assert r["blocks"] < 1.3
    assert r["supers"] < 1.3
