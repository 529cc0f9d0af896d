import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pentago import _kernels as K
from pentago import _tables as T
from pentago import board as B
from pentago import supers as SU
from pentago import symmetry as S
from pentago.board import Color

from conftest import random_board_any


def rand_mask(rng):
    return rng.getrandbits(256)


def test_rmax_trivial():
    assert SU.rmax(0) == 0
    s = 1  # singleton at identity
    out = SU.rmax(s)
    expect = 0
    for axis in range(4):
        for r in (1, 3):
            expect |= 1 << (r << (2 * axis))
    assert out == expect
    assert bin(out).count("1") == 8


def test_rmax_matches_brute(rng):
    for _ in range(300):
        s = rand_mask(rng)
        assert SU.rmax(s) == SU.rmax_brute(s)


def test_rmax_neighbor_characterization(rng):
    # g in rmax(s) iff some quarter-turn neighbor of g is in s, bit by bit
    for _ in range(20):
        s = rand_mask(rng)
        out = SU.rmax(s)
        for l in range(256):
            nbr = False
            for axis in range(4):
                r = (l >> (2 * axis)) & 3
                for dr in (1, 3):
                    l2 = (l & ~(3 << (2 * axis))) | (((r + dr) & 3) << (2 * axis))
                    nbr = nbr or bool((s >> l2) & 1)
            assert bool((out >> l) & 1) == nbr


def test_rmax_parity_flip(rng):
    even = sum(1 << l for l in range(256) if not T.PARITY[l])
    odd = SU.MASK256 ^ even
    for _ in range(50):
        s = rand_mask(rng) & even
        assert SU.rmax(s) & even == 0
        s = rand_mask(rng) & odd
        assert SU.rmax(s) & odd == 0


def test_rmax_words_kernel(rng):
    xs = np.array([SU.to_words(rand_mask(rng)) for _ in range(500)])
    out = np.zeros_like(xs)
    K.rmax_words(xs, out)
    for i in range(len(xs)):
        assert SU.from_words(out[i]) == SU.rmax(SU.from_words(xs[i]))


def test_rmax_half_kernel(rng):
    for parity in (0, 1):
        full = [rand_mask(rng) for _ in range(200)]
        halves = np.array(
            [SU.half_to_words(SU.compress_half(s, parity)) for s in full], dtype=np.uint64
        )
        out = np.zeros_like(halves)
        K.rmax_half_words(halves, out)
        for i, s in enumerate(full):
            restricted = SU.expand_half(SU.compress_half(s, parity), parity)
            expect = SU.compress_half(SU.rmax(restricted), 1 - parity)
            assert SU.half_from_words(out[i]) == expect


def test_half_roundtrip(rng):
    for parity in (0, 1):
        for _ in range(100):
            sh = rng.getrandbits(128)
            assert SU.compress_half(SU.expand_half(sh, parity), parity) == sh


def test_super_wins_trivial():
    assert SU.super_wins(0, Color.BLACK) == 0
    b = 0
    for x in range(5):
        b += 1 * int(B.POW3[B.cell_local(x, 0)]) << (16 * B.cell_quadrant(x, 0))
    assert SU.super_wins(b, Color.BLACK) & 1  # identity rotation wins


def test_super_wins_matches_brute(rng):
    for _ in range(150):
        b = random_board_any(rng)
        for col in (Color.BLACK, Color.WHITE):
            assert SU.super_wins(b, col) == SU.super_wins_brute(b, col)


def test_wins_kernels_match_scalar(rng):
    n = 400
    boards = [random_board_any(rng) for _ in range(n)]
    codes = np.array([B.unpack(b) for b in boards], dtype=np.uint16)
    full = np.zeros((n, 4), dtype=np.uint64)
    dual = np.zeros((n, 4), dtype=np.uint64)
    for col in (0, 1):
        K.wins_full(codes, col, full)
        K.wins_dualhalf(codes, col, dual)
        for i, b in enumerate(boards):
            s = SU.super_wins(b, Color(col + 1))
            assert SU.from_words(full[i]) == s
            assert SU.half_from_words(dual[i, :2]) == SU.compress_half(s, 0)
            assert SU.half_from_words(dual[i, 2:]) == SU.compress_half(s, 1)


def test_transform_super_identity(rng):
    s = rand_mask(rng)
    assert SU.transform_super(S.IDENTITY, s) == s


def test_transform_super_commutes_with_wins(rng):
    for _ in range(300):
        b = random_board_any(rng)
        g = S.GroupElem(rng.randrange(256), rng.randrange(8))
        col = rng.choice((Color.BLACK, Color.WHITE))
        lhs = SU.transform_super(g, SU.super_wins(b, col))
        rhs = SU.super_wins(S.transform_board(g, b), col)
        assert lhs == rhs


def test_transform_super_composition(rng):
    for _ in range(300):
        s = rand_mask(rng)
        g1 = S.GroupElem(rng.randrange(256), rng.randrange(8))
        g2 = S.GroupElem(rng.randrange(256), rng.randrange(8))
        lhs = SU.transform_super(g1, SU.transform_super(g2, s))
        rhs = SU.transform_super(S.compose(g1, g2), s)
        assert lhs == rhs


def test_transform_super_full_group_sweep(rng):
    # every one of the 2048 elements, against explicit per-bit permutation
    b = random_board_any(rng)
    s = SU.super_wins(b, Color.BLACK)
    for d in range(8):
        for l in range(0, 256, 1):
            g = S.GroupElem(l, d)
            expect = 0
            for lp in range(256):
                src = S.conjugate_local(int(S.GLOBAL_INV[d]), S.local_add(lp, l))
                if (s >> src) & 1:
                    expect |= 1 << lp
            assert SU.transform_super(g, s) == expect
            if d >= 1 and l > 8:
                break  # full 256 locals only for d=0; spot-check the rest


def test_value_encoding():
    assert SU.negate_value(SU.SV_WIN) == SU.SV_LOSS
    assert SU.negate_value(SU.SV_TIE) == SU.SV_TIE
    assert SU.merge_value(SU.SV_LOSS, SU.SV_TIE) == SU.SV_TIE
    assert SU.merge_value(SU.SV_TIE, SU.SV_WIN) == SU.SV_WIN


@given(st.integers(0, 2**256 - 1), st.integers(0, 2**256 - 1))
@settings(max_examples=200, deadline=None)
def test_value_props(win_bits, extra):
    v = SU.SuperValue(win_bits & extra, (win_bits & extra) | extra)
    SU.sv_check(v)
    assert SU.negate_value(SU.negate_value(v)) == v
    w = SU.SuperValue(extra & win_bits, extra | (win_bits & extra))
    m = SU.merge_value(v, w)
    SU.sv_check(m)
    for l in range(0, 256, 37):
        assert SU.sv_decode(m, l) == max(SU.sv_decode(v, l), SU.sv_decode(w, l))


def test_merge_is_per_rotation_max(rng):
    for _ in range(100):
        vals_a = [rng.choice((-1, 0, 1)) for _ in range(256)]
        vals_b = [rng.choice((-1, 0, 1)) for _ in range(256)]
        a, b = SU.sv_encode(vals_a), SU.sv_encode(vals_b)
        m = SU.merge_value(a, b)
        for l in range(256):
            assert SU.sv_decode(m, l) == max(vals_a[l], vals_b[l])
        n = SU.negate_value(a)
        for l in range(256):
            assert SU.sv_decode(n, l) == -vals_a[l]


def test_serialization_roundtrip(rng):
    for _ in range(50):
        v = SU.SuperValue(0, 0)
        w = rand_mask(rng)
        v = SU.SuperValue(w & rand_mask(rng), w)
        data = SU.sv_to_bytes(v)
        assert len(data) == 64
        assert SU.sv_from_bytes(data) == v
    # byte order: bit 0 of the win mask lands in byte 0, bit 0
    v = SU.SuperValue(1, 1)
    data = SU.sv_to_bytes(v)
    assert data[0] == 1 and data[32] == 1
