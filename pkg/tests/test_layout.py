import random
from math import comb

import numpy as np
import pytest

from pentago import board as B
from pentago import layout as L
from pentago import symmetry as S
from pentago.board import Color

from conftest import random_board, random_board_any


def test_quad_dict_basics():
    assert L.quad_states(0, 0).dim == 1
    assert L.quad_states(1, 0).dim == 3  # center, corner orbit, edge orbit
    for b in range(10):
        for w in range(10 - b):
            qd = L.quad_states(b, w)
            assert int(qd.orbit_size.sum()) == comb(9, b) * comb(9 - b, w)
            # dictionary states are their own rotation minima, all distinct
            assert len(set(qd.states.tolist())) == qd.dim
            for c in qd.states:
                assert int(S.ORBIT_MIN[c]) == int(c)


def test_quad_dict_reflection_pairing():
    for b in range(10):
        for w in range(10 - b):
            qd = L.quad_states(b, w)
            for i in range(qd.dim):
                p = int(qd.partner[i])
                assert int(qd.partner[p]) == i
                # partner lives in the same pair slot {2k, 2k+1}
                assert p == i or p == (i ^ 1)
                # reflected state standardizes onto the partner
                refl = int(B.REFLECT_CODE[qd.states[i]])
                t = int(qd.partner_rot[i])
                assert int(B.ROTATE_CODE[t, refl]) == int(qd.states[p])


def test_std_tables():
    rng = random.Random(5)
    for _ in range(2000):
        c = rng.randrange(B.NUM_CODES)
        b, w = int(B.COUNT_BLACK[c]), int(B.COUNT_WHITE[c])
        qd = L.quad_states(b, w)
        i, m = int(L.STD_IDX[c]), int(L.STD_ROT[c])
        assert int(B.ROTATE_CODE[m, c]) == int(qd.states[i])


def test_standardize_section(rng):
    empty = L.Section(((0, 0),) * 4)
    assert L.standardize_section(empty) == (empty, 0)
    for _ in range(2000):
        b = random_board_any(rng)
        s = L.section_of_board(b)
        rep, d = L.standardize_section(s)
        assert L.permute_section(d, s) == rep
        for d2 in range(8):
            rep2, _ = L.standardize_section(L.permute_section(d2, s))
            assert rep2 == rep


def test_sections_of_slice_small():
    assert len(L.sections_of_slice(0)) == 1
    for n in (0, 1, 2, 3, 7):
        secs = L.sections_of_slice(n)
        assert list(secs) == sorted(secs, key=lambda s: s.counts)
        for s in secs:
            assert s.slice == n
            assert L.standardize_section(s)[0] == s


def test_sections_exhaustive_cover():
    # every valid section standardizes to exactly one listed section
    for n in (4, 9, 14):
        nb, nw = (n + 1) // 2, n // 2
        listed = set(L.sections_of_slice(n))
        seen = set()

        def rec(q, rb, rw, acc):
            if q == 4:
                if rb == 0 and rw == 0:
                    s = L.Section(tuple(acc))
                    rep, _ = L.standardize_section(s)
                    assert rep in listed
                    seen.add(rep)
                return
            for b in range(min(rb, 9) + 1):
                for w in range(min(rw, 9 - b) + 1):
                    rec(q + 1, rb - b, rw - w, acc + [(b, w)])

        rec(0, nb, nw, [])
        assert seen == listed


def test_max_sections_is_8239():
    t = L.layout_totals()
    assert t.max_sections == 8239
    assert t.max_sections_slice == 24


def test_child_section(rng):
    for _ in range(500):
        n = rng.randrange(0, 36)
        secs = L.sections_of_slice(n)
        s = rng.choice(secs)
        mover = Color.BLACK if n % 2 == 0 else Color.WHITE
        for q in range(4):
            b, w = s.counts[q]
            if b + w >= 9:
                with pytest.raises(L.FullQuadrant):
                    L.child_section(s, q, mover)
                continue
            child, d = L.child_section(s, q, mover)
            assert child.slice == n + 1
            assert child in set(L.sections_of_slice(n + 1))


def test_board_at_locate_roundtrip(rng):
    assert L.board_at(L.Section(((0, 0),) * 4), (0, 0, 0, 0)) == 0
    for _ in range(3000):
        b = random_board_any(rng)
        loc = L.locate(b)
        assert S.transform_board(loc.elem, b) == L.board_at(loc.section, loc.index)
        # standardized board belongs to a kept section
        assert L.standardize_section(loc.section)[0] == loc.section
        # locating the representative lands on the same slot
        loc2 = L.locate(L.board_at(loc.section, loc.index))
        assert (loc2.section, loc2.index) == (loc.section, loc.index)


def test_locate_orbit_invariance(rng):
    for _ in range(2000):
        b = random_board_any(rng)
        g = S.GroupElem(rng.randrange(256), rng.randrange(8))
        l1 = L.locate(b)
        l2 = L.locate(S.transform_board(g, b))
        assert (l1.section, l1.index) == (l2.section, l2.index)


def test_locate_random_section_index(rng):
    # board_at over random in-range indices round-trips through locate
    for _ in range(1000):
        n = rng.randrange(0, 37)
        s = rng.choice(L.sections_of_slice(n))
        idx = tuple(rng.randrange(d) for d in s.dims())
        b = L.board_at(s, idx)
        loc = L.locate(b)
        assert L.board_at(loc.section, loc.index) == S.transform_board(loc.elem, b)
        # the canonical slot may differ from (s, idx) when the orbit revisits
        # the section, but it must contain a board in the same orbit
        assert S.canonicalize(L.board_at(loc.section, loc.index))[0] == S.canonicalize(b)[0]


def test_block_structure_invariant_under_group(rng):
    # mapping an in-section board through any symmetry lands in the block
    # predicted by pure index algebra: same block coordinates after the
    # dimension permutation
    for _ in range(800):
        b = random_board_any(rng)
        loc = L.locate(b)
        g = S.GroupElem(rng.randrange(256), rng.randrange(8))
        loc2 = L.locate(S.transform_board(g, b))
        assert loc2.section == loc.section
        c1 = tuple(i // L.BLOCK for i in loc.index)
        c2 = tuple(i // L.BLOCK for i in loc2.index)
        assert c1 == c2  # same canonical slot entirely


def test_reflection_preserves_blocks(rng):
    # the deeper property: any board of a section, reflected, stays in the
    # image block under the per-dictionary partner mapping
    for _ in range(500):
        n = rng.randrange(0, 37)
        s = rng.choice(L.sections_of_slice(n))
        idx = tuple(rng.randrange(d) for d in s.dims())
        for q, (bb, ww) in enumerate(s.counts):
            qd = L.quad_states(bb, ww)
            p = int(qd.partner[idx[q]])
            assert p // L.BLOCK == idx[q] // L.BLOCK


def test_line_block_enumeration():
    s = L.sections_of_slice(4)[2]
    bd = s.block_dims()
    blocks = list(L.blocks_of_section(s))
    assert len(blocks) == int(np.prod(bd))
    lines = list(L.lines_of_section(s))
    per_dim = [bd[1] * bd[2] * bd[3], bd[0] * bd[2] * bd[3], bd[0] * bd[1] * bd[3], bd[0] * bd[1] * bd[2]]
    assert len(lines) == sum(per_dim)
    for blk in blocks:
        ls = L.lines_of_block(blk)
        assert len(ls) == 4
        for ln in ls:
            assert blk in list(L.blocks_of_line(ln))


def test_line_ordinals_roundtrip():
    for n in (3, 5, 11):
        cnt = L.line_count(n)
        step = max(1, cnt // 97)
        for k in range(0, cnt, step):
            ln = L.line_from_ordinal(n, k)
            assert L.ordinal_from_line(ln) == k
        cntb = L.block_count(n)
        for k in range(0, cntb, max(1, cntb // 97)):
            blk = L.block_from_ordinal(n, k)
            assert L.ordinal_from_block(blk) == k


def test_line_arithmetic_example():
    # a section with block grid (2,1,1,1) contributes 2 blocks and 7 lines
    for n in range(37):
        for s in L.sections_of_slice(n):
            if s.block_dims() == (2, 1, 1, 1):
                assert int(np.prod(s.block_dims())) == 2
                assert len(list(L.lines_of_section(s))) == 1 + 2 + 2 + 2
                return
    pytest.skip("no (2,1,1,1) section found")


def test_coverage_per_slice():
    # per-slice supers x 256 covers every raw board of the slice (over all
    # sections), and the kept sections cover every reduced position
    from pentago import census as C

    t = L._section_table()
    for n in (0, 1, 5, 17, 36):
        m = t["slice"] == n
        assert 256 * int(t["supers"][m].sum()) >= C.raw_count(n)
        mk = m & t["kept"]
        assert 256 * int(t["supers"][mk].sum()) >= C.sym_count(n)


def test_section_raw_cross_check():
    from pentago import census as C

    t = L._section_table()
    for n in (0, 1, 2, 6, 13, 36):
        m = t["slice"] == n
        total = 0
        for counts in t["counts"][m]:
            s = L.Section(tuple((int(b), int(w)) for b, w in counts))
            total += L.section_raw_boards(s)
        assert total == C.raw_count(n)
