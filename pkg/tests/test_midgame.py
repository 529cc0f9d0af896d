import random
from math import comb

import numpy as np
import pytest

from pentago import board as B
from pentago import layout as L
from pentago import midgame as M
from pentago import search as SE
from pentago import supers as SU
from pentago import symmetry as S
from pentago.board import Color

from conftest import random_board


def nonterminal_root(rng, stones):
    while True:
        b = random_board(rng, stones)
        if B.terminal_value(b) is None:
            return b


def reference_solve(root):
    """Unhalved scalar reference: full SuperValues for every supported board."""
    n0 = B.count_stones(root)
    vals: dict[int, dict[int, SU.SuperValue]] = {}
    for k in range(36, n0, -1):
        cur = {}
        mover = Color.BLACK if k % 2 == 0 else Color.WHITE
        for key in M.supported_keys(root, k):
            b = int(key)
            wc = SU.super_wins(b, mover)
            wo = SU.super_wins(b, mover.other)
            t = SU.MASK256 if k == 36 else (wc | wo)
            static_w = wc & ~wo & SU.MASK256
            static_n = (wc | ~wo) & SU.MASK256
            rec_w = rec_n = 0
            if k < 36:
                placer = mover
                for cell in B.empty_cells(b):
                    child = B.place(b, cell, placer)
                    cw = SU.super_wins(child, placer)
                    sv = vals[k + 1][child]
                    neg = SU.negate_value(sv)
                    rec_w |= cw | SU.rmax(neg.win)
                    rec_n |= cw | SU.rmax(neg.notloss)
            cur[b] = SU.SuperValue(
                ((t & static_w) | (~t & rec_w)) & SU.MASK256,
                ((t & static_n) | (~t & rec_n)) & SU.MASK256,
            )
        vals[k] = cur
    return vals


def test_supported_count_edges(rng):
    root = nonterminal_root(rng, 32)
    assert M.supported_count(root, 32) == 1
    full = random_board(rng, 36)
    assert M.supported_count(full, 36) == 1
    e = 36 - 32
    for k in range(32, 37):
        j = k - 32
        assert M.supported_count(root, k) == comb(e, j) * comb(j, (j + 1) // 2)


def test_supported_keys_brute(rng):
    # forward enumeration by repeated placements matches the combinatorial set
    root = nonterminal_root(rng, 33)
    reach = {33: {root}}
    for k in range(34, 37):
        cur = set()
        mover = Color.BLACK if (k - 1) % 2 == 0 else Color.WHITE
        for b in reach[k - 1]:
            for cell in B.empty_cells(b):
                cur.add(B.place(b, cell, mover))
        reach[k] = cur
    for k in range(33, 37):
        keys = M.supported_keys(root, k)
        assert len(keys) == M.supported_count(root, k)
        assert set(int(x) for x in keys) == reach[k]
        assert len(set(keys.tolist())) == len(keys)


def test_flat_index_matches_enumeration(rng):
    root = nonterminal_root(rng, 31)
    for k in (31, 33, 35, 36):
        keys = M.supported_keys(root, k)
        step = max(1, len(keys) // 50)
        for i in range(0, len(keys), step):
            assert M.flat_index(root, int(keys[i])) == i


def test_too_few_stones():
    with pytest.raises(M.TooFewStones):
        M.solve_midgame(0)


def test_terminal_root(rng):
    while True:
        b = random_board(rng, 34)
        if B.terminal_value(b) is not None:
            break
    with pytest.raises(M.TerminalRoot):
        M.solve_midgame(b, threshold=30)


def test_midgame_matches_reference_halves(rng):
    for _ in range(4):
        root = nonterminal_root(rng, 33)
        n0 = 33
        res = M.solve_midgame(root, threshold=30, retain_slices=True)
        ref = reference_solve(root)
        for k in range(n0 + 1, 37):
            parity = (k - n0) % 2
            keys = M.supported_keys(root, k)
            arr = res.retained[k]
            for i, key in enumerate(keys):
                sv = ref[k][int(key)]
                assert SU.half_from_words(arr[i, :2]) == SU.compress_half(sv.win, parity)
                assert SU.half_from_words(arr[i, 2:]) == SU.compress_half(sv.notloss, parity)


def test_midgame_moves_match_rules_and_search(rng):
    for _ in range(6):
        root = nonterminal_root(rng, 33)
        res = M.solve_midgame(root, threshold=30)
        moves = B.moves(root)
        got = dict(res.moves)
        assert set(got) == {m for _, m in moves}
        for child, mv in moves:
            tv = B.terminal_value(child)
            cv = tv if tv is not None else SE.perfect_value(child).value
            expect = 1 if mv.quad is None else -cv
            assert got[mv] == expect, (root, mv)
        assert res.value == max(got.values())
        assert res.value == SE.perfect_value(root).value


def test_midgame_30_stone_roots(rng):
    for _ in range(3):
        root = nonterminal_root(rng, 30)
        res = M.solve_midgame(root, threshold=30)
        assert res.value == SE.perfect_value(root).value
        # spot-check a few child values
        sample = random.Random(1).sample(res.moves, 10)
        for mv, val in sample:
            if mv.quad is None:
                assert val == 1
                continue
            child = B.rotate_quadrant(B.place(root, mv.cell, B.side_to_move(root)), mv.quad, mv.direction)
            tv = B.terminal_value(child)
            cv = tv if tv is not None else SE.perfect_value(child).value
            assert val == -cv


def test_midgame_global_symmetry(rng):
    root = nonterminal_root(rng, 32)
    res = M.solve_midgame(root, threshold=30)
    base = sorted(v for _, v in res.moves)
    for d in range(1, 8):
        res2 = M.solve_midgame(S.transform_global(d, root), threshold=30)
        assert sorted(v for _, v in res2.moves) == base
        assert res2.value == res.value
