"""Serial retrograde solver for positions with many stones on the board.

Values of all children of one root are computed by enumerating, slice
by slice from 36 down, every board reachable by filling the root's
empty cells with alternating colors.  Boards never leave this supported
set (placements only touch root-empty cells, and rotations are handled
entirely inside the 256-rotation tables), so no section standardization
is needed anywhere.

Storage uses the parity trick: the rotation-max step flips the parity
of r0+r1+r2+r3, and the root only ever reads odd-parity rotations one
slice up, so slice n0+j needs only the parity-(j mod 2) half of each
256-bit table: 32 bytes per position instead of 64.

Boards at slice n0+j are indexed by colex rank of (added-cell subset,
mover-color pattern): flat = subset_rank * C(j, ceil(j/2)) + pattern_rank.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np
from numba import njit

from . import _kernels as K
from . import _tables as T
from . import board as B
from . import supers as SU
from .board import Color, Move

DEFAULT_THRESHOLD = 17
DEFAULT_BUDGET = 6 << 30


class TooFewStones(ValueError):
    pass


class TerminalRoot(ValueError):
    pass


def _binom_table(n=40, k=24):
    t = np.zeros((n, k), dtype=np.int64)
    for i in range(n):
        t[i, 0] = 1
        for j in range(1, min(i + 1, k)):
            t[i, j] = comb(i, j)
    return t


_BINOM = _binom_table()


def supported_count(root: B.Board, k: int) -> int:
    """Boards at slice k reachable by filling the root's empty cells."""
    n0 = B.count_stones(root)
    if not n0 <= k <= 36:
        raise ValueError(f"slice {k} outside {n0}..36")
    j = k - n0
    e = 36 - n0
    return comb(e, j) * comb(j, (j + 1) // 2)


def estimate_bytes(root: B.Board) -> int:
    """Peak working set of solve_midgame: two value buffers plus wins scratch."""
    n0 = B.count_stones(root)
    peak = 0
    for k in range(n0 + 1, 36):
        peak = max(peak, 2 * supported_count(root, k) + supported_count(root, k + 1))
    return 32 * peak


# ---------------------------------------------------------------------------
# Kernels


U0 = np.uint64(0)


@njit(cache=True, inline="always")
def _colex_next(c, j, e):
    """Advance a colex-ordered combination in place; False when exhausted."""
    if j == 0:
        return False
    i = 0
    while i + 1 < j and c[i] + 1 == c[i + 1]:
        c[i] = i
        i += 1
    if i + 1 < j:
        c[i] += 1
        return True
    if c[j - 1] + 1 < e:
        c[j - 1] += 1
        return True
    return False


@njit(cache=True)
def _enum_supported(e, j, a, root0, root1, root2, root3, dq, dmover, dother, out):
    """Keys of all supported boards at added-count j, in flat order."""
    c = np.empty(max(j, 1), np.int64)
    for t in range(j):
        c[t] = t
    p = np.empty(max(a, 1), np.int64)
    idx = 0
    while True:
        base0, base1, base2, base3 = root0, root1, root2, root3
        for t in range(j):
            cell = c[t]
            if dq[cell] == 0:
                base0 += dother[cell]
            elif dq[cell] == 1:
                base1 += dother[cell]
            elif dq[cell] == 2:
                base2 += dother[cell]
            else:
                base3 += dother[cell]
        for t in range(a):
            p[t] = t
        while True:
            k0, k1, k2, k3 = base0, base1, base2, base3
            for t in range(a):
                cell = c[p[t]]
                if dq[cell] == 0:
                    k0 += dmover[cell] - dother[cell]
                elif dq[cell] == 1:
                    k1 += dmover[cell] - dother[cell]
                elif dq[cell] == 2:
                    k2 += dmover[cell] - dother[cell]
                else:
                    k3 += dmover[cell] - dother[cell]
            out[idx] = (
                np.uint64(k0)
                | (np.uint64(k1) << np.uint64(16))
                | (np.uint64(k2) << np.uint64(32))
                | (np.uint64(k3) << np.uint64(48))
            )
            idx += 1
            if a == 0 or not _colex_next(p, a, j):
                break
        if j == 0 or not _colex_next(c, j, e):
            break
    return idx


@njit(cache=True)
def _pass_finalize(
    nibm, nibt, wq, ws, exph,
    e, j, a, col_k, col_prev, parity_k, all_terminal, build_d,
    root0, root1, root2, root3, dq, dmover, dother,
    buf,
):
    """Adjudicate one slice in place and convert values to contributions.

    On entry buf rows hold the recurrence OR at parity parity_k in words
    0..1 (zeros at slice 36); on exit they hold the child contribution
    D = wins(col_prev)@(1-parity_k) | rmax(negate(V)) in words 0..3
    (or the adjudicated V itself when build_d is false).
    """
    c = np.empty(max(j, 1), np.int64)
    for t in range(j):
        c[t] = t
    p = np.empty(max(a, 1), np.int64)
    idx = 0
    while True:
        base0, base1, base2, base3 = root0, root1, root2, root3
        for t in range(j):
            cell = c[t]
            if dq[cell] == 0:
                base0 += dother[cell]
            elif dq[cell] == 1:
                base1 += dother[cell]
            elif dq[cell] == 2:
                base2 += dother[cell]
            else:
                base3 += dother[cell]
        for t in range(a):
            p[t] = t
        while True:
            k0, k1, k2, k3 = base0, base1, base2, base3
            for t in range(a):
                cell = c[p[t]]
                if dq[cell] == 0:
                    k0 += dmover[cell] - dother[cell]
                elif dq[cell] == 1:
                    k1 += dmover[cell] - dother[cell]
                elif dq[cell] == 2:
                    k2 += dmover[cell] - dother[cell]
                else:
                    k3 += dmover[cell] - dother[cell]
            wb = K._wins_dual_codes(nibm, nibt, wq, ws, exph, 0, k0, k1, k2, k3)
            ww = K._wins_dual_codes(nibm, nibt, wq, ws, exph, 1, k0, k1, k2, k3)
            if parity_k == 0:
                wb_k0, wb_k1 = wb[0], wb[1]
                ww_k0, ww_k1 = ww[0], ww[1]
                wb_p0, wb_p1 = wb[2], wb[3]
                ww_p0, ww_p1 = ww[2], ww[3]
            else:
                wb_k0, wb_k1 = wb[2], wb[3]
                ww_k0, ww_k1 = ww[2], ww[3]
                wb_p0, wb_p1 = wb[0], wb[1]
                ww_p0, ww_p1 = ww[0], ww[1]
            if col_k == 0:
                wc0, wc1, wo0, wo1 = wb_k0, wb_k1, ww_k0, ww_k1
            else:
                wc0, wc1, wo0, wo1 = ww_k0, ww_k1, wb_k0, wb_k1
            t0 = wc0 | wo0
            t1 = wc1 | wo1
            if all_terminal:
                t0 = ~U0
                t1 = ~U0
            sw0 = wc0 & ~wo0
            sw1 = wc1 & ~wo1
            sn0 = wc0 | ~wo0
            sn1 = wc1 | ~wo1
            vw0 = (t0 & sw0) | (~t0 & buf[idx, 0])
            vw1 = (t1 & sw1) | (~t1 & buf[idx, 1])
            vn0 = (t0 & sn0) | (~t0 & buf[idx, 2])
            vn1 = (t1 & sn1) | (~t1 & buf[idx, 3])
            if build_d:
                rw0, rw1 = K._rmax_half2(~vn0, ~vn1)
                rn0, rn1 = K._rmax_half2(~vw0, ~vw1)
                if col_prev == 0:
                    ip0, ip1 = wb_p0, wb_p1
                else:
                    ip0, ip1 = ww_p0, ww_p1
                buf[idx, 0] = ip0 | rw0
                buf[idx, 1] = ip1 | rw1
                buf[idx, 2] = ip0 | rn0
                buf[idx, 3] = ip1 | rn1
            else:
                buf[idx, 0] = vw0
                buf[idx, 1] = vw1
                buf[idx, 2] = vn0
                buf[idx, 3] = vn1
            idx += 1
            if a == 0 or not _colex_next(p, a, j):
                break
        if j == 0 or not _colex_next(c, j, e):
            break
    return idx


@njit(cache=True)
def _pass_gather(e, j, a, ac, mover_is_c0, binom, d_child, out):
    """OR child contributions into every parent of slice added-count j.

    d_child holds D rows of slice j+1 in flat order; out rows (flat order
    of slice j, words 0..1 win / 2..3 notloss at the parent parity) are
    overwritten.  ac = ceil((j+1)/2) colors in the child pattern space;
    mover_is_c0 tells whether the added stone carries the root mover's
    color (pattern bit 1) or the other color (pattern bit 0).
    """
    cc = binom[j + 1, ac] if ac <= j + 1 else 0
    c = np.empty(max(j, 1), np.int64)
    for t in range(j):
        c[t] = t
    p = np.empty(max(a, 1), np.int64)
    sr = np.empty(e, np.int64)  # child subset rank per inserted cell
    mm = np.empty(e, np.int64)  # insertion position per inserted cell
    idx = 0
    while True:
        # child subset ranks for every cell not in the subset
        nfree = 0
        ci = 0
        pref = 0
        # suffix sums: suf[t] = sum_{i>=t} C(c[i], i+2)
        suf = np.empty(j + 1, np.int64)
        suf[j] = 0
        for t in range(j - 1, -1, -1):
            suf[t] = suf[t + 1] + binom[c[t], t + 2]
        for x in range(e):
            if ci < j and c[ci] == x:
                pref += binom[c[ci], ci + 1]
                ci += 1
                continue
            sr[nfree] = (pref + binom[x, ci + 1] + suf[ci]) * cc
            mm[nfree] = ci
            nfree += 1
        for t in range(a):
            p[t] = t
        while True:
            # pattern bitmask over the j subset positions
            pmask = np.int64(0)
            for t in range(a):
                pmask |= np.int64(1) << p[t]
            o0 = U0
            o1 = U0
            o2 = U0
            o3 = U0
            for f in range(nfree):
                m = mm[f]
                if mover_is_c0:
                    child_mask = (
                        ((pmask >> m) << (m + 1))
                        | (pmask & ((np.int64(1) << m) - 1))
                        | (np.int64(1) << m)
                    )
                else:
                    child_mask = ((pmask >> m) << (m + 1)) | (
                        pmask & ((np.int64(1) << m) - 1)
                    )
                # colex rank of the child pattern
                pr = np.int64(0)
                t = 0
                rem = child_mask
                while rem:
                    b = np.int64(0)
                    low = rem & (-rem)
                    while (np.int64(1) << b) != low:
                        b += 1
                    pr += binom[b, t + 1]
                    t += 1
                    rem &= rem - 1
                g = sr[f] + pr
                o0 |= d_child[g, 0]
                o1 |= d_child[g, 1]
                o2 |= d_child[g, 2]
                o3 |= d_child[g, 3]
            out[idx, 0] = o0
            out[idx, 1] = o1
            out[idx, 2] = o2
            out[idx, 3] = o3
            idx += 1
            if a == 0 or not _colex_next(p, a, j):
                break
        if j == 0 or not _colex_next(c, j, e):
            break
    return idx


# ---------------------------------------------------------------------------
# Driver


@dataclass
class MidgameResult:
    root: B.Board
    value: int
    moves: list[tuple[Move, int]]
    boards_processed: int
    seconds: float
    retained: Optional[dict] = None

    def move_values(self) -> dict[Move, int]:
        return dict(self.moves)


def _cell_arrays(root: B.Board):
    empties = B.empty_cells(root)
    e = len(empties)
    dq = np.empty(e, np.int64)
    dmover = np.empty(e, np.int64)
    dother = np.empty(e, np.int64)
    c0 = B.side_to_move(root)
    for i, (x, y) in enumerate(empties):
        dq[i] = B.cell_quadrant(x, y)
        pow3 = int(B.POW3[B.cell_local(x, y)])
        dmover[i] = int(c0) * pow3
        dother[i] = int(c0.other) * pow3
    return empties, dq, dmover, dother


def supported_keys(root: B.Board, k: int) -> np.ndarray:
    """Packed keys of the supported set at slice k, in flat-index order."""
    n0 = B.count_stones(root)
    j = k - n0
    a = (j + 1) // 2
    empties, dq, dmover, dother = _cell_arrays(root)
    out = np.empty(supported_count(root, k), dtype=np.uint64)
    r0, r1, r2, r3 = B.unpack(root)
    n = _enum_supported(len(empties), j, a, r0, r1, r2, r3, dq, dmover, dother, out)
    assert n == len(out)
    return out


def flat_index(root: B.Board, board: B.Board) -> int:
    """Flat rank of a supported board within its slice."""
    n0 = B.count_stones(root)
    empties, _, _, _ = _cell_arrays(root)
    c0 = B.side_to_move(root)
    sub = []
    pat = []
    for i, cell in enumerate(empties):
        d = B.get_cell(board, cell)
        if d:
            if d == int(c0):
                pat.append(len(sub))
            sub.append(i)
    j = len(sub)
    if B.count_stones(board) != n0 + j:
        raise ValueError("board is not supported by the root")
    a = (j + 1) // 2
    if len(pat) != a:
        raise ValueError("board color counts do not match alternation from the root")
    srank = sum(comb(s, t + 1) for t, s in enumerate(sub))
    prank = sum(comb(b, t + 1) for t, b in enumerate(pat))
    return srank * comb(j, a) + prank


def solve_midgame(
    root: B.Board,
    threshold: int = DEFAULT_THRESHOLD,
    budget: int = DEFAULT_BUDGET,
    retain_slices: bool = False,
) -> MidgameResult:
    """Exact values of every legal move from a many-stone root."""
    n0 = B.count_stones(root)
    if n0 < threshold:
        need = estimate_bytes(root)
        raise TooFewStones(
            f"{n0} stones is below the midgame threshold {threshold};"
            f" estimated working set {need / 2**30:.2f} GiB"
        )
    need = estimate_bytes(root)
    if need > budget:
        raise TooFewStones(
            f"estimated working set {need / 2**30:.2f} GiB exceeds the budget"
            f" {budget / 2**30:.2f} GiB"
        )
    if B.terminal_value(root) is not None:
        raise TerminalRoot("the game is already over at this root")
    t0 = time.time()
    empties, dq, dmover, dother = _cell_arrays(root)
    e = len(empties)
    r0, r1, r2, r3 = B.unpack(root)
    c0 = B.side_to_move(root)
    processed = 0
    retained: dict[int, np.ndarray] = {}

    d_prev: Optional[np.ndarray] = None
    for k in range(36, n0, -1):
        j = k - n0
        a = (j + 1) // 2
        nk = supported_count(root, k)
        buf = np.zeros((nk, 4), dtype=np.uint64)
        if k < 36:
            ac = (j + 2) // 2
            mover_is_c0 = (j % 2) == 0  # the stone reaching slice k+1 is the root mover's color
            cnt = _pass_gather(e, j, a, ac, mover_is_c0, _BINOM, d_prev, buf)
            assert cnt == nk
        col_k = 0 if k % 2 == 0 else 1
        col_prev = 0 if (k - 1) % 2 == 0 else 1
        parity_k = j % 2
        build_d = k > n0 + 1
        if retain_slices and build_d:
            # keep the adjudicated values themselves, not the contribution form
            vbuf = buf.copy()
            _pass_finalize(
                T.NIB_MAIN, T.NIB_TAIL,
                K._WQ, K._WS, T.EXP_HALF,
                e, j, a, col_k, col_prev, parity_k, k == 36, False,
                r0, r1, r2, r3, dq, dmover, dother,
                vbuf,
            )
            retained[k] = vbuf
        cnt = _pass_finalize(
            T.NIB_MAIN, T.NIB_TAIL,
            K._WQ, K._WS, T.EXP_HALF,
            e, j, a, col_k, col_prev, parity_k, k == 36, build_d,
            r0, r1, r2, r3, dq, dmover, dother,
            buf,
        )
        assert cnt == nk
        processed += nk
        if retain_slices and not build_d:
            retained[k] = buf.copy()
        d_prev = buf

    # buf now holds adjudicated values of slice n0+1 at parity 1
    values = d_prev
    move_list: list[tuple[Move, int]] = []
    for cell_idx, cell in enumerate(empties):
        placed = B.place(root, cell, c0)
        if B.won(placed, c0):
            move_list.append((Move(cell, None, None), 1))
            continue
        flat = cell_idx  # singleton subset, single pattern
        for quad in range(4):
            for direction in (1, -1):
                r = 1 if direction == 1 else 3
                h = T.half_bit(r << (2 * quad))
                word, off = h >> 6, h & 63
                w = (int(values[flat, word]) >> off) & 1
                nl = (int(values[flat, 2 + word]) >> off) & 1
                child_val = 1 if w else (0 if nl else -1)
                move_list.append((Move(cell, quad, direction), -child_val))
    value = max(v for _, v in move_list)
    return MidgameResult(
        root=root,
        value=value,
        moves=move_list,
        boards_processed=processed,
        seconds=time.time() - t0,
        retained=retained if retain_slices else None,
    )
