"""Precomputed tables for rotation-abstracted win detection.

A 256-bit rotation table has bit ``l = r0 + 4*r1 + 16*r2 + 64*r3`` for
the board with quadrant ``q`` rotated ``rq`` counterclockwise quarter
turns.  This module slices the 32 winning windows into per-quadrant
segments and tabulates, for every quadrant code, which rotations make
each segment monochromatic.  Combining the per-quadrant "nibbles"
(4 bits, one per rotation) with precomputed expansion masks yields the
set of rotations under which a board has five in a row, without ever
materializing rotated boards.

Half layout: restricted to rotations of one parity (parity of
``r0+r1+r2+r3``), a table needs 128 bits.  Bit index is
``h = (r0>>1) + 2*r1 + 8*r2 + 32*r3``; for fixed parity and
``(r1,r2,r3)`` the two admissible ``r0`` values differ only in
``r0>>1``, so the map is a bijection onto [0,128).
"""

from __future__ import annotations

import numpy as np

from . import board as B

# ---------------------------------------------------------------------------
# Window segments per quadrant

_N_WINDOWS = 32


def _window_segments():
    """Per window: list of (quadrant, tuple of local indices)."""
    out = []
    for cells in B.WIN_WINDOWS:
        seg: dict[int, list[int]] = {}
        for x, y in cells:
            seg.setdefault(B.cell_quadrant(x, y), []).append(B.cell_local(x, y))
        out.append(sorted((q, tuple(ls)) for q, ls in seg.items()))
    return out


WINDOW_SEGMENTS = _window_segments()
assert all(2 <= len(s) <= 3 for s in WINDOW_SEGMENTS)

# slot assignment: per quadrant, windows in order of appearance
_slot_counter = [0, 0, 0, 0]
WINDOW_QUADS = np.full((_N_WINDOWS, 3), -1, dtype=np.int8)
WINDOW_SLOTS = np.full((_N_WINDOWS, 3), -1, dtype=np.int8)
for _w, _segs in enumerate(WINDOW_SEGMENTS):
    for _j, (_q, _ls) in enumerate(_segs):
        WINDOW_QUADS[_w, _j] = _q
        WINDOW_SLOTS[_w, _j] = _slot_counter[_q]
        _slot_counter[_q] += 1
N_SLOTS = tuple(_slot_counter)  # 17 windows touch each quadrant
assert N_SLOTS == (17, 17, 17, 17)

# NIBBLES[color][q][code][slot] in bit-packed form: slots 0..15 in a
# uint64 word, slot 16 in a uint8 tail.  Nibble bit r is set iff
# rotating `code` by r quarter turns makes the window's segment in this
# quadrant entirely `color`.
NIB_MAIN = np.zeros((2, 4, B.NUM_CODES), dtype=np.uint64)
NIB_TAIL = np.zeros((2, 4, B.NUM_CODES), dtype=np.uint8)


def _build_nibbles():
    for w, segs in enumerate(WINDOW_SEGMENTS):
        for j, (q, locals_) in enumerate(segs):
            slot = int(WINDOW_SLOTS[w, j])
            for col in (0, 1):
                digit = col + 1
                cov = np.ones(B.NUM_CODES, dtype=bool)
                for i in locals_:
                    cov &= B.DIGITS[:, i] == digit
                for r in range(4):
                    # covered at rotation r: rot^r(code) covers the segment
                    bit = cov[B.ROTATE_CODE[r]]
                    if slot < 16:
                        NIB_MAIN[col, q][bit] |= np.uint64(1 << (4 * slot + r))
                    else:
                        NIB_TAIL[col, q][bit] |= np.uint8(1 << r)


_build_nibbles()

# ---------------------------------------------------------------------------
# Expansion masks

PARITY = np.zeros(256, dtype=np.int8)
HALF_INDEX = np.zeros(256, dtype=np.int16)
for _l in range(256):
    _r = [(_l >> (2 * a)) & 3 for a in range(4)]
    PARITY[_l] = sum(_r) & 1
    HALF_INDEX[_l] = (_r[0] >> 1) + 2 * _r[1] + 8 * _r[2] + 32 * _r[3]

HALF_MEMBERS = np.zeros((2, 128), dtype=np.int16)  # [parity][h] -> l
for _l in range(256):
    HALF_MEMBERS[PARITY[_l], HALF_INDEX[_l]] = _l

# EXP_FULL[axis][nib][word]: 256-bit mask of rotations l with l_axis in nib
EXP_FULL = np.zeros((4, 16, 4), dtype=np.uint64)
# EXP_HALF[parity][axis][nib][word]: 128-bit mask on the half layout
EXP_HALF = np.zeros((2, 4, 16, 2), dtype=np.uint64)
for _axis in range(4):
    for _nib in range(16):
        for _l in range(256):
            if (_nib >> ((_l >> (2 * _axis)) & 3)) & 1:
                EXP_FULL[_axis, _nib, _l >> 6] |= np.uint64(1 << (_l & 63))
                _h = int(HALF_INDEX[_l])
                EXP_HALF[PARITY[_l], _axis, _nib, _h >> 6] |= np.uint64(1 << (_h & 63))


def half_bit(l: int) -> int:
    """Half-layout bit index of rotation l (parity implied by l)."""
    return int(HALF_INDEX[l])


def rotation_bit(r0: int, r1: int, r2: int, r3: int) -> int:
    return (r0 & 3) | ((r1 & 3) << 2) | ((r2 & 3) << 4) | ((r3 & 3) << 6)
