"""256-bit rotation-abstracted predicates and values.

A RotSet is a plain Python int in [0, 2^256): bit ``l = r0 + 4*r1 +
16*r2 + 64*r3`` answers a predicate for the board with each quadrant q
rotated ``rq`` counterclockwise quarter turns.  A SuperValue is a pair
of RotSets (win, notloss) encoding a value in {-1, 0, +1} per rotation
as (v = +1, v >= 0); merge is then bitwise OR and negation is
swap-and-complement.

Serialized form: 64 bytes, the 32-byte little-endian win mask followed
by the 32-byte little-endian not-loss mask.

All operations are pure; arrays of supers use an (N, 4) uint64 word
layout (word k holds bits 64k..64k+63) handled by the bulk kernels.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _tables as T
from . import board as B
from . import symmetry as S

MASK256 = (1 << 256) - 1

# ---------------------------------------------------------------------------
# rmax: per-rotation OR over the 8 single-quadrant quarter-turn neighbors


def _axis_masks():
    """(axis) -> masks of bits whose axis coordinate is in a given set."""
    masks = []
    for axis in range(4):
        by_val = [0, 0, 0, 0]
        for l in range(256):
            by_val[(l >> (2 * axis)) & 3] |= 1 << l
        masks.append(by_val)
    return masks


_AXIS_VAL_MASK = _axis_masks()


def rmax(s: int) -> int:
    """Bit g of the result: OR of s over the 8 neighbors g +- e_axis."""
    out = 0
    for axis in range(4):
        step = 1 << (2 * axis)  # bit distance of +1 along this axis
        m0, m1, m2, m3 = _AXIS_VAL_MASK[axis]
        # +e: result bit g reads source r+1; -e reads r-1
        out |= ((s >> step) & (m0 | m1 | m2)) | ((s << 3 * step) & m3)
        out |= ((s << step) & (m1 | m2 | m3)) | ((s >> 3 * step) & m0)
    return out & MASK256


def rmax_brute(s: int) -> int:
    """Scalar oracle: explicit 8-neighbor OR per bit."""
    out = 0
    for l in range(256):
        hit = False
        for axis in range(4):
            r = (l >> (2 * axis)) & 3
            for dr in (1, 3):
                l2 = (l & ~(3 << (2 * axis))) | (((r + dr) & 3) << (2 * axis))
                if (s >> l2) & 1:
                    hit = True
        if hit:
            out |= 1 << l
    return out


# ---------------------------------------------------------------------------
# Rotation-abstracted win detection


def super_wins(board: B.Board, color: B.Color) -> int:
    """Set of rotations l such that l.board has five in a row for color."""
    col = 0 if color == B.Color.BLACK else 1
    codes = B.unpack(board)
    main = [int(T.NIB_MAIN[col, q, codes[q]]) for q in range(4)]
    tail = [int(T.NIB_TAIL[col, q, codes[q]]) for q in range(4)]

    def nib(q: int, slot: int) -> int:
        if slot < 16:
            return (main[q] >> (4 * slot)) & 15
        return tail[q]

    words = [0, 0, 0, 0]
    for w in range(T._N_WINDOWS):
        q0 = int(T.WINDOW_QUADS[w, 0])
        n0 = nib(q0, int(T.WINDOW_SLOTS[w, 0]))
        if not n0:
            continue
        q1 = int(T.WINDOW_QUADS[w, 1])
        n1 = nib(q1, int(T.WINDOW_SLOTS[w, 1]))
        if not n1:
            continue
        q2 = int(T.WINDOW_QUADS[w, 2])
        if q2 >= 0:
            n2 = nib(q2, int(T.WINDOW_SLOTS[w, 2]))
            if not n2:
                continue
        for k in range(4):
            m = int(T.EXP_FULL[q0, n0, k]) & int(T.EXP_FULL[q1, n1, k])
            if q2 >= 0:
                m &= int(T.EXP_FULL[q2, n2, k])
            words[k] |= m
    return words[0] | (words[1] << 64) | (words[2] << 128) | (words[3] << 192)


def super_wins_brute(board: B.Board, color: B.Color) -> int:
    """Oracle: rotate the board 256 times and call plain won()."""
    out = 0
    for l in range(256):
        if B.won(S.transform_local(l, board), color):
            out |= 1 << l
    return out


# ---------------------------------------------------------------------------
# Transforms under the full symmetry group

_PERM_CACHE: dict[S.GroupElem, np.ndarray] = {}


def _transform_perm(g: S.GroupElem) -> np.ndarray:
    """Source bit index per output bit for transform_super(g, .)."""
    perm = _PERM_CACHE.get(g)
    if perm is None:
        dinv = int(S.GLOBAL_INV[g.glob])
        perm = np.empty(256, dtype=np.int16)
        for l in range(256):
            perm[l] = S.conjugate_local(dinv, S.local_add(l, g.local))
        _PERM_CACHE[g] = perm
    return perm


def transform_super(g: S.GroupElem, s: int) -> int:
    """If s encodes l -> P(l.b) for a reflection-invariant predicate P,
    the result encodes l -> P(l.(g.b))."""
    perm = _transform_perm(g)
    out = 0
    for l in range(256):
        if (s >> int(perm[l])) & 1:
            out |= 1 << l
    return out


def translate_super(s: int, t: int) -> int:
    """out(l) = s(l - t): cyclic shift by a local rotation t along each axis."""
    for axis in range(4):
        ta = (t >> (2 * axis)) & 3
        if not ta:
            continue
        step = 1 << (2 * axis)
        m = _AXIS_VAL_MASK[axis]
        hi = 0
        for v in range(ta, 4):
            hi |= m[v]
        lo = MASK256 ^ hi
        s = ((s << (ta * step)) & hi) | ((s >> ((4 - ta) * step)) & lo)
    return s


def _global_bit_perms():
    """perm[d][l'] = conjugate(d, l'): out(l') = s(perm[l']) realizes
    s2(u) = s(conjugate(d, u))."""
    out = np.zeros((8, 256), dtype=np.int64)
    for d in range(8):
        for l in range(256):
            out[d, l] = S.conjugate_local(d, l)
    return out


_GLOBAL_BIT_PERM = _global_bit_perms()


def permute_super_rows(rows: np.ndarray, d: int) -> np.ndarray:
    """Apply s2(u) = s(conjugate(d, u)) to both masks of (m, 8) super rows."""
    m = rows.shape[0]
    bits = np.unpackbits(
        rows.astype("<u8").view(np.uint8).reshape(m, 64), axis=1, bitorder="little"
    ).reshape(m, 2, 256)
    perm = _GLOBAL_BIT_PERM[d]
    bits = bits[:, :, perm]
    packed = np.packbits(bits.reshape(m, 512), axis=1, bitorder="little")
    return packed.view("<u8").reshape(m, 8).astype(np.uint64)


# ---------------------------------------------------------------------------
# SuperValue


class SuperValue(NamedTuple):
    win: int
    notloss: int


SV_LOSS = SuperValue(0, 0)
SV_TIE = SuperValue(0, MASK256)
SV_WIN = SuperValue(MASK256, MASK256)


def sv_check(v: SuperValue) -> SuperValue:
    if v.win & ~v.notloss:
        raise ValueError("encoding violation: win must imply notloss")
    return v


def negate_value(v: SuperValue) -> SuperValue:
    return SuperValue(~v.notloss & MASK256, ~v.win & MASK256)


def merge_value(a: SuperValue, b: SuperValue) -> SuperValue:
    return SuperValue(a.win | b.win, a.notloss | b.notloss)


def transform_value(g: S.GroupElem, v: SuperValue) -> SuperValue:
    return SuperValue(transform_super(g, v.win), transform_super(g, v.notloss))


def sv_decode(v: SuperValue, l: int) -> int:
    if (v.win >> l) & 1:
        return 1
    return 0 if (v.notloss >> l) & 1 else -1


def sv_encode(values) -> SuperValue:
    """Build a SuperValue from 256 per-rotation values in {-1,0,+1}."""
    w = n = 0
    for l, val in enumerate(values):
        if val >= 1:
            w |= 1 << l
        if val >= 0:
            n |= 1 << l
    return SuperValue(w, n)


def sv_to_bytes(v: SuperValue) -> bytes:
    return v.win.to_bytes(32, "little") + v.notloss.to_bytes(32, "little")


def sv_from_bytes(data: bytes) -> SuperValue:
    if len(data) != 64:
        raise ValueError(f"SuperValue is 64 bytes, got {len(data)}")
    return SuperValue(int.from_bytes(data[:32], "little"), int.from_bytes(data[32:], "little"))


# ---------------------------------------------------------------------------
# int <-> word-array conversions for the bulk kernels


def to_words(s: int) -> np.ndarray:
    return np.frombuffer(s.to_bytes(32, "little"), dtype=np.uint64).copy()


def from_words(w: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(w, dtype=np.uint64).tobytes(), "little")


def half_to_words(s: int) -> np.ndarray:
    return np.frombuffer(s.to_bytes(16, "little"), dtype=np.uint64).copy()


def half_from_words(w: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(w, dtype=np.uint64).tobytes(), "little")


def compress_half(s: int, parity: int) -> int:
    """Restrict a 256-bit set to one parity class (128-bit half layout)."""
    out = 0
    for h in range(128):
        if (s >> int(T.HALF_MEMBERS[parity, h])) & 1:
            out |= 1 << h
    return out


def expand_half(sh: int, parity: int) -> int:
    """Embed a 128-bit half back into the 256-bit layout."""
    out = 0
    for h in range(128):
        if (sh >> h) & 1:
            out |= 1 << int(T.HALF_MEMBERS[parity, h])
    return out
