"""The 2048-element approximate-symmetry group and its action on boards.

The group is the semidirect product of the 256 per-quadrant rotation
combinations (the local group, Z4 x Z4 x Z4 x Z4) with the 8-element
dihedral group of whole-board rotations and reflections.  An element
``(local, glob)`` acts as ``local . (glob . board)``.

Local rotation combinations are encoded as one integer in [0, 256):
``l = r0 + 4*r1 + 16*r2 + 64*r3`` with ``rq`` counterclockwise quarter
turns of quadrant ``q``.  Global symmetries are encoded in [0, 8) as
``d = rot + 4*refl`` acting as ``R^rot . F^refl`` (reflection first),
with R and F the generators fixed in :mod:`pentago.board`.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import board as B

# ---------------------------------------------------------------------------
# Global symmetries as cell permutations, factored into a quadrant-position
# permutation plus one content transform shared by all four quadrants.


def _global_cell_map(d: int):
    rot, refl = d % 4, d // 4

    def f(cell):
        x, y = cell
        if refl:
            x = 5 - x
        for _ in range(rot):
            x, y = 5 - y, x
        return x, y

    return f


def _factor(d: int):
    f = _global_cell_map(d)
    qpos = [None] * 4
    lperm = [None] * 9
    for x in range(6):
        for y in range(6):
            q, i = B.cell_quadrant(x, y), B.cell_local(x, y)
            x2, y2 = f((x, y))
            q2, i2 = B.cell_quadrant(x2, y2), B.cell_local(x2, y2)
            if qpos[q] is None:
                qpos[q] = q2
            else:
                assert qpos[q] == q2
            if lperm[i] is None:
                lperm[i] = i2
            else:
                assert lperm[i] == i2, "content transform must not depend on quadrant"
    return tuple(qpos), tuple(lperm)


QPOS = np.zeros((8, 4), dtype=np.int8)  # QPOS[d][q] = where quadrant q lands
CONTENT = np.zeros((8, B.NUM_CODES), dtype=np.uint16)
for _d in range(8):
    _qp, _lp = _factor(_d)
    QPOS[_d] = _qp
    CONTENT[_d] = B._perm_code_table(_lp)

REFLECTS = np.array([d >= 4 for d in range(8)], dtype=bool)


def _compose_global(d1: int, d2: int) -> int:
    """d1 after d2, matched against the cell maps."""
    f1, f2 = _global_cell_map(d1), _global_cell_map(d2)
    probe = [(0, 0), (1, 0), (0, 1)]
    target = [f1(f2(c)) for c in probe]
    for d in range(8):
        f = _global_cell_map(d)
        if [f(c) for c in probe] == target:
            return d
    raise AssertionError


GLOBAL_MUL = np.array([[_compose_global(a, b) for b in range(8)] for a in range(8)], dtype=np.int8)
GLOBAL_INV = np.array(
    [next(b for b in range(8) if GLOBAL_MUL[a, b] == 0) for a in range(8)], dtype=np.int8
)


class GroupElem(NamedTuple):
    """One element of the 2048-element group, acting as local . (glob . b)."""

    local: int  # 0..255
    glob: int  # 0..7


IDENTITY = GroupElem(0, 0)


def local_rot(l: int, q: int) -> int:
    return (l >> (2 * q)) & 3


def make_local(r0: int, r1: int, r2: int, r3: int) -> int:
    return (r0 & 3) | ((r1 & 3) << 2) | ((r2 & 3) << 4) | ((r3 & 3) << 6)


def local_add(a: int, b: int) -> int:
    out = 0
    for q in range(4):
        out |= ((local_rot(a, q) + local_rot(b, q)) & 3) << (2 * q)
    return out


def local_neg(a: int) -> int:
    out = 0
    for q in range(4):
        out |= ((-local_rot(a, q)) & 3) << (2 * q)
    return out


def conjugate_local(d: int, l: int) -> int:
    """d . rot(l) . d^-1: permute quadrant axes, negating under reflection."""
    sign = -1 if REFLECTS[d] else 1
    out = 0
    for q in range(4):
        out |= ((sign * local_rot(l, q)) & 3) << (2 * int(QPOS[d, q]))
    return out


def compose(g1: GroupElem, g2: GroupElem) -> GroupElem:
    """g1 . g2, so that act(compose(g1,g2), b) == act(g1, act(g2, b))."""
    return GroupElem(
        local_add(g1.local, conjugate_local(g1.glob, g2.local)),
        int(GLOBAL_MUL[g1.glob, g2.glob]),
    )


def inverse(g: GroupElem) -> GroupElem:
    dinv = int(GLOBAL_INV[g.glob])
    return GroupElem(conjugate_local(dinv, local_neg(g.local)), dinv)


def transform_global(d: int, board: B.Board) -> B.Board:
    out = 0
    for q in range(4):
        c = B.quadrant_code(board, q)
        out |= int(CONTENT[d, c]) << (16 * int(QPOS[d, q]))
    return out


def transform_local(l: int, board: B.Board) -> B.Board:
    out = 0
    for q in range(4):
        c = B.quadrant_code(board, q)
        out |= int(B.ROTATE_CODE[local_rot(l, q), c]) << (16 * q)
    return out


def transform_board(g: GroupElem, board: B.Board) -> B.Board:
    return transform_local(g.local, transform_global(g.glob, board))


# ---------------------------------------------------------------------------
# Canonicalization: minimal packed key over the whole 2048-element orbit.
# Quadrants minimize independently under local rotations, so the orbit
# minimum is min over the 8 global images of the per-quadrant rotation minima.

_ORBIT_MIN = np.minimum.reduce([B.ROTATE_CODE[k] for k in range(4)])
_MIN_ROT = np.zeros(B.NUM_CODES, dtype=np.int8)  # least k with rot^k(code) minimal
for _k in (3, 2, 1):
    _MIN_ROT[B.ROTATE_CODE[_k] == _ORBIT_MIN] = _k
_MIN_ROT[B.ROTATE_CODE[0] == _ORBIT_MIN.astype(np.uint16)] = 0

ORBIT_MIN = _ORBIT_MIN.astype(np.uint16)
MIN_ROT = _MIN_ROT


def canonicalize(board: B.Board) -> tuple[B.Board, GroupElem]:
    """Minimal 64-bit key over the orbit, with an element mapping onto it."""
    best = None
    best_g = None
    for d in range(8):
        gb = transform_global(d, board)
        key = 0
        l = 0
        for q in range(4):
            c = B.quadrant_code(gb, q)
            key |= int(ORBIT_MIN[c]) << (16 * q)
            l |= int(MIN_ROT[c]) << (2 * q)
        if best is None or key < best:
            best = key
            best_g = GroupElem(l, d)
    return best, best_g


def canonicalize_global(board: B.Board) -> B.Board:
    """Minimal key over the 8 exact (value-preserving) symmetries only."""
    return min(transform_global(d, board) for d in range(8))


def canonicalize_many(keys: np.ndarray) -> np.ndarray:
    """Vectorized orbit minima for an array of packed keys."""
    keys = np.asarray(keys, dtype=np.uint64)
    best = np.full(keys.shape, np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
    for d in range(8):
        img = np.zeros_like(keys)
        for q in range(4):
            c = (keys >> np.uint64(16 * q)).astype(np.uint16)
            img |= ORBIT_MIN[CONTENT[d][c]].astype(np.uint64) << np.uint64(16 * int(QPOS[d, q]))
        np.minimum(best, img, out=best)
    return best
