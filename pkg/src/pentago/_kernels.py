"""Numba kernels for bulk super algebra and board enumeration.

Array conventions: a full super is 4 uint64 words (word k = rotation
bits 64k..64k+63); a half super is 2 words on the 128-bit parity
layout.  Kernels are single-threaded and deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import _tables as T
from . import board as B

_NIBM = T.NIB_MAIN
_NIBT = T.NIB_TAIL
_WQ = T.WINDOW_QUADS.astype(np.int64)
_WS = T.WINDOW_SLOTS.astype(np.int64)
_EXPF = T.EXP_FULL
_EXPH = T.EXP_HALF

U64_1 = np.uint64(1)
U64_0 = np.uint64(0)


@njit(cache=True, inline="always")
def _wins_dual_codes(nibm, nibt, wq, ws, exph, col, c0, c1, c2, c3):
    """Both parity halves of the win set for one board's quadrant codes."""
    m0 = nibm[col, 0, c0]
    m1 = nibm[col, 1, c1]
    m2 = nibm[col, 2, c2]
    m3 = nibm[col, 3, c3]
    t0 = np.uint64(nibt[col, 0, c0])
    t1 = np.uint64(nibt[col, 1, c1])
    t2 = np.uint64(nibt[col, 2, c2])
    t3 = np.uint64(nibt[col, 3, c3])
    a0 = a1 = b0 = b1 = U64_0
    for w in range(32):
        qa = wq[w, 0]
        sa = ws[w, 0]
        if qa == 0:
            na = (m0 >> np.uint64(4 * sa)) & np.uint64(15) if sa < 16 else t0
        elif qa == 1:
            na = (m1 >> np.uint64(4 * sa)) & np.uint64(15) if sa < 16 else t1
        elif qa == 2:
            na = (m2 >> np.uint64(4 * sa)) & np.uint64(15) if sa < 16 else t2
        else:
            na = (m3 >> np.uint64(4 * sa)) & np.uint64(15) if sa < 16 else t3
        if na == U64_0:
            continue
        qb = wq[w, 1]
        sb = ws[w, 1]
        if qb == 0:
            nb = (m0 >> np.uint64(4 * sb)) & np.uint64(15) if sb < 16 else t0
        elif qb == 1:
            nb = (m1 >> np.uint64(4 * sb)) & np.uint64(15) if sb < 16 else t1
        elif qb == 2:
            nb = (m2 >> np.uint64(4 * sb)) & np.uint64(15) if sb < 16 else t2
        else:
            nb = (m3 >> np.uint64(4 * sb)) & np.uint64(15) if sb < 16 else t3
        if nb == U64_0:
            continue
        qc = wq[w, 2]
        if qc >= 0:
            sc = ws[w, 2]
            if qc == 0:
                nc = (m0 >> np.uint64(4 * sc)) & np.uint64(15) if sc < 16 else t0
            elif qc == 1:
                nc = (m1 >> np.uint64(4 * sc)) & np.uint64(15) if sc < 16 else t1
            elif qc == 2:
                nc = (m2 >> np.uint64(4 * sc)) & np.uint64(15) if sc < 16 else t2
            else:
                nc = (m3 >> np.uint64(4 * sc)) & np.uint64(15) if sc < 16 else t3
            if nc == U64_0:
                continue
            a0 |= exph[0, qa, na, 0] & exph[0, qb, nb, 0] & exph[0, qc, nc, 0]
            a1 |= exph[0, qa, na, 1] & exph[0, qb, nb, 1] & exph[0, qc, nc, 1]
            b0 |= exph[1, qa, na, 0] & exph[1, qb, nb, 0] & exph[1, qc, nc, 0]
            b1 |= exph[1, qa, na, 1] & exph[1, qb, nb, 1] & exph[1, qc, nc, 1]
        else:
            a0 |= exph[0, qa, na, 0] & exph[0, qb, nb, 0]
            a1 |= exph[0, qa, na, 1] & exph[0, qb, nb, 1]
            b0 |= exph[1, qa, na, 0] & exph[1, qb, nb, 0]
            b1 |= exph[1, qa, na, 1] & exph[1, qb, nb, 1]
    return a0, a1, b0, b1


@njit(cache=True)
def wins_full(codes, col, out):
    """out[i] = 256-bit set of rotations giving five in a row, 4 words."""
    n = codes.shape[0]
    mains = np.empty(4, np.uint64)
    tails = np.empty(4, np.uint8)
    for i in range(n):
        for q in range(4):
            c = codes[i, q]
            mains[q] = _NIBM[col, q, c]
            tails[q] = _NIBT[col, q, c]
        w0 = w1 = w2 = w3 = U64_0
        for w in range(32):
            qa = _WQ[w, 0]
            sa = _WS[w, 0]
            na = (mains[qa] >> np.uint64(4 * sa)) & np.uint64(15) if sa < 16 else np.uint64(tails[qa])
            if na == U64_0:
                continue
            qb = _WQ[w, 1]
            sb = _WS[w, 1]
            nb = (mains[qb] >> np.uint64(4 * sb)) & np.uint64(15) if sb < 16 else np.uint64(tails[qb])
            if nb == U64_0:
                continue
            qc = _WQ[w, 2]
            if qc >= 0:
                sc = _WS[w, 2]
                nc = (mains[qc] >> np.uint64(4 * sc)) & np.uint64(15) if sc < 16 else np.uint64(tails[qc])
                if nc == U64_0:
                    continue
                w0 |= _EXPF[qa, na, 0] & _EXPF[qb, nb, 0] & _EXPF[qc, nc, 0]
                w1 |= _EXPF[qa, na, 1] & _EXPF[qb, nb, 1] & _EXPF[qc, nc, 1]
                w2 |= _EXPF[qa, na, 2] & _EXPF[qb, nb, 2] & _EXPF[qc, nc, 2]
                w3 |= _EXPF[qa, na, 3] & _EXPF[qb, nb, 3] & _EXPF[qc, nc, 3]
            else:
                w0 |= _EXPF[qa, na, 0] & _EXPF[qb, nb, 0]
                w1 |= _EXPF[qa, na, 1] & _EXPF[qb, nb, 1]
                w2 |= _EXPF[qa, na, 2] & _EXPF[qb, nb, 2]
                w3 |= _EXPF[qa, na, 3] & _EXPF[qb, nb, 3]
        out[i, 0] = w0
        out[i, 1] = w1
        out[i, 2] = w2
        out[i, 3] = w3


@njit(cache=True)
def wins_dualhalf(codes, col, out):
    """Both parity halves at once: out words [p0w0, p0w1, p1w0, p1w1]."""
    n = codes.shape[0]
    mains = np.empty(4, np.uint64)
    tails = np.empty(4, np.uint8)
    for i in range(n):
        for q in range(4):
            c = codes[i, q]
            mains[q] = _NIBM[col, q, c]
            tails[q] = _NIBT[col, q, c]
        a0 = a1 = b0 = b1 = U64_0
        for w in range(32):
            qa = _WQ[w, 0]
            sa = _WS[w, 0]
            na = (mains[qa] >> np.uint64(4 * sa)) & np.uint64(15) if sa < 16 else np.uint64(tails[qa])
            if na == U64_0:
                continue
            qb = _WQ[w, 1]
            sb = _WS[w, 1]
            nb = (mains[qb] >> np.uint64(4 * sb)) & np.uint64(15) if sb < 16 else np.uint64(tails[qb])
            if nb == U64_0:
                continue
            qc = _WQ[w, 2]
            if qc >= 0:
                sc = _WS[w, 2]
                nc = (mains[qc] >> np.uint64(4 * sc)) & np.uint64(15) if sc < 16 else np.uint64(tails[qc])
                if nc == U64_0:
                    continue
                a0 |= _EXPH[0, qa, na, 0] & _EXPH[0, qb, nb, 0] & _EXPH[0, qc, nc, 0]
                a1 |= _EXPH[0, qa, na, 1] & _EXPH[0, qb, nb, 1] & _EXPH[0, qc, nc, 1]
                b0 |= _EXPH[1, qa, na, 0] & _EXPH[1, qb, nb, 0] & _EXPH[1, qc, nc, 0]
                b1 |= _EXPH[1, qa, na, 1] & _EXPH[1, qb, nb, 1] & _EXPH[1, qc, nc, 1]
            else:
                a0 |= _EXPH[0, qa, na, 0] & _EXPH[0, qb, nb, 0]
                a1 |= _EXPH[0, qa, na, 1] & _EXPH[0, qb, nb, 1]
                b0 |= _EXPH[1, qa, na, 0] & _EXPH[1, qb, nb, 0]
                b1 |= _EXPH[1, qa, na, 1] & _EXPH[1, qb, nb, 1]
        out[i, 0] = a0
        out[i, 1] = a1
        out[i, 2] = b0
        out[i, 3] = b1


# ---------------------------------------------------------------------------
# rmax


@njit(cache=True, inline="always")
def _rmax4(x0, x1, x2, x3):
    # axis 0: nibble lanes
    m_lt3 = np.uint64(0x7777777777777777)
    m_eq3 = np.uint64(0x8888888888888888)
    m_gt0 = np.uint64(0xEEEEEEEEEEEEEEEE)
    m_eq0 = np.uint64(0x1111111111111111)
    o0 = ((x0 >> U64_1) & m_lt3) | ((x0 << np.uint64(3)) & m_eq3)
    o0 |= ((x0 << U64_1) & m_gt0) | ((x0 >> np.uint64(3)) & m_eq0)
    o1 = ((x1 >> U64_1) & m_lt3) | ((x1 << np.uint64(3)) & m_eq3)
    o1 |= ((x1 << U64_1) & m_gt0) | ((x1 >> np.uint64(3)) & m_eq0)
    o2 = ((x2 >> U64_1) & m_lt3) | ((x2 << np.uint64(3)) & m_eq3)
    o2 |= ((x2 << U64_1) & m_gt0) | ((x2 >> np.uint64(3)) & m_eq0)
    o3 = ((x3 >> U64_1) & m_lt3) | ((x3 << np.uint64(3)) & m_eq3)
    o3 |= ((x3 << U64_1) & m_gt0) | ((x3 >> np.uint64(3)) & m_eq0)
    # axis 1: 16-bit lanes, shift 4
    a_lt3 = np.uint64(0x0FFF0FFF0FFF0FFF)
    a_eq3 = np.uint64(0xF000F000F000F000)
    a_gt0 = np.uint64(0xFFF0FFF0FFF0FFF0)
    a_eq0 = np.uint64(0x000F000F000F000F)
    o0 |= ((x0 >> np.uint64(4)) & a_lt3) | ((x0 << np.uint64(12)) & a_eq3)
    o0 |= ((x0 << np.uint64(4)) & a_gt0) | ((x0 >> np.uint64(12)) & a_eq0)
    o1 |= ((x1 >> np.uint64(4)) & a_lt3) | ((x1 << np.uint64(12)) & a_eq3)
    o1 |= ((x1 << np.uint64(4)) & a_gt0) | ((x1 >> np.uint64(12)) & a_eq0)
    o2 |= ((x2 >> np.uint64(4)) & a_lt3) | ((x2 << np.uint64(12)) & a_eq3)
    o2 |= ((x2 << np.uint64(4)) & a_gt0) | ((x2 >> np.uint64(12)) & a_eq0)
    o3 |= ((x3 >> np.uint64(4)) & a_lt3) | ((x3 << np.uint64(12)) & a_eq3)
    o3 |= ((x3 << np.uint64(4)) & a_gt0) | ((x3 >> np.uint64(12)) & a_eq0)
    # axis 2: whole-word 16-bit rotations
    o0 |= (x0 >> np.uint64(16)) | (x0 << np.uint64(48))
    o0 |= (x0 << np.uint64(16)) | (x0 >> np.uint64(48))
    o1 |= (x1 >> np.uint64(16)) | (x1 << np.uint64(48))
    o1 |= (x1 << np.uint64(16)) | (x1 >> np.uint64(48))
    o2 |= (x2 >> np.uint64(16)) | (x2 << np.uint64(48))
    o2 |= (x2 << np.uint64(16)) | (x2 >> np.uint64(48))
    o3 |= (x3 >> np.uint64(16)) | (x3 << np.uint64(48))
    o3 |= (x3 << np.uint64(16)) | (x3 >> np.uint64(48))
    # axis 3: word rotation both ways
    o0 |= x1 | x3
    o1 |= x2 | x0
    o2 |= x3 | x1
    o3 |= x0 | x2
    return o0, o1, o2, o3


@njit(cache=True)
def rmax_words(x, out):
    for i in range(x.shape[0]):
        o0, o1, o2, o3 = _rmax4(x[i, 0], x[i, 1], x[i, 2], x[i, 3])
        out[i, 0] = o0
        out[i, 1] = o1
        out[i, 2] = o2
        out[i, 3] = o3


@njit(cache=True, inline="always")
def _rmax_half2(x0, x1):
    # axis 0: identity OR even/odd bit swap
    hi = np.uint64(0xAAAAAAAAAAAAAAAA)
    lo = np.uint64(0x5555555555555555)
    o0 = x0 | ((x0 & hi) >> U64_1) | ((x0 & lo) << U64_1)
    o1 = x1 | ((x1 & hi) >> U64_1) | ((x1 & lo) << U64_1)
    # axis 1: 8-bit lanes, shift 2
    a_lt3 = np.uint64(0x3F3F3F3F3F3F3F3F)
    a_eq3 = np.uint64(0xC0C0C0C0C0C0C0C0)
    a_gt0 = np.uint64(0xFCFCFCFCFCFCFCFC)
    a_eq0 = np.uint64(0x0303030303030303)
    o0 |= ((x0 >> np.uint64(2)) & a_lt3) | ((x0 << np.uint64(6)) & a_eq3)
    o0 |= ((x0 << np.uint64(2)) & a_gt0) | ((x0 >> np.uint64(6)) & a_eq0)
    o1 |= ((x1 >> np.uint64(2)) & a_lt3) | ((x1 << np.uint64(6)) & a_eq3)
    o1 |= ((x1 << np.uint64(2)) & a_gt0) | ((x1 >> np.uint64(6)) & a_eq0)
    # axis 2: 32-bit lanes, shift 8
    b_lt3 = np.uint64(0x00FFFFFF00FFFFFF)
    b_eq3 = np.uint64(0xFF000000FF000000)
    b_gt0 = np.uint64(0xFFFFFF00FFFFFF00)
    b_eq0 = np.uint64(0x000000FF000000FF)
    o0 |= ((x0 >> np.uint64(8)) & b_lt3) | ((x0 << np.uint64(24)) & b_eq3)
    o0 |= ((x0 << np.uint64(8)) & b_gt0) | ((x0 >> np.uint64(24)) & b_eq0)
    o1 |= ((x1 >> np.uint64(8)) & b_lt3) | ((x1 << np.uint64(24)) & b_eq3)
    o1 |= ((x1 << np.uint64(8)) & b_gt0) | ((x1 >> np.uint64(24)) & b_eq0)
    # axis 3: rotate the four 32-bit chunks both ways
    lo32 = np.uint64(0xFFFFFFFF)
    c0 = x0 & lo32
    c1 = x0 >> np.uint64(32)
    c2 = x1 & lo32
    c3 = x1 >> np.uint64(32)
    o0 |= (c1 | (c2 << np.uint64(32))) | (c3 | (c0 << np.uint64(32)))
    o1 |= (c3 | (c0 << np.uint64(32))) | (c1 | (c2 << np.uint64(32)))
    return o0, o1


@njit(cache=True)
def rmax_half_words(x, out):
    """Half-layout rmax; input parity p yields output parity 1-p."""
    for i in range(x.shape[0]):
        o0, o1 = _rmax_half2(x[i, 0], x[i, 1])
        out[i, 0] = o0
        out[i, 1] = o1


# ---------------------------------------------------------------------------
# Raw board enumeration per slice

_CELL_BLACK = np.zeros(36, dtype=np.uint64)
_CELL_WHITE = np.zeros(36, dtype=np.uint64)
for _i, (_x, _y) in enumerate(B.CELLS):
    _q = B.cell_quadrant(_x, _y)
    _CELL_BLACK[_i] = np.uint64(int(B.POW3[B.cell_local(_x, _y)]) << (16 * _q))
    _CELL_WHITE[_i] = np.uint64(2 * int(B.POW3[B.cell_local(_x, _y)]) << (16 * _q))


@njit(cache=True)
def _enum_keys(n, nb, out):
    idx = 0
    c = np.empty(n, np.int64)
    for t in range(n):
        c[t] = t
    p = np.empty(max(nb, 1), np.int64)
    while True:
        base = U64_0
        for t in range(n):
            base += _CELL_WHITE[c[t]]
        for t in range(nb):
            p[t] = t
        while True:
            key = base
            for t in range(nb):
                key += _CELL_BLACK[c[p[t]]] - _CELL_WHITE[c[p[t]]]
            out[idx] = key
            idx += 1
            # next black-position combination
            t = nb - 1
            while t >= 0 and p[t] == n - nb + t:
                t -= 1
            if t < 0:
                break
            p[t] += 1
            for u in range(t + 1, nb):
                p[u] = p[u - 1] + 1
        # next cell combination
        t = n - 1
        while t >= 0 and c[t] == 36 - n + t:
            t -= 1
        if t < 0:
            break
        c[t] += 1
        for u in range(t + 1, n):
            c[u] = c[u - 1] + 1
    return idx


def enumerate_slice_keys(n: int) -> np.ndarray:
    """All packed keys with n stones and valid color counts, sorted."""
    from math import comb

    if n == 0:
        return np.zeros(1, dtype=np.uint64)
    nb = (n + 1) // 2
    total = comb(36, n) * comb(n, nb)
    out = np.empty(total, dtype=np.uint64)
    count = _enum_keys(n, nb, out)
    assert count == total
    out.sort()
    return out
