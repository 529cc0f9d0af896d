"""Sections, rotation-minimal quadrant dictionaries, blocks, and block lines.

A *section* classifies boards by the per-quadrant (black, white) stone
counts; only sections lexicographically minimal under the dihedral
quadrant permutations are stored.  Within a section each quadrant ranges
over the states that are minimal in their 4-rotation orbit, making the
section a 4-D array of 256-rotation supers, tiled into blocks of 8 per
axis.

Dictionary ordering: states whose reflected orbit differs are laid out
in adjacent pairs {2k, 2k+1} (pairs sorted by their smaller code);
self-paired states follow, sorted by code.  Reflection therefore maps
every index into its own pair slot, so the 8-aligned block structure is
preserved by all 2048 symmetries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import NamedTuple, Optional

import numpy as np

from . import board as B
from . import symmetry as S

BLOCK = 8


class InvalidSection(ValueError):
    pass


class FullQuadrant(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


# ---------------------------------------------------------------------------
# Quadrant dictionaries


@dataclass(frozen=True)
class QuadDict:
    """Rotation-minimal quadrant states for one (black, white) count pair."""

    black: int
    white: int
    states: np.ndarray  # (dim,) uint16, dictionary order
    orbit_size: np.ndarray  # (dim,) int8
    partner: np.ndarray  # (dim,) int16: reflection partner index
    partner_rot: np.ndarray  # (dim,) int8: REFLECT(state[i]) = rot^t(state[partner[i]])

    @property
    def dim(self) -> int:
        return len(self.states)


def _build_dicts():
    codes = np.arange(B.NUM_CODES)
    is_min = codes == S.ORBIT_MIN.astype(np.int64)
    dicts: dict[tuple[int, int], QuadDict] = {}
    std_idx = np.full(B.NUM_CODES, -1, dtype=np.int16)
    std_rot = S.MIN_ROT.copy()
    for b in range(10):
        for w in range(10 - b):
            sel = is_min & (B.COUNT_BLACK == b) & (B.COUNT_WHITE == w)
            minima = codes[sel]
            partner_of = {int(c): int(S.ORBIT_MIN[B.REFLECT_CODE[c]]) for c in minima}
            paired = []
            selfp = []
            seen = set()
            for c in sorted(partner_of):
                if c in seen:
                    continue
                p = partner_of[c]
                if p == c:
                    selfp.append(c)
                else:
                    paired.append((c, p))
                    seen.add(p)
            order = []
            for c, p in sorted(paired):
                order.extend((c, p))
            order.extend(sorted(selfp))
            states = np.array(order, dtype=np.uint16)
            index = {int(c): i for i, c in enumerate(order)}
            partner = np.array(
                [index[partner_of[int(c)]] for c in order], dtype=np.int16
            )
            partner_rot = np.array(
                [S.MIN_ROT[B.REFLECT_CODE[c]] for c in order], dtype=np.int8
            )
            orbit = np.array(
                [len({int(B.ROTATE_CODE[k, c]) for k in range(4)}) for c in order],
                dtype=np.int8,
            )
            dicts[(b, w)] = QuadDict(b, w, states, orbit, partner, partner_rot)
            for i, c in enumerate(order):
                for k in range(4):
                    std_idx[B.ROTATE_CODE[k, c]] = i
    # std_rot[c] = m with rotate^m(c) == its orbit minimum == dict state
    return dicts, std_idx, std_rot


_DICTS, STD_IDX, STD_ROT = _build_dicts()


def quad_states(black: int, white: int) -> QuadDict:
    if black + white > 9 or black < 0 or white < 0:
        raise InvalidSection(f"impossible quadrant counts ({black},{white})")
    return _DICTS[(black, white)]


# ---------------------------------------------------------------------------
# Sections

CountPair = tuple[int, int]


class Section(NamedTuple):
    counts: tuple[CountPair, CountPair, CountPair, CountPair]

    @property
    def sum_black(self) -> int:
        return sum(c[0] for c in self.counts)

    @property
    def sum_white(self) -> int:
        return sum(c[1] for c in self.counts)

    @property
    def slice(self) -> int:
        return self.sum_black + self.sum_white

    def dims(self) -> tuple[int, int, int, int]:
        return tuple(quad_states(b, w).dim for b, w in self.counts)

    def block_dims(self) -> tuple[int, int, int, int]:
        return tuple((d + BLOCK - 1) // BLOCK for d in self.dims())

    def __str__(self) -> str:
        return "s" + "-".join(f"{b}{w}" for b, w in self.counts)


def section_of_board(board: B.Board) -> Section:
    return Section(
        tuple(
            (int(B.COUNT_BLACK[c]), int(B.COUNT_WHITE[c])) for c in B.unpack(board)
        )
    )


def check_section(s: Section) -> Section:
    for b, w in s.counts:
        if b < 0 or w < 0 or b + w > 9:
            raise InvalidSection(f"bad quadrant counts in {s}")
    if not 0 <= s.sum_black - s.sum_white <= 1:
        raise InvalidSection(f"color counts invalid in {s}")
    return s


def permute_section(d: int, s: Section) -> Section:
    out = [None] * 4
    for q in range(4):
        out[int(S.QPOS[d, q])] = s.counts[q]
    return Section(tuple(out))


def standardize_section(s: Section) -> tuple[Section, int]:
    """Minimal image under the 8 quadrant permutations, with the witness."""
    best, best_d = s, 0
    for d in range(1, 8):
        img = permute_section(d, s)
        if img.counts < best.counts:
            best, best_d = img, d
    return best, best_d


def child_section(s: Section, q: int, color: B.Color) -> tuple[Section, int]:
    """Section reached by placing `color` in quadrant q, standardized."""
    b, w = s.counts[q]
    if b + w >= 9:
        raise FullQuadrant(f"quadrant {q} of {s} is full")
    nb, nw = (b + 1, w) if color == B.Color.BLACK else (b, w + 1)
    counts = list(s.counts)
    counts[q] = (nb, nw)
    return standardize_section(check_section(Section(tuple(counts))))


@lru_cache(maxsize=64)
def sections_of_slice(n: int) -> tuple[Section, ...]:
    """All standardized sections with n stones, sorted by counts tuple."""
    if not 0 <= n <= 36:
        raise InvalidSection(f"slice out of range: {n}")
    nb, nw = (n + 1) // 2, n // 2
    out = []

    def rec(q, rb, rw, acc):
        if q == 4:
            if rb == 0 and rw == 0:
                s = Section(tuple(acc))
                if standardize_section(s)[0] == s:
                    out.append(s)
            return
        left = 3 - q  # remaining quadrants after this one
        for b in range(min(rb, 9) + 1):
            if rb - b > 9 * left:
                continue
            for w in range(min(rw, 9 - b) + 1):
                if rw - w > (9 - 0) * left:
                    continue
                rec(q + 1, rb - b, rw - w, acc + [(b, w)])

    rec(0, nb, nw, [])
    out.sort(key=lambda s: s.counts)
    return tuple(out)


# ---------------------------------------------------------------------------
# Boards <-> section indices


def board_at(s: Section, idx: tuple[int, int, int, int]) -> B.Board:
    codes = []
    for q in range(4):
        qd = quad_states(*s.counts[q])
        if not 0 <= idx[q] < qd.dim:
            raise IndexOutOfRange(f"index {idx} outside dims {s.dims()} of {s}")
        codes.append(int(qd.states[idx[q]]))
    return B.pack(codes)


class Located(NamedTuple):
    section: Section
    index: tuple[int, int, int, int]
    elem: S.GroupElem  # transform_board(elem, board) == board_at(section, index)


def locate(board: B.Board) -> Located:
    """Standardize a board into (section, 4-D index, witness element).

    Among global images the minimal section wins; ties break on the
    smallest index tuple (content-aware, hence orbit-stable), then the
    smallest element index.
    """
    raw = section_of_board(board)
    check_section(raw)
    best = None
    for d in range(8):
        sec = permute_section(d, raw)
        gb = S.transform_global(d, board)
        idx = tuple(int(STD_IDX[B.quadrant_code(gb, q)]) for q in range(4))
        key = (sec.counts, idx, d)
        if best is None or key < best:
            best = key
            best_gb = gb
    counts, idx, d = best
    l = 0
    for q in range(4):
        l |= int(STD_ROT[B.quadrant_code(best_gb, q)]) << (2 * q)
    return Located(Section(counts), idx, S.GroupElem(l, d))


def locate_bulk(keys: np.ndarray):
    """Vectorized locate over packed keys.

    Returns (section_key, index, bit): per board the one-byte-per-quadrant
    packed counts of its kept section (quadrant 0 most significant, so
    integer order is the section total order), the 4-D index (uint8 per
    dim), and the rotation bit at which the board's value sits inside the
    super stored for that slot.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    n = len(keys)
    codes = np.empty((8, n, 4), dtype=np.int64)
    seckey = np.empty((8, n), dtype=np.uint32)
    idxkey = np.empty((8, n), dtype=np.uint64)
    for d in range(8):
        img = np.zeros((n, 4), dtype=np.int64)
        for q in range(4):
            c = ((keys >> np.uint64(16 * q)) & np.uint64(0xFFFF)).astype(np.int64)
            img[:, int(S.QPOS[d, q])] = S.CONTENT[d][c]
        codes[d] = img
        sk = np.zeros(n, dtype=np.uint32)
        ik = np.zeros(n, dtype=np.uint64)
        for q in range(4):
            pair = (B.COUNT_BLACK[img[:, q]].astype(np.uint32) << 4) | B.COUNT_WHITE[
                img[:, q]
            ].astype(np.uint32)
            sk |= pair << np.uint32(8 * (3 - q))
            ik |= STD_IDX[img[:, q]].astype(np.uint64) << np.uint64(16 * (3 - q))
        seckey[d] = sk
        idxkey[d] = ik
    best_sec = seckey.min(axis=0)
    big = np.uint64(0xFFFFFFFFFFFFFFFF)
    masked = np.where(seckey == best_sec[None, :], idxkey, big)
    best_idx = masked.min(axis=0)
    chosen = np.full(n, -1, dtype=np.int8)
    for d in range(7, -1, -1):
        chosen[(seckey[d] == best_sec) & (idxkey[d] == best_idx)] = d
    rows = chosen.astype(np.int64)
    sel = codes[rows, np.arange(n)]
    index = STD_IDX[sel].astype(np.uint16)
    # bit of the original board: negate the standardizing local rotation
    bit = np.zeros(n, dtype=np.int16)
    for q in range(4):
        m = STD_ROT[sel[:, q]].astype(np.int16)
        bit |= ((4 - m) & 3) << np.int16(2 * q)
    return best_sec, index, bit


def locate_bulk_images(keys: np.ndarray):
    """All kept-section slots touched by each board's symmetry images.

    Returns (section_key (n,) uint32, match (8, n) bool, index (8, n, 4)
    uint16): for each global element d with match[d, i], the image of
    board i under d lies in the kept section and occupies index[d, i].
    Data layout places a board once per such slot, so restricted-domain
    computations must cover them all, not just the canonical one.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    n = len(keys)
    seckey = np.empty((8, n), dtype=np.uint32)
    index = np.empty((8, n, 4), dtype=np.uint16)
    for d in range(8):
        img = np.zeros((n, 4), dtype=np.int64)
        for q in range(4):
            c = ((keys >> np.uint64(16 * q)) & np.uint64(0xFFFF)).astype(np.int64)
            img[:, int(S.QPOS[d, q])] = S.CONTENT[d][c]
        sk = np.zeros(n, dtype=np.uint32)
        for q in range(4):
            pair = (B.COUNT_BLACK[img[:, q]].astype(np.uint32) << 4) | B.COUNT_WHITE[
                img[:, q]
            ].astype(np.uint32)
            sk |= pair << np.uint32(8 * (3 - q))
            index[d, :, q] = STD_IDX[img[:, q]].astype(np.uint16)
        seckey[d] = sk
    best = seckey.min(axis=0)
    return best, seckey == best[None, :], index


def section_from_key(k: int) -> Section:
    return Section(
        tuple(((k >> (8 * (3 - q) + 4)) & 0xF, (k >> (8 * (3 - q))) & 0xF) for q in range(4))
    )


def section_to_key(s: Section) -> int:
    k = 0
    for q, (b, w) in enumerate(s.counts):
        k |= ((b << 4) | w) << (8 * (3 - q))
    return k


def supervalue_bit(located: Located) -> int:
    """Rotation bit of the original board inside its super at `located`.

    If f encodes l -> value(l . board_at(section, index)), then the value
    of the original board is f at this bit (whole-board symmetries do not
    change values).
    """
    return S.local_neg(located.elem.local)


# ---------------------------------------------------------------------------
# Whole-universe metadata (vectorized over every valid section)


@lru_cache(maxsize=1)
def _section_table():
    """Arrays over all valid sections of all slices.

    Returns dict with: counts (N,4,2) int8, slice (N,), kept (N,) bool,
    dims (N,4) int64, bdims (N,4), blocks (N,), lines (N,), supers (N,).
    """
    pairs = [(b, w) for b in range(10) for w in range(10 - b)]
    P = np.array(pairs, dtype=np.int64)
    idx = np.arange(len(pairs))
    g = np.stack(np.meshgrid(idx, idx, idx, idx, indexing="ij"), axis=-1).reshape(-1, 4)
    Bc = P[g, 0]
    Wc = P[g, 1]
    sb, sw = Bc.sum(1), Wc.sum(1)
    valid = (sb - sw >= 0) & (sb - sw <= 1)
    g, Bc, Wc = g[valid], Bc[valid], Wc[valid]
    n = Bc.sum(1) + Wc.sum(1)
    qk = (Bc * 16 + Wc).astype(np.uint64)

    def packkey(a):
        return (
            (a[:, 0] << np.uint64(48))
            | (a[:, 1] << np.uint64(32))
            | (a[:, 2] << np.uint64(16))
            | a[:, 3]
        )

    key = packkey(qk)
    minkey = key.copy()
    for d in range(1, 8):
        inv = np.zeros(4, dtype=np.int64)
        for q in range(4):
            inv[int(S.QPOS[d, q])] = q
        np.minimum(minkey, packkey(qk[:, inv]), out=minkey)
    kept = key == minkey

    dimtab = np.array([quad_states(b, w).dim for b, w in pairs], dtype=np.int64)
    dims = dimtab[g]
    bdims = (dims + BLOCK - 1) // BLOCK
    blocks = bdims.prod(1)
    lines = np.zeros(len(g), dtype=np.int64)
    for d in range(4):
        lines += np.prod(np.delete(bdims, d, axis=1), axis=1)
    supers = dims.prod(1)
    counts = np.stack([Bc, Wc], axis=-1).astype(np.int8)
    return {
        "counts": counts,
        "slice": n,
        "kept": kept,
        "dims": dims,
        "bdims": bdims,
        "blocks": blocks,
        "lines": lines,
        "supers": supers,
    }


class LayoutTotals(NamedTuple):
    blocks: int
    lines: int
    supers: int
    max_sections: int
    max_sections_slice: int


def layout_totals() -> LayoutTotals:
    """Exact whole-game totals over kept sections of slices 0..36."""
    t = _section_table()
    kept = t["kept"]
    per_slice = np.bincount(t["slice"][kept], minlength=37)
    mx = int(per_slice.max())
    return LayoutTotals(
        blocks=int(t["blocks"][kept].sum()),
        lines=int(t["lines"][kept].sum()),
        supers=int(t["supers"][kept].sum()),
        max_sections=mx,
        max_sections_slice=int(per_slice.argmax()),
    )


def per_slice_stats() -> list[dict]:
    t = _section_table()
    out = []
    for n in range(37):
        m = (t["slice"] == n) & t["kept"]
        out.append(
            {
                "slice": n,
                "sections": int(m.sum()),
                "blocks": int(t["blocks"][m].sum()),
                "lines": int(t["lines"][m].sum()),
                "supers": int(t["supers"][m].sum()),
            }
        )
    return out


def all_section_supers(kept_only: bool) -> int:
    t = _section_table()
    m = t["kept"] if kept_only else np.ones(len(t["kept"]), bool)
    return int(t["supers"][m].sum())


def section_raw_boards(s: Section) -> int:
    """Number of raw boards in the section (no rotation reduction)."""
    out = 1
    for b, w in s.counts:
        out *= comb(9, b) * comb(9 - b, w)
    return out


# ---------------------------------------------------------------------------
# Blocks and block lines


class BlockId(NamedTuple):
    section: Section
    coords: tuple[int, int, int, int]


class LineId(NamedTuple):
    section: Section
    dim: int
    coords: tuple[int, int, int]  # block coords of the other three dims, in dim order


def block_extent(s: Section, coords) -> tuple[int, int, int, int]:
    dims = s.dims()
    return tuple(min(BLOCK, dims[q] - BLOCK * coords[q]) for q in range(4))


def blocks_of_section(s: Section):
    bd = s.block_dims()
    for i in range(bd[0]):
        for j in range(bd[1]):
            for k in range(bd[2]):
                for l in range(bd[3]):
                    yield BlockId(s, (i, j, k, l))


def lines_of_section(s: Section):
    bd = s.block_dims()
    for d in range(4):
        others = [bd[q] for q in range(4) if q != d]
        for a in range(others[0]):
            for b in range(others[1]):
                for c in range(others[2]):
                    yield LineId(s, d, (a, b, c))


def blocks_of_line(line: LineId):
    s, d, fixed = line
    bd = s.block_dims()
    for a in range(bd[d]):
        coords = list(fixed)
        coords.insert(d, a)
        yield BlockId(s, tuple(coords))


def lines_of_block(block: BlockId) -> list[LineId]:
    out = []
    for d in range(4):
        fixed = tuple(c for q, c in enumerate(block.coords) if q != d)
        out.append(LineId(block.section, d, fixed))
    return out


@lru_cache(maxsize=40)
def slice_line_index(n: int):
    """Per-slice canonical line ordering: prefix sums per (section, dim)."""
    secs = sections_of_slice(n)
    counts = []
    for s in secs:
        bd = s.block_dims()
        for d in range(4):
            c = 1
            for q in range(4):
                if q != d:
                    c *= bd[q]
            counts.append(c)
    counts = np.array(counts, dtype=np.int64).reshape(len(secs), 4)
    prefix = np.concatenate([[0], counts.reshape(-1).cumsum()])
    return secs, counts, prefix


def line_count(n: int) -> int:
    _, _, prefix = slice_line_index(n)
    return int(prefix[-1])


def line_from_ordinal(n: int, k: int) -> LineId:
    secs, counts, prefix = slice_line_index(n)
    if not 0 <= k < prefix[-1]:
        raise IndexOutOfRange(f"line ordinal {k} outside slice {n}")
    cell = int(np.searchsorted(prefix, k, "right")) - 1
    si, d = divmod(cell, 4)
    s = secs[si]
    bd = s.block_dims()
    others = [bd[q] for q in range(4) if q != d]
    rem = k - int(prefix[cell])
    c = rem // (others[1] * others[2])
    rem -= c * others[1] * others[2]
    return LineId(s, d, (c, rem // others[2], rem % others[2]))


@lru_cache(maxsize=40)
def section_ordinals(n: int) -> dict[Section, int]:
    return {s: i for i, s in enumerate(sections_of_slice(n))}


def ordinal_from_line(line: LineId) -> int:
    n = line.section.slice
    secs, counts, prefix = slice_line_index(n)
    si = section_ordinals(n)[line.section]
    bd = line.section.block_dims()
    others = [bd[q] for q in range(4) if q != line.dim]
    a, b, c = line.coords
    return int(prefix[si * 4 + line.dim]) + (a * others[1] + b) * others[2] + c


@lru_cache(maxsize=40)
def slice_block_index(n: int):
    secs = sections_of_slice(n)
    counts = np.array([int(np.prod(s.block_dims())) for s in secs], dtype=np.int64)
    prefix = np.concatenate([[0], counts.cumsum()])
    return secs, counts, prefix


def block_count(n: int) -> int:
    return int(slice_block_index(n)[2][-1])


def ordinal_from_block(block: BlockId) -> int:
    n = block.section.slice
    secs, _, prefix = slice_block_index(n)
    si = section_ordinals(n)[block.section]
    bd = block.section.block_dims()
    i, j, k, l = block.coords
    return int(prefix[si]) + ((i * bd[1] + j) * bd[2] + k) * bd[3] + l


def block_from_ordinal(n: int, k: int) -> BlockId:
    secs, _, prefix = slice_block_index(n)
    if not 0 <= k < prefix[-1]:
        raise IndexOutOfRange(f"block ordinal {k} outside slice {n}")
    si = int(np.searchsorted(prefix, k, "right")) - 1
    s = secs[si]
    bd = s.block_dims()
    rem = k - int(prefix[si])
    i, rem = divmod(rem, bd[1] * bd[2] * bd[3])
    j, rem = divmod(rem, bd[2] * bd[3])
    kk, l = divmod(rem, bd[3])
    return BlockId(s, (i, j, kk, l))
