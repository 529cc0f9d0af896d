"""Slice-by-slice retrograde solver with asynchronous gather/compute/scatter.

One coordinator and N worker threads communicate only via messages.
Lines of the slice being computed are dealt to ranks by the partition
module (ranks may exceed workers; worker w serves ranks r with
r % workers == w).  A worker requests the child blocks of a line from
their owners, computes the line once all inputs arrive, scatters the
output blocks to their owners for OR-merging, and reports the line
done.  A barrier separates slices: after it the slice is complete,
compressed, and immutable, and the input slice is released (at most two
slices stay resident unless keep_all is set).

Values are stored adjudicated: at rotations where a position has five
in a row (either color) or the board is full, the stored value is the
static game result, so a child's contribution is always
``immediate-win OR rmax(negate(stored child))``.
"""

from __future__ import annotations

import queue
import threading
import time
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Optional

import numpy as np

from . import _kernels as K
from . import board as B
from . import layout as L
from . import partition as P
from . import prng
from . import storage as ST
from . import supers as SU
from . import symmetry as S
from .board import Color

_TAG_BOUNDARY = 0x426E6479
_TAG_SAMPLES = 0x53616D70


class EngineError(RuntimeError):
    pass


class MissingInput(EngineError):
    pass


class DimensionMismatch(EngineError):
    pass


class ShapeMismatch(EngineError):
    pass


class DuplicateContribution(EngineError):
    pass


class OutOfMemory(EngineError):
    pass


class SolveRefused(EngineError):
    pass


class EngineDeadlock(EngineError):
    pass


# ---------------------------------------------------------------------------
# Boundary specifications


@dataclass(frozen=True)
class BoundarySpec:
    mode: str  # "terminal" | "random"
    slice: int = 36
    seed: bytes = prng.DEFAULT_SEED

    def __post_init__(self):
        if self.mode not in ("terminal", "random"):
            raise ValueError(f"unknown boundary mode {self.mode}")
        if self.mode == "terminal" and self.slice != 36:
            raise ValueError("terminal adjudication is only valid at slice 36")


class InjectedBoundary:
    """Deterministic pseudorandom slice values, uniform over {-1,0,+1}
    per rotation, identical for every participant holding the seed."""

    def __init__(self, seed: bytes, slice_n: int, domain: Optional[dict] = None):
        if slice_n > 6:
            raise SolveRefused(f"slice {slice_n} boundary is not materializable at desk scale")
        self.slice = slice_n
        self.seed = prng.check_seed(seed)
        self._key = prng.derive_key(seed, _TAG_BOUNDARY, slice_n)
        self._sections: dict[L.Section, np.ndarray] = {}
        self._prefix: dict[L.Section, int] = {}
        base = 0
        for s in L.sections_of_slice(slice_n):
            self._prefix[s] = base
            base += int(np.prod(s.dims()))
        self.total_supers = base
        self._domain = domain  # optional {Section: sorted flat indices}

    def _gen(self, start: int, count: int) -> np.ndarray:
        """Supers for global flat ordinals [start, start+count): (count, 8)."""
        trits = prng.uniform_trits(self._key, start * 256, count * 256).reshape(count, 4, 64)
        shifts = np.arange(64, dtype=np.uint64)
        win = ((trits == 2).astype(np.uint64) << shifts).sum(axis=2, dtype=np.uint64)
        notloss = ((trits >= 1).astype(np.uint64) << shifts).sum(axis=2, dtype=np.uint64)
        return np.concatenate([win, notloss], axis=1)

    def section_supers(self, s: L.Section, flat: Optional[np.ndarray] = None) -> np.ndarray:
        """Supers of one section, all of it or at the given flat indices."""
        if flat is None:
            cached = self._sections.get(s)
            if cached is None:
                cached = self._gen(self._prefix[s], int(np.prod(s.dims())))
                self._sections[s] = cached
            return cached
        base = self._prefix[s]
        out = np.empty((len(flat), 8), dtype=np.uint64)
        for i, fi in enumerate(np.asarray(flat, dtype=np.int64)):
            out[i] = self._gen(base + int(fi), 1)[0]
        return out

    def value_of(self, board: B.Board) -> int:
        loc = L.locate(board)
        dims = loc.section.dims()
        flat = 0
        for q in range(4):
            flat = flat * dims[q] + loc.index[q]
        row = self.section_supers(loc.section)[flat]
        bit = L.supervalue_bit(loc)
        word, off = bit >> 6, bit & 63
        if (int(row[word]) >> off) & 1:
            return 1
        return 0 if (int(row[4 + word]) >> off) & 1 else -1

    def values_for_keys(self, keys: np.ndarray) -> np.ndarray:
        seckeys, index, bits = L.locate_bulk(keys)
        out = np.zeros(len(keys), dtype=np.int8)
        order = np.argsort(seckeys, kind="stable")
        i = 0
        while i < len(order):
            j = i
            sk = seckeys[order[i]]
            while j < len(order) and seckeys[order[j]] == sk:
                j += 1
            sel = order[i:j]
            s = L.section_from_key(int(sk))
            dims = s.dims()
            flat = np.zeros(len(sel), dtype=np.int64)
            for q in range(4):
                flat = flat * dims[q] + index[sel, q]
            sup = self.section_supers(s)[flat]
            bit = bits[sel].astype(np.int64)
            word, off = bit >> 6, (bit & 63).astype(np.uint64)
            win = (sup[np.arange(len(sel)), word] >> off) & np.uint64(1)
            nl = (sup[np.arange(len(sel)), 4 + word] >> off) & np.uint64(1)
            out[sel] = np.where(win == 1, 1, np.where(nl == 1, 0, -1)).astype(np.int8)
            i = j
        return out


class StoredBoundary:
    """Boundary values read back from a written solution file."""

    def __init__(self, source):
        self.reader = source if isinstance(source, ST.SliceReader) else ST.SliceReader(source)
        self.slice = self.reader.slice
        self._cache: dict = {}

    def _row(self, loc: L.Located):
        coords = tuple(i // L.BLOCK for i in loc.index)
        key = (loc.section.counts, coords)
        data = self._cache.get(key)
        if data is None:
            data = self.reader.read_block(L.BlockId(loc.section, coords))
            self._cache[key] = data
        offsets, sup = data
        ext = L.block_extent(loc.section, coords)
        off = 0
        for a in range(4):
            off = off * ext[a] + (loc.index[a] - L.BLOCK * coords[a])
        if offsets is None:
            return sup[off]
        pos = int(np.searchsorted(offsets, off))
        if pos >= len(offsets) or int(offsets[pos]) != off:
            raise ST.BlockNotFound(f"super {loc.index} of {loc.section}")
        return sup[pos]

    def value_of(self, board: B.Board) -> int:
        loc = L.locate(board)
        if loc.section.slice != self.slice:
            raise ValueError(f"board has {loc.section.slice} stones, boundary is {self.slice}")
        row = self._row(loc)
        bit = L.supervalue_bit(loc)
        word, off = bit >> 6, bit & 63
        if (int(row[word]) >> off) & 1:
            return 1
        return 0 if (int(row[4 + word]) >> off) & 1 else -1

    def values_for_keys(self, keys: np.ndarray) -> np.ndarray:
        return np.array([self.value_of(int(k)) for k in keys], dtype=np.int8)


# ---------------------------------------------------------------------------
# Work messages

_msg_counter = [0]
_msg_lock = threading.Lock()


def _msg_id() -> int:
    with _msg_lock:
        _msg_counter[0] += 1
        return _msg_counter[0]


@dataclass(frozen=True)
class RequestInput:
    id: int
    block: L.BlockId
    reply_to: int  # worker index


@dataclass(frozen=True)
class InputData:
    id: int
    block: L.BlockId
    offsets: Optional[np.ndarray]
    supers: np.ndarray


@dataclass(frozen=True)
class OutputScatter:
    id: int
    block: L.BlockId
    offsets: Optional[np.ndarray]
    supers: np.ndarray


@dataclass(frozen=True)
class LineDone:
    id: int
    line: L.LineId


@dataclass(frozen=True)
class _Stop:
    pass


# ---------------------------------------------------------------------------
# Slice stores


class _Arena:
    """Bulk byte storage with barrier-scoped compaction."""

    def __init__(self):
        self._buf = bytearray()
        self._live: dict[int, tuple[int, int]] = {}
        self._next = 0
        self._dead_bytes = 0

    def alloc(self, data: bytes) -> int:
        handle = self._next
        self._next += 1
        self._live[handle] = (len(self._buf), len(data))
        self._buf.extend(data)
        return handle

    def get(self, handle: int) -> bytes:
        off, n = self._live[handle]
        return bytes(self._buf[off : off + n])

    def free(self, handle: int):
        _, n = self._live.pop(handle)
        self._dead_bytes += n

    def compact(self):
        if not self._dead_bytes:
            return
        buf = bytearray()
        for h, (off, n) in sorted(self._live.items()):
            self._live[h] = (len(buf), n)
            buf.extend(self._buf[off : off + n])
        self._buf = buf
        self._dead_bytes = 0

    @property
    def size(self) -> int:
        return len(self._buf)


@dataclass
class _BuildingBlock:
    expected: int
    merged: int
    offsets: Optional[np.ndarray]  # sparse in-block offsets, sorted
    data: np.ndarray  # (m, 8) uint64, OR-accumulated


@dataclass
class _FinalBlock:
    handle: int
    raw_len: int
    flags: int
    codec: int


class BlockStore:
    """Per-slice map BlockId -> compressed payload, complete after barrier."""

    def __init__(self, slice_n: int, codec: int = ST.CODEC_ZLIB):
        self.slice = slice_n
        self.codec = codec
        self.arena = _Arena()
        self.building: dict[L.BlockId, _BuildingBlock] = {}
        self.final: dict[L.BlockId, _FinalBlock] = {}
        self.raw_bytes = 0  # uncompressed bytes currently buffered

    def ensure_building(self, block: L.BlockId, expected: int, offsets):
        bb = self.building.get(block)
        if bb is None:
            m = len(offsets) if offsets is not None else int(
                np.prod(L.block_extent(block.section, block.coords))
            )
            bb = _BuildingBlock(
                expected, 0, offsets, np.zeros((m, 8), dtype=np.uint64)
            )
            self.building[block] = bb
            self.raw_bytes += bb.data.nbytes
        return bb

    def merge(self, block: L.BlockId, offsets, supers: np.ndarray, expected: int):
        if block in self.final:
            raise DuplicateContribution(f"block {block} already complete")
        bb = self.ensure_building(block, expected, offsets)
        if bb.data.shape != supers.shape:
            raise ShapeMismatch(f"block {block}: {supers.shape} != {bb.data.shape}")
        if (bb.offsets is None) != (offsets is None) or (
            bb.offsets is not None and not np.array_equal(bb.offsets, offsets)
        ):
            raise ShapeMismatch(f"block {block}: sparse domain mismatch")
        np.bitwise_or(bb.data, supers, out=bb.data)
        bb.merged += 1
        if bb.merged == bb.expected:
            self._finalize(block, bb)

    def _finalize(self, block: L.BlockId, bb: _BuildingBlock):
        flags, raw = ST.encode_block_payload(bb.offsets, bb.data)
        comp = ST.encode_payload(self.codec, raw)
        self.final[block] = _FinalBlock(self.arena.alloc(comp), len(raw), flags, self.codec)
        self.raw_bytes -= bb.data.nbytes
        del self.building[block]

    def add_final(self, block: L.BlockId, offsets, supers: np.ndarray):
        flags, raw = ST.encode_block_payload(offsets, supers)
        comp = ST.encode_payload(self.codec, raw)
        self.final[block] = _FinalBlock(self.arena.alloc(comp), len(raw), flags, self.codec)

    def is_readable(self, block: L.BlockId) -> bool:
        return block in self.final

    def read(self, block: L.BlockId):
        fb = self.final.get(block)
        if fb is None:
            if block in self.building:
                raise MissingInput(f"block {block} is not complete yet")
            raise ST.BlockNotFound(f"{block}")
        raw = ST.decode_payload(fb.codec, self.arena.get(fb.handle), fb.raw_len)
        return ST.decode_block_payload(raw, fb.flags)

    def compact(self):
        self.arena.compact()

    @property
    def bytes_used(self) -> int:
        return self.arena.size + self.raw_bytes


# ---------------------------------------------------------------------------
# Line computation


@dataclass
class LinePlan:
    line: L.LineId
    mover: Color
    child_section: L.Section
    child_glob: int  # D4 element standardizing the raw child section
    child_dim: int  # axis of the child section fed by this line
    child_blocks: list[L.BlockId]
    parent_rows: dict[tuple, np.ndarray]  # block along q -> flat in-extent offsets
    domain36: bool  # children are full boards synthesized inline


def _child_axis_of(parent_axis: int, d: int) -> int:
    return int(S.QPOS[d, parent_axis])


def plan_line(
    line: L.LineId, slice_domain: Optional[dict] = None, child_domain: Optional[dict] = None
) -> Optional[LinePlan]:
    """Work out the child line and parent coverage; None if nothing to do."""
    s, q, fixed = line
    n = s.slice
    mover = Color.BLACK if n % 2 == 0 else Color.WHITE
    b, w = s.counts[q]
    if b + w >= 9:
        return None  # full quadrant: no children along this dimension
    cs, d = L.child_section(s, q, mover)
    dims = s.dims()
    bd = s.block_dims()
    other_axes = [a for a in range(4) if a != q]
    # parent indices covered by this line, per block along q
    parent_rows: dict[tuple, np.ndarray] = {}
    extents = {}
    for bi, a_blk in enumerate(range(bd[q])):
        coords = list(fixed)
        coords.insert(q, a_blk)
        coords = tuple(coords)
        ext = L.block_extent(s, coords)
        rows = None
        if slice_domain is not None:
            dom = slice_domain.get(s)
            if dom is None:
                continue
            rows = _domain_rows_in_block(dom, dims, coords)
            if rows is None or len(rows) == 0:
                continue
        parent_rows[coords] = rows  # None = dense full extent
    if slice_domain is not None and not parent_rows:
        return None
    # child line blocks: same block coords, mapped through the axis permutation
    cq = _child_axis_of(q, d)
    cbd = cs.block_dims()
    child_blocks = []
    domain36 = cs.slice == 36  # the final slice is synthesized, never stored
    if not domain36:
        cdom = child_domain.get(cs) if child_domain is not None else None
        for a in range(cbd[cq]):
            cc = [0, 0, 0, 0]
            cc[cq] = a
            for pa, coord in zip(other_axes, fixed):
                cc[_child_axis_of(pa, d)] = coord
            cc = tuple(cc)
            if cdom is not None and _domain_rows_in_block(cdom, cs.dims(), cc) is None:
                continue  # no stored supers in this block of a sparse run
            child_blocks.append(L.BlockId(cs, cc))
    return LinePlan(line, mover, cs, d, cq, child_blocks, parent_rows, domain36)


def _domain_rows_in_block(dom: np.ndarray, dims, coords) -> Optional[np.ndarray]:
    """Flat in-extent offsets of domain members inside one block."""
    lo = [8 * c for c in coords]
    ext = [min(8, dims[a] - lo[a]) for a in range(4)]
    idx = _unflatten(dom, dims)
    m = np.ones(len(dom), dtype=bool)
    for a in range(4):
        m &= (idx[:, a] >= lo[a]) & (idx[:, a] < lo[a] + ext[a])
    if not m.any():
        return None
    sel = idx[m]
    off = np.zeros(m.sum(), dtype=np.int64)
    for a in range(4):
        off = off * ext[a] + (sel[:, a] - lo[a])
    return np.sort(off)


def _unflatten(flat: np.ndarray, dims) -> np.ndarray:
    out = np.empty((len(flat), 4), dtype=np.int64)
    rem = np.asarray(flat, dtype=np.int64).copy()
    for a in range(3, -1, -1):
        out[:, a] = rem % dims[a]
        rem //= dims[a]
    return out


def _flatten_idx(idx4, dims) -> int:
    f = 0
    for a in range(4):
        f = f * dims[a] + idx4[a]
    return f


def compute_line(
    plan: LinePlan,
    child_data: Callable[[L.BlockId], tuple],
) -> dict[tuple, tuple[Optional[np.ndarray], np.ndarray]]:
    """Compute one parent line's contribution from its child line.

    `child_data(block)` returns (offsets, supers) for each planned child
    block.  Returns {parent block coords: (offsets, contribution supers)}.
    Stored child values are already adjudicated, so each placement
    contributes `wins(mover) OR rmax(negate(child))`; the parent's own
    static adjudication is folded in before returning (identical in
    every line's contribution, so merging stays a plain OR).
    """
    s, q, fixed = plan.line
    mover = plan.mover
    dims = s.dims()
    d = plan.child_glob
    dinv = int(S.GLOBAL_INV[d])
    cq = plan.child_dim
    cs = plan.child_section
    cdims = cs.dims()
    content = S.CONTENT[d]
    other_axes = [a for a in range(4) if a != q]

    # child supers lookup: flat child index -> (win int, notloss int),
    # already permuted by the section-standardizing global element so
    # only a per-read cyclic translation remains
    child_lookup: dict[int, tuple[int, int]] = {}
    if not plan.domain36:
        for cb in plan.child_blocks:
            offsets, sup = child_data(cb)
            if sup.shape[0]:
                sup = SU.permute_super_rows(sup, d)
            cext = L.block_extent(cs, cb.coords)
            lo = [8 * c for c in cb.coords]
            if offsets is None:
                offsets = np.arange(int(np.prod(cext)), dtype=np.int64)
            for off, row in zip(np.asarray(offsets, dtype=np.int64), sup):
                i4 = []
                rem = int(off)
                for a in range(3, -1, -1):
                    i4.append(lo[a] + rem % cext[a])
                    rem //= cext[a]
                i4.reverse()
                child_lookup[_flatten_idx(i4, cdims)] = (
                    SU.from_words(row[:4]),
                    SU.from_words(row[4:]),
                )

    # per-axis index maps for the unplaced quadrants
    axis_map = {}
    for a in other_axes:
        qd = L.quad_states(*s.counts[a])
        codes = np.asarray(content[qd.states.astype(np.int64)], dtype=np.int64)
        axis_map[a] = (L.STD_IDX[codes].astype(np.int64), L.STD_ROT[codes].astype(np.int64))

    parent_dict = L.quad_states(*s.counts[q])
    dict_digits = B.DIGITS[parent_dict.states.astype(np.int64)]  # (dim_q, 9)

    # placements: for each parent state along q, each empty local cell
    placed_maps = []
    mover_digit = int(mover)
    for a in range(dims[q]):
        code = int(parent_dict.states[a])
        outs = []
        for e in range(9):
            if dict_digits[a, e] != 0:
                continue
            placed_code = code + mover_digit * int(B.POW3[e])
            tc = int(content[placed_code])
            outs.append((e, int(L.STD_IDX[tc]), int(L.STD_ROT[tc]), placed_code))
        placed_maps.append(outs)

    out: dict[tuple, tuple[Optional[np.ndarray], np.ndarray]] = {}
    for coords, rows in plan.parent_rows.items():
        ext = L.block_extent(s, coords)
        lo = [8 * c for c in coords]
        if rows is None:
            rows = np.arange(int(np.prod(ext)), dtype=np.int64)
            offsets_out = None
        else:
            offsets_out = rows
        data = np.zeros((len(rows), 8), dtype=np.uint64)
        for ri, off in enumerate(np.asarray(rows, dtype=np.int64)):
            i4 = []
            rem = int(off)
            for a in range(3, -1, -1):
                i4.append(lo[a] + rem % ext[a])
                rem //= ext[a]
            i4.reverse()
            pw = pn = 0
            parent_codes = [0, 0, 0, 0]
            parent_codes[q] = int(parent_dict.states[i4[q]])
            lm_other = 0
            cidx_other = [0, 0, 0, 0]
            for a in other_axes:
                qd = L.quad_states(*s.counts[a])
                parent_codes[a] = int(qd.states[i4[a]])
                ca = _child_axis_of(a, d)
                cidx_other[ca] = int(axis_map[a][0][i4[a]])
                lm_other |= int(axis_map[a][1][i4[a]]) << (2 * ca)
            for e, cidx, crot, placed_code in placed_maps[i4[q]]:
                child_codes = list(parent_codes)
                child_codes[q] = placed_code
                child_board = B.pack(child_codes)
                wins = SU.super_wins(child_board, mover)
                if plan.domain36:
                    sv = _terminal_supervalue(child_board, mover.other)
                    cw, cn = sv.win, sv.notloss
                else:
                    ci4 = list(cidx_other)
                    ci4[cq] = cidx
                    hit = child_lookup.get(_flatten_idx(ci4, cdims))
                    if hit is None:
                        raise MissingInput(
                            f"child super {tuple(ci4)} of {cs} absent for line {plan.line}"
                        )
                    lm = lm_other | (crot << (2 * cq))
                    t = S.conjugate_local(dinv, lm)
                    cw = SU.translate_super(hit[0], t)
                    cn = SU.translate_super(hit[1], t)
                # negate and take the rotation max
                pw |= wins | SU.rmax(~cn & SU.MASK256)
                pn |= wins | SU.rmax(~cw & SU.MASK256)
            # parent static adjudication
            parent_board = B.pack(parent_codes)
            wc = SU.super_wins(parent_board, mover)
            wo = SU.super_wins(parent_board, mover.other)
            t = wc | wo
            static_w = wc & ~wo
            static_n = wc | (SU.MASK256 ^ wo)
            fw = ((t & static_w) | (~t & pw)) & SU.MASK256
            fn = ((t & static_n) | (~t & pn)) & SU.MASK256
            data[ri, :4] = SU.to_words(fw)
            data[ri, 4:] = SU.to_words(fn)
        out[coords] = (offsets_out, data)
    return out


def _terminal_supervalue(board: B.Board, mover: Color) -> SU.SuperValue:
    """Static 36-stone adjudication for all rotations, mover to move."""
    wc = SU.super_wins(board, mover)
    wo = SU.super_wins(board, mover.other)
    win = wc & ~wo & SU.MASK256
    notloss = (wc | ~wo) & SU.MASK256
    return SU.SuperValue(win, notloss)


# ---------------------------------------------------------------------------
# Coordinator and workers


@dataclass
class SolveConfig:
    workers: int = 1
    ranks: Optional[int] = None  # defaults to workers; may exceed them
    seed: bytes = prng.DEFAULT_SEED
    codec: int = ST.CODEC_ZLIB
    inflight: int = 5  # lines with outstanding input requests, per worker
    keep_all: bool = False
    samples: int = 256
    max_bytes: int = 3 << 30
    timeout: float = 120.0

    def effective_ranks(self) -> int:
        return self.ranks if self.ranks is not None else self.workers


@dataclass(frozen=True)
class _StartSlice:
    slice: int
    plans: tuple


class _Worker(threading.Thread):
    def __init__(self, idx: int, eng: "_Engine"):
        super().__init__(name=f"pentago-worker-{idx}", daemon=True)
        self.idx = idx
        self.eng = eng
        self.inbox: queue.Queue = queue.Queue()
        self.shards: dict[int, BlockStore] = {}  # slice -> owned blocks
        self.status = "idle"
        # per-slice state
        self._plans: list = []
        self._cursor = 0
        self._waiting: dict[int, tuple] = {}  # plan idx -> (plan, {block: data|None}, missing)
        self._want: dict[L.BlockId, list[int]] = {}

    # -- pipeline --

    def _start_slice(self, msg: _StartSlice):
        self.shards.setdefault(msg.slice, BlockStore(msg.slice, self.eng.cfg.codec))
        self._plans = list(msg.plans)
        self._cursor = 0
        self._waiting = {}
        self._want = {}
        self._pump()

    def _pump(self):
        while self._cursor < len(self._plans) and len(self._waiting) < self.eng.cfg.inflight:
            i = self._cursor
            self._cursor += 1
            plan = self._plans[i]
            needed = {}
            for cb in plan.child_blocks:
                needed[cb] = None
            if not needed:
                self._compute(plan)
                continue
            self._waiting[i] = (plan, needed, len(needed))
            for cb in needed:
                self._want.setdefault(cb, []).append(i)
                owner = self.eng.block_worker(cb)
                self.eng.send(
                    owner, RequestInput(_msg_id(), cb, self.idx), from_worker=self.idx
                )

    def _compute(self, plan: LinePlan, inputs: Optional[dict] = None):
        self.status = f"compute {plan.line}"
        child_data = (lambda cb: inputs[cb]) if inputs is not None else None
        out = compute_line(plan, child_data)
        for coords, (offsets, data) in out.items():
            block = L.BlockId(plan.line.section, coords)
            owner = self.eng.block_worker(block)
            self.eng.send(
                owner, OutputScatter(_msg_id(), block, offsets, data), from_worker=self.idx
            )
        self.eng.to_coordinator(LineDone(_msg_id(), plan.line))
        self.status = "idle"

    # -- message handling --

    def _handle(self, msg):
        if isinstance(msg, _StartSlice):
            self._start_slice(msg)
        elif isinstance(msg, RequestInput):
            shard = self.shards.get(msg.block.section.slice)
            if shard is None or not shard.is_readable(msg.block):
                raise MissingInput(f"worker {self.idx} asked for unavailable {msg.block}")
            offsets, sup = shard.read(msg.block)
            self.eng.send(
                msg.reply_to,
                InputData(_msg_id(), msg.block, offsets, sup),
                from_worker=self.idx,
            )
        elif isinstance(msg, InputData):
            for i in list(self._want.get(msg.block, ())):
                plan, needed, missing = self._waiting[i]
                if needed.get(msg.block) is None:
                    needed[msg.block] = (msg.offsets, msg.supers)
                    missing -= 1
                    self._waiting[i] = (plan, needed, missing)
                    if missing == 0:
                        del self._waiting[i]
                        self._compute(plan, needed)
            self._want.pop(msg.block, None)
            self._pump()
        elif isinstance(msg, OutputScatter):
            shard = self.shards.setdefault(
                msg.block.section.slice,
                BlockStore(msg.block.section.slice, self.eng.cfg.codec),
            )
            shard.merge(
                msg.block, msg.offsets, msg.supers, _expected_contributions(msg.block.section)
            )
        else:
            raise EngineError(f"unexpected message {msg!r}")

    def run(self):
        while True:
            try:
                msg = self.inbox.get(timeout=0.5)
            except queue.Empty:
                continue
            try:
                if isinstance(msg, _Stop):
                    return
                self._handle(msg)
            except BaseException as exc:  # propagate to the coordinator
                self.eng.to_coordinator(("error", self.idx, exc))
            finally:
                self.inbox.task_done()


def _expected_contributions(s: L.Section) -> int:
    return sum(1 for b, w in s.counts if b + w < 9)


class _Engine:
    def __init__(self, cfg: SolveConfig):
        self.cfg = cfg
        self.coordinator: queue.Queue = queue.Queue()
        self.workers = [_Worker(i, self) for i in range(cfg.workers)]
        self.high_water = 0

    def send(self, worker_idx: int, msg, from_worker=None):
        self.workers[worker_idx].inbox.put(msg)

    def to_coordinator(self, msg):
        self.coordinator.put(msg)

    def block_worker(self, block: L.BlockId) -> int:
        rank = P.block_owner(self.cfg.seed, block.section.slice, self.cfg.effective_ranks(), block)
        return rank % self.cfg.workers

    def line_worker(self, line: L.LineId) -> int:
        rank = P.line_owner(self.cfg.seed, line.section.slice, self.cfg.effective_ranks(), line)
        return rank % self.cfg.workers

    def note_memory(self):
        total = 0
        for w in self.workers:
            for st in w.shards.values():
                total += st.bytes_used
        self.high_water = max(self.high_water, total)

    def run_slice(self, n: int, plans: list[LinePlan]):
        assigned: list[list] = [[] for _ in self.workers]
        order = sorted(
            range(len(plans)),
            key=lambda i: (
                P.line_owner(self.cfg.seed, n, self.cfg.effective_ranks(), plans[i].line),
                L.ordinal_from_line(plans[i].line),
            ),
        )
        for i in order:
            assigned[self.line_worker(plans[i].line)].append(plans[i])
        for w, mine in zip(self.workers, assigned):
            w.inbox.put(_StartSlice(n, tuple(mine)))
        done = 0
        deadline_grace = self.cfg.timeout
        while done < len(plans):
            try:
                msg = self.coordinator.get(timeout=deadline_grace)
            except queue.Empty:
                states = {w.name: w.status for w in self.workers}
                raise EngineDeadlock(
                    f"no progress for {deadline_grace}s during slice {n}; worker states: {states}"
                ) from None
            if isinstance(msg, tuple) and msg and msg[0] == "error":
                raise msg[2]
            if isinstance(msg, LineDone):
                done += 1
        for w in self.workers:
            w.inbox.join()
        # drain any error reported during the final merges
        while not self.coordinator.empty():
            msg = self.coordinator.get_nowait()
            if isinstance(msg, tuple) and msg and msg[0] == "error":
                raise msg[2]
        self.note_memory()

    def stop(self):
        for w in self.workers:
            w.inbox.put(_Stop())
        for w in self.workers:
            w.join(timeout=10)


# ---------------------------------------------------------------------------
# Whole solves


class SolveResult:
    def __init__(self, cfg: SolveConfig, boundary: BoundarySpec):
        self.cfg = cfg
        self.boundary = boundary
        self.stores: dict[int, BlockStore] = {}
        self.domains: dict[int, Optional[dict]] = {}
        self.counts: list[dict] = []
        self.samples: dict[int, list[tuple[int, bytes]]] = {}
        self.high_water_bytes = 0
        self._section_cache: dict = {}

    # -- reading --

    def _section_array(self, slice_n: int, s: L.Section):
        key = (slice_n, s)
        arr = self._section_cache.get(key)
        if arr is None:
            store = self.stores[slice_n]
            dims = s.dims()
            dom = (self.domains.get(slice_n) or {}).get(s) if self.domains.get(slice_n) else None
            if self.domains.get(slice_n) is not None and dom is None:
                return None
            full = np.zeros((int(np.prod(dims)), 8), dtype=np.uint64)
            present = np.zeros(int(np.prod(dims)), dtype=bool)
            bd = s.block_dims()
            for coords in np.ndindex(*bd):
                block = L.BlockId(s, tuple(coords))
                if not store.is_readable(block):
                    continue
                offsets, sup = store.read(block)
                ext = L.block_extent(s, coords)
                lo = [8 * c for c in coords]
                if offsets is None:
                    offsets = np.arange(int(np.prod(ext)), dtype=np.int64)
                idx = _unflatten(offsets, ext)
                flat = np.zeros(len(offsets), dtype=np.int64)
                for a in range(4):
                    flat = flat * dims[a] + (lo[a] + idx[:, a])
                full[flat] = sup
                present[flat] = True
            arr = (full, present)
            self._section_cache[key] = arr
        return arr

    def value_of(self, board: B.Board) -> int:
        loc = L.locate(board)
        n = loc.section.slice
        if n not in self.stores:
            raise KeyError(f"slice {n} not retained")
        arr = self._section_array(n, loc.section)
        if arr is None:
            raise KeyError(f"section {loc.section} outside the solve domain")
        full, present = arr
        dims = loc.section.dims()
        flat = 0
        for a in range(4):
            flat = flat * dims[a] + loc.index[a]
        if not present[flat]:
            raise KeyError(f"super {loc.index} of {loc.section} not computed")
        bit = L.supervalue_bit(loc)
        word, off = bit >> 6, bit & 63
        if (int(full[flat, word]) >> off) & 1:
            return 1
        return 0 if (int(full[flat, 4 + word]) >> off) & 1 else -1

    def values_for_keys(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        seckeys, index, bits = L.locate_bulk(keys)
        out = np.zeros(len(keys), dtype=np.int8)
        order = np.argsort(seckeys, kind="stable")
        i = 0
        while i < len(order):
            j = i
            sk = seckeys[order[i]]
            while j < len(order) and seckeys[order[j]] == sk:
                j += 1
            sel = order[i:j]
            s = L.section_from_key(int(sk))
            full, present = self._section_array(int(s.slice), s)
            dims = s.dims()
            flat = np.zeros(len(sel), dtype=np.int64)
            for a in range(4):
                flat = flat * dims[a] + index[sel, a]
            if not present[flat].all():
                raise KeyError(f"uncomputed supers in {s}")
            sup = full[flat]
            bit = bits[sel].astype(np.int64)
            word, off = bit >> 6, (bit & 63).astype(np.uint64)
            rowsel = np.arange(len(sel))
            win = (sup[rowsel, word] >> off) & np.uint64(1)
            nl = (sup[rowsel, 4 + word] >> off) & np.uint64(1)
            out[sel] = np.where(win == 1, 1, np.where(nl == 1, 0, -1)).astype(np.int8)
            i = j
        return out

    # -- serialization --

    def _file_payload(self, slice_n: int):
        store = self.stores[slice_n]
        sections = sorted({b.section for b in store.final}, key=lambda s: s.counts)
        blocks = []
        for block in sorted(store.final, key=lambda b: (b.section.counts, b.coords)):
            fb = store.final[block]
            raw = ST.decode_payload(fb.codec, store.arena.get(fb.handle), fb.raw_len)
            blocks.append((block, fb.flags, raw))
        return sections, blocks

    def store_file_bytes(self, slice_n: int) -> bytes:
        sections, blocks = self._file_payload(slice_n)
        return ST.slice_file_bytes(slice_n, sections, blocks, self.cfg.codec)

    def write_store(self, directory) -> list[str]:
        import os

        os.makedirs(directory, exist_ok=True)
        written = []
        for n in sorted(self.stores):
            path = os.path.join(directory, f"slice-{n:02d}.spg")
            sections, blocks = self._file_payload(n)
            ST.write_slice(path, n, sections, blocks, self.cfg.codec)
            written.append(path)
        ST.write_counts(self.counts, os.path.join(directory, "counts.txt"))
        for n, recs in self.samples.items():
            ST.write_samples(recs, os.path.join(directory, f"samples-{n:02d}.bin"))
        return written


def estimate_slice_bytes(n: int, domain: Optional[dict] = None) -> int:
    if domain is not None:
        return 64 * sum(len(v) for v in domain.values())
    t = L._section_table()
    m = (t["slice"] == n) & t["kept"]
    return 64 * int(t["supers"][m].sum())


def _domain_for_slice(root: B.Board, n: int) -> dict:
    """Every kept-section slot holding any symmetry image of a supported
    board; the line computation can touch non-canonical twin slots, so
    the domain is closed over all images, not just locate()'s choice."""
    from . import midgame

    keys = midgame.supported_keys(root, n)
    seckeys, match, index = L.locate_bulk_images(keys)
    out: dict[L.Section, list] = {}
    for d in range(8):
        m = match[d]
        if not m.any():
            continue
        sks = seckeys[m]
        idx = index[d][m]
        order = np.argsort(sks, kind="stable")
        i = 0
        while i < len(order):
            j = i
            sk = sks[order[i]]
            while j < len(order) and sks[order[j]] == sk:
                j += 1
            s = L.section_from_key(int(sk))
            dims = s.dims()
            flat = np.zeros(j - i, dtype=np.int64)
            for a in range(4):
                flat = flat * dims[a] + idx[order[i:j], a]
            out.setdefault(s, []).append(flat)
            i = j
    return {s: np.unique(np.concatenate(parts)) for s, parts in out.items()}


def solve(
    from_slice: int,
    to_slice: int,
    boundary: BoundarySpec,
    config: Optional[SolveConfig] = None,
    domain_root: Optional[B.Board] = None,
) -> SolveResult:
    """Retrograde-solve slices from_slice-1 down to to_slice.

    The boundary supplies values at from_slice: terminal adjudication
    (only valid at 36) or injected pseudorandom values at a small slice.
    With `domain_root`, computation is restricted to positions reachable
    by filling that root's empty cells (closed under the recurrence).
    """
    cfg = config or SolveConfig()
    if not 0 <= to_slice < from_slice <= 36:
        raise ValueError(f"bad slice range {from_slice}..{to_slice}")
    if boundary.mode == "terminal" and from_slice != 36:
        raise ValueError("terminal boundary requires from_slice == 36")
    if boundary.mode == "random" and from_slice != boundary.slice:
        raise ValueError("random boundary must sit at from_slice")
    if domain_root is not None and B.count_stones(domain_root) > to_slice:
        raise ValueError("domain root has more stones than to_slice")

    domains: dict[int, Optional[dict]] = {}
    for n in range(to_slice, from_slice + 1):
        domains[n] = _domain_for_slice(domain_root, n) if domain_root is not None else None

    budget = 0
    for n in range(to_slice, from_slice + 1):
        here = estimate_slice_bytes(n, domains[n])
        nxt = estimate_slice_bytes(n + 1, domains.get(n + 1)) if n + 1 <= from_slice else 0
        budget = max(budget, 3 * (here + nxt))  # raw + compressed + transit
    if budget > cfg.max_bytes:
        raise SolveRefused(
            f"estimated working set ~{budget/2**30:.1f} GiB exceeds the budget"
            f" {cfg.max_bytes/2**30:.1f} GiB; slices 6..34 are not desk-feasible"
            " without a domain restriction"
        )

    result = SolveResult(cfg, boundary)
    result.domains = domains
    eng = _Engine(cfg)
    for w in eng.workers:
        w.start()
    try:
        # boundary slice data
        if boundary.mode == "random":
            injected = InjectedBoundary(boundary.seed, from_slice, domains[from_slice])
            _preload_injected(eng, injected, domains[from_slice])
        for n in range(from_slice - 1, to_slice - 1, -1):
            plans = _plan_slice(n, domains)
            eng.run_slice(n, plans)
            _barrier_collect(eng, result, n, cfg)
            # release the input slice: at most two slices stay resident
            if not cfg.keep_all:
                for w in eng.workers:
                    w.shards.pop(n + 1, None)
                result.stores.pop(n + 1, None)
                result._section_cache = {
                    k: v for k, v in result._section_cache.items() if k[0] != n + 1
                }
        result.high_water_bytes = eng.high_water
    finally:
        eng.stop()
    return result


def _plan_slice(n: int, domains) -> list[LinePlan]:
    plans = []
    slice_domain = domains.get(n)
    child_domain = domains.get(n + 1)
    for s in L.sections_of_slice(n):
        if slice_domain is not None and s not in slice_domain:
            continue
        for line in L.lines_of_section(s):
            plan = plan_line(line, slice_domain, child_domain)
            if plan is not None:
                plans.append(plan)
    return plans


def _preload_injected(eng: _Engine, injected: InjectedBoundary, domain):
    for s in L.sections_of_slice(injected.slice):
        dom = None
        if domain is not None:
            dom = domain.get(s)
            if dom is None:
                continue
        dims = s.dims()
        if dom is None:
            sup = injected.section_supers(s)
        else:
            sup = injected.section_supers(s, dom)
        for coords in np.ndindex(*s.block_dims()):
            block = L.BlockId(s, tuple(coords))
            ext = L.block_extent(s, coords)
            lo = [8 * c for c in coords]
            if dom is None:
                idx = _unflatten(np.arange(int(np.prod(ext)), dtype=np.int64), ext)
                flat = np.zeros(len(idx), dtype=np.int64)
                for a in range(4):
                    flat = flat * dims[a] + (lo[a] + idx[:, a])
                rows = sup[flat]
                offsets = None
            else:
                offs = _domain_rows_in_block(dom, dims, tuple(coords))
                if offs is None:
                    continue
                # map block offsets back to domain positions
                idx = _unflatten(offs, L.block_extent(s, coords))
                flat = np.zeros(len(offs), dtype=np.int64)
                for a in range(4):
                    flat = flat * dims[a] + (lo[a] + idx[:, a])
                pos = np.searchsorted(dom, flat)
                rows = sup[pos]
                offsets = offs
            owner = eng.block_worker(block)
            eng.workers[owner].shards.setdefault(
                injected.slice, BlockStore(injected.slice, eng.cfg.codec)
            ).add_final(block, offsets, rows)


def _barrier_collect(eng: _Engine, result: SolveResult, n: int, cfg: SolveConfig):
    merged = BlockStore(n, cfg.codec)
    total_supers = 0
    win = notloss = 0
    for w in eng.workers:
        shard = w.shards.get(n)
        if shard is None:
            continue
        if shard.building:
            raise MissingInput(
                f"slice {n} barrier reached with incomplete blocks: "
                f"{list(shard.building)[:3]}"
            )
        shard.compact()
        for block, fb in shard.final.items():
            offsets, sup = shard.read(block)
            merged.add_final(block, offsets, sup)
            total_supers += sup.shape[0]
            win += int(np.bitwise_count(sup[:, :4]).sum())
            notloss += int(np.bitwise_count(sup[:, 4:]).sum())
    result.stores[n] = merged
    result.counts.append(
        {
            "slice": n,
            "supers": total_supers,
            "win": win,
            "tie": notloss - win,
            "loss": 256 * total_supers - notloss,
        }
    )
    result.counts.sort(key=lambda c: c["slice"])
    result.samples[n] = _draw_samples(result, n, cfg)
    eng.note_memory()


def _draw_samples(result: SolveResult, n: int, cfg: SolveConfig):
    store = result.stores[n]
    sections = sorted({b.section for b in store.final}, key=lambda s: s.counts)
    if not sections:
        return []
    sizes = []
    for s in sections:
        dom = (result.domains.get(n) or {}).get(s) if result.domains.get(n) else None
        sizes.append(len(dom) if dom is not None else int(np.prod(s.dims())))
    prefix = np.concatenate([[0], np.cumsum(sizes)])
    total = int(prefix[-1])
    key = prng.derive_key(cfg.seed, _TAG_SAMPLES, n)
    picks = [
        int(prng.threefry2x64(key, (i, 0))[0]) % total for i in range(min(cfg.samples, total))
    ]
    out = []
    for p in sorted(set(picks)):
        si = int(np.searchsorted(prefix, p, "right")) - 1
        s = sections[si]
        dom = (result.domains.get(n) or {}).get(s) if result.domains.get(n) else None
        flat = int(dom[p - prefix[si]]) if dom is not None else p - int(prefix[si])
        dims = s.dims()
        i4 = []
        rem = flat
        for a in range(3, -1, -1):
            i4.append(rem % dims[a])
            rem //= dims[a]
        i4.reverse()
        board = L.board_at(s, tuple(i4))
        full, present = result._section_array(n, s)
        assert present[flat]
        sv = SU.SuperValue(SU.from_words(full[flat, :4]), SU.from_words(full[flat, 4:]))
        out.append((board, SU.sv_to_bytes(sv)))
    return out


def inject_boundary(seed: bytes, slice_n: int) -> InjectedBoundary:
    """Deterministic pseudorandom values for a whole slice."""
    return InjectedBoundary(seed, slice_n)
