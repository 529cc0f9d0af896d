"""Deterministic pseudorandom assignment of block lines and blocks to ranks.

All ownership derives from one shared 256-bit seed in O(1) per query:
block lines of a slice are scrambled by a cycle-walking Feistel
permutation and split into near-equal contiguous chunks, one per rank;
each block goes to the owner of one of its four lines, chosen by a
keyed counter-based generator from the block address.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

from . import layout as L
from . import prng
from .layout import IndexOutOfRange, LineId, BlockId

_TAG_ROUND = 0x46656973  # Feistel round keys
_TAG_CHOICE = 0x43686F69  # block line choice

FEISTEL_ROUNDS = 4


def _domain_bits(n: int) -> int:
    """Smallest even bit width covering n."""
    bits = max(2, (n - 1).bit_length())
    return bits + (bits & 1)


def _round_keys(seed: bytes, n: int) -> tuple[int, int, int, int]:
    return tuple(
        prng.derive_key(seed, _TAG_ROUND + r, n)[0] for r in range(FEISTEL_ROUNDS)
    )


def _permute_once(keys, half: int, mask: int, x: int) -> int:
    left, right = x >> half, x & mask
    for k in keys:
        left, right = right, left ^ (prng.mix64(k, right) & mask)
    return (left << half) | right


def _unpermute_once(keys, half: int, mask: int, x: int) -> int:
    left, right = x >> half, x & mask
    for k in reversed(keys):
        left, right = right ^ (prng.mix64(k, left) & mask), left
    return (left << half) | right


def permute(seed: bytes, domain: int, i: int, direction: str = "forward") -> int:
    """Keyed bijection on [0, domain) via a cycle-walking balanced Feistel."""
    if not 0 <= i < domain:
        raise IndexOutOfRange(f"index {i} outside domain {domain}")
    if domain == 1:
        return 0
    bits = _domain_bits(domain)
    half = bits // 2
    mask = (1 << half) - 1
    keys = _round_keys(seed, domain)
    step = _permute_once if direction == "forward" else _unpermute_once
    if direction not in ("forward", "inverse"):
        raise ValueError(f"bad direction: {direction}")
    x = step(keys, half, mask, i)
    while x >= domain:
        x = step(keys, half, mask, x)
    return x


# ---------------------------------------------------------------------------
# Line and block ownership


def _chunk_of(p: int, n: int, ranks: int) -> int:
    # chunks are [r*n//ranks, (r+1)*n//ranks)
    return (p * ranks + ranks - 1) // n


def chunk_range(n: int, ranks: int, r: int) -> range:
    return range(r * n // ranks, (r + 1) * n // ranks)


def line_owner(seed: bytes, slice_n: int, ranks: int, line: LineId) -> int:
    if ranks < 1:
        raise ValueError("ranks must be >= 1")
    n = L.line_count(slice_n)
    p = permute(seed, n, L.ordinal_from_line(line), "forward")
    return _chunk_of(p, n, ranks)


def lines_of_rank(seed: bytes, slice_n: int, ranks: int, rank: int) -> Iterator[LineId]:
    """The rank's contiguous chunk of the scrambled ordering, in order."""
    n = L.line_count(slice_n)
    for p in chunk_range(n, ranks, rank):
        yield L.line_from_ordinal(slice_n, permute(seed, n, p, "inverse"))


def block_owner(seed: bytes, slice_n: int, ranks: int, block: BlockId) -> int:
    lines = L.lines_of_block(block)
    key = prng.derive_key(seed, _TAG_CHOICE, slice_n)[0]
    pick = prng.mix64(key, L.ordinal_from_block(block)) % len(lines)
    return line_owner(seed, slice_n, ranks, lines[pick])


# ---------------------------------------------------------------------------
# Balance statistics (bulk, metadata only)


@njit(cache=True)
def _mix64_nb(key, x):
    z = x ^ key
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _feistel_nb(k0, k1, k2, k3, half, mask, domain, x):
    while True:
        left = x >> half
        right = x & mask
        t = right
        right = left ^ (_mix64_nb(k0, right) & mask)
        left = t
        t = right
        right = left ^ (_mix64_nb(k1, right) & mask)
        left = t
        t = right
        right = left ^ (_mix64_nb(k2, right) & mask)
        left = t
        t = right
        right = left ^ (_mix64_nb(k3, right) & mask)
        left = t
        x = (left << half) | right
        if x < domain:
            return x


@njit(cache=True)
def _line_stats_kernel(
    k0, k1, k2, k3, half, mask, nlines, ranks,
    sec_of_line, dim_of_line, base_of_line,  # per (section,dim) flattened cells
    dims, bdims, out_lines, out_linesize,
):
    # iterate every line ordinal of the slice
    for cell in range(sec_of_line.shape[0]):
        s = sec_of_line[cell]
        d = dim_of_line[cell]
        base = base_of_line[cell]
        # other-dims block grids, in dim order
        n_other = np.empty(3, np.int64)
        dim_other = np.empty(3, np.int64)
        j = 0
        for q in range(4):
            if q != d:
                n_other[j] = bdims[s, q]
                dim_other[j] = dims[s, q]
                j += 1
        total = n_other[0] * n_other[1] * n_other[2]
        for rem in range(total):
            a = rem // (n_other[1] * n_other[2])
            r2 = rem - a * n_other[1] * n_other[2]
            b = r2 // n_other[2]
            c = r2 - b * n_other[2]
            ordn = np.uint64(base + rem)
            p = _feistel_nb(k0, k1, k2, k3, half, mask, np.uint64(nlines), ordn)
            rank = (p * np.uint64(ranks) + np.uint64(ranks - 1)) // np.uint64(nlines)
            # supers in the line: full dim along d, block extents elsewhere
            ea = min(8, dim_other[0] - 8 * a)
            eb = min(8, dim_other[1] - 8 * b)
            ec = min(8, dim_other[2] - 8 * c)
            size = dims[s, d] * ea * eb * ec
            out_lines[rank] += 1
            out_linesize[rank] += size
    return 0


@njit(cache=True)
def _block_stats_kernel(
    k0, k1, k2, k3, half, mask, nlines, ranks, choice_key,
    dims, bdims, block_base, line_cell_base,  # per section
    out_blocks, out_supers,
):
    nsec = dims.shape[0]
    for s in range(nsec):
        b0 = bdims[s, 0]
        b1 = bdims[s, 1]
        b2 = bdims[s, 2]
        b3 = bdims[s, 3]
        nb = b0 * b1 * b2 * b3
        for rem in range(nb):
            i = rem // (b1 * b2 * b3)
            r2 = rem - i * b1 * b2 * b3
            j = r2 // (b2 * b3)
            r3 = r2 - j * b2 * b3
            k = r3 // b3
            l = r3 - k * b3
            ordn = block_base[s] + rem
            # the block's four line ordinals
            pick = _mix64_nb(choice_key, np.uint64(ordn)) % np.uint64(4)
            if pick == np.uint64(0):
                lo = line_cell_base[s, 0] + (j * b2 + k) * b3 + l
            elif pick == np.uint64(1):
                lo = line_cell_base[s, 1] + (i * b2 + k) * b3 + l
            elif pick == np.uint64(2):
                lo = line_cell_base[s, 2] + (i * b1 + j) * b3 + l
            else:
                lo = line_cell_base[s, 3] + (i * b1 + j) * b2 + k
            p = _feistel_nb(k0, k1, k2, k3, half, mask, np.uint64(nlines), np.uint64(lo))
            rank = (p * np.uint64(ranks) + np.uint64(ranks - 1)) // np.uint64(nlines)
            e0 = min(8, dims[s, 0] - 8 * i)
            e1 = min(8, dims[s, 1] - 8 * j)
            e2 = min(8, dims[s, 2] - 8 * k)
            e3 = min(8, dims[s, 3] - 8 * l)
            out_blocks[rank] += 1
            out_supers[rank] += e0 * e1 * e2 * e3
    return 0


@dataclass
class BalanceReport:
    slice: int
    ranks: int
    lines: np.ndarray
    blocks: np.ndarray
    supers: np.ndarray
    line_size: np.ndarray
    degenerate: bool

    def ratio(self, arr) -> float:
        lo, hi = int(arr.min()), int(arr.max())
        return float("inf") if lo == 0 else hi / lo

    def ratios(self) -> dict[str, float]:
        return {
            "lines": self.ratio(self.lines),
            "blocks": self.ratio(self.blocks),
            "supers": self.ratio(self.supers),
            "line_size": self.ratio(self.line_size),
        }


def _slice_meta(slice_n: int):
    secs, line_counts, line_prefix = L.slice_line_index(slice_n)
    _, block_counts, block_prefix = L.slice_block_index(slice_n)
    S = len(secs)
    dims = np.array([s.dims() for s in secs], dtype=np.int64)
    bdims = np.array([s.block_dims() for s in secs], dtype=np.int64)
    line_cell_base = line_prefix[:-1].reshape(S, 4)
    return secs, dims, bdims, line_counts, line_prefix, block_prefix, line_cell_base


def partition_stats(seed: bytes, slice_n: int, ranks: int) -> BalanceReport:
    """Exact per-rank ownership tallies for one slice's metadata."""
    prng.check_seed(seed)
    secs, dims, bdims, line_counts, line_prefix, block_prefix, line_cell_base = _slice_meta(slice_n)
    nlines = int(line_prefix[-1])
    degenerate = ranks >= nlines
    bits = _domain_bits(nlines)
    half, mask = bits // 2, (1 << bits // 2) - 1
    keys = [np.uint64(k) for k in _round_keys(seed, nlines)]
    choice_key = np.uint64(prng.derive_key(seed, _TAG_CHOICE, slice_n)[0])

    out_lines = np.zeros(ranks, dtype=np.int64)
    out_linesize = np.zeros(ranks, dtype=np.int64)
    sec_of_cell = np.repeat(np.arange(len(secs), dtype=np.int64), 4)
    dim_of_cell = np.tile(np.arange(4, dtype=np.int64), len(secs))
    base_of_cell = line_prefix[:-1].astype(np.int64)
    _line_stats_kernel(
        keys[0], keys[1], keys[2], keys[3],
        np.uint64(half), np.uint64(mask), nlines, ranks,
        sec_of_cell, dim_of_cell, base_of_cell,
        dims, bdims, out_lines, out_linesize,
    )

    out_blocks = np.zeros(ranks, dtype=np.int64)
    out_supers = np.zeros(ranks, dtype=np.int64)
    _block_stats_kernel(
        keys[0], keys[1], keys[2], keys[3],
        np.uint64(half), np.uint64(mask), nlines, ranks, choice_key,
        dims, bdims, block_prefix[:-1].astype(np.int64),
        line_cell_base.astype(np.int64), out_blocks, out_supers,
    )
    return BalanceReport(
        slice=slice_n,
        ranks=ranks,
        lines=out_lines,
        blocks=out_blocks,
        supers=out_supers,
        line_size=out_linesize,
        degenerate=degenerate,
    )
