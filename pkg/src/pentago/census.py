"""Exact combinatorial position counts and layout overcounting ratios.

Counts are over arrangements with valid per-color totals (black plays
first, so n stones means ceil(n/2) black); reachability is not
considered.  Symmetry reduction uses Burnside's lemma over the 8
whole-board rotations and reflections, with exact integer arithmetic
throughout.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import NamedTuple

from . import board as B
from . import layout as L
from . import symmetry as S

PAPER_TOTAL = 3_009_081_623_421_558  # expected D4-reduced grand total


def raw_count(n: int) -> int:
    """Arrangements with n stones, no symmetry reduction."""
    if not 0 <= n <= 36:
        raise ValueError(f"slice out of range: {n}")
    nb, nw = (n + 1) // 2, n // 2
    return comb(36, nb) * comb(36 - nb, nw)


@lru_cache(maxsize=1)
def _cycle_types() -> list[list[int]]:
    """Cell-cycle lengths of each of the 8 global symmetries."""
    out = []
    for d in range(8):
        f = S._global_cell_map(d)
        perm = {c: f(c) for c in B.CELLS}
        seen = set()
        lens = []
        for c in B.CELLS:
            if c in seen:
                continue
            n = 0
            cur = c
            while cur not in seen:
                seen.add(cur)
                cur = perm[cur]
                n += 1
            lens.append(n)
        out.append(lens)
    return out


def _fixed_colorings(cycle_lens, nb: int, nw: int) -> int:
    """Colorings constant on every cycle with exactly (nb, nw) stones."""
    dp = {(0, 0): 1}
    for length in cycle_lens:
        ndp: dict[tuple[int, int], int] = {}
        for (b, w), v in dp.items():
            for db, dw in ((0, 0), (length, 0), (0, length)):
                b2, w2 = b + db, w + dw
                if b2 <= nb and w2 <= nw:
                    ndp[(b2, w2)] = ndp.get((b2, w2), 0) + v
        dp = ndp
    return dp.get((nb, nw), 0)


@lru_cache(maxsize=64)
def sym_count(n: int) -> int:
    """Number of symmetry-inequivalent n-stone arrangements (Burnside)."""
    nb, nw = (n + 1) // 2, n // 2
    total = sum(_fixed_colorings(ct, nb, nw) for ct in _cycle_types())
    if total % 8:
        raise AssertionError(f"Burnside sum not divisible by 8 at n={n}")
    return total // 8


def total_positions() -> int:
    return sum(sym_count(n) for n in range(37))


class SliceCount(NamedTuple):
    slice: int
    raw: int
    reduced: int


def census() -> list[SliceCount]:
    return [SliceCount(n, raw_count(n), sym_count(n)) for n in range(37)]


class OvercountReport(NamedTuple):
    rotation_factor: Fraction  # stored rotation slots / raw positions
    section_factor: Fraction  # additional cost of section-level reduction
    combined: Fraction  # stored slots over kept sections / reduced positions


def overcount_ratio() -> OvercountReport:
    """Data-layout overcounting relative to one slot per unique position.

    Rotation abstraction stores 256 slots per rotation-minimal board,
    overcounting boards with rotation stabilizers; reducing symmetry
    only at section granularity overcounts boards whose section has
    dihedral stabilizers.
    """
    raw_tot = sum(raw_count(n) for n in range(37))
    red_tot = total_positions()
    slots_all = 256 * L.all_section_supers(kept_only=False)
    slots_kept = 256 * L.all_section_supers(kept_only=True)
    rot = Fraction(slots_all, raw_tot)
    combined = Fraction(slots_kept, red_tot)
    return OvercountReport(rot, combined / rot, combined)


def branching_average(mode: str = "raw") -> float:
    """Count-weighted mean successor count, analytically from slice counts.

    Approximate methodology: every position with n stones is charged
    (36-n)*k successors (k=8 raw, k=1 rotation-abstracted); terminal
    positions are not excluded.
    """
    if mode == "raw":
        k = 8
    elif mode == "rotation_abstracted":
        k = 1
    else:
        raise ValueError(f"unknown mode: {mode}")
    num = sum(raw_count(n) * (36 - n) * k for n in range(37))
    den = sum(raw_count(n) for n in range(37))
    return num / den


def branching_average_slice(n: int, mode: str = "raw") -> float:
    k = 8 if mode == "raw" else 1
    return float((36 - n) * k)
