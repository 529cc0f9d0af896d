"""Forward negamax oracle: exact values by depth-first tree search.

This is the independent check against every retrograde path in the
package, so the recursive core stays as simple as possible.  Positions
can optionally stop at an injected boundary slice, reading stored
values instead of recursing (the randomized-boundary equivalence test).

A vectorized slice-by-slice sweep (`sweep_values`) evaluates *all*
positions below a small boundary slice at once; it shares nothing with
the super/section machinery and is cross-checked against the recursive
path on samples.
"""

from __future__ import annotations

from typing import NamedTuple, Optional, Protocol

import numpy as np

from . import _kernels as K
from . import board as B
from . import symmetry as S


class TreeTooLarge(ValueError):
    pass


class Boundary(Protocol):
    """Stored values replacing recursion at one slice."""

    slice: int

    def value_of(self, board: B.Board) -> int: ...

    def values_for_keys(self, keys: np.ndarray) -> np.ndarray: ...


class SearchResult(NamedTuple):
    value: int
    nodes: int


def estimate_nodes(board: B.Board) -> int:
    """Upper-ish bound on distinct positions reachable from `board`."""
    from math import comb

    e = 36 - B.count_stones(board)
    total = 0
    for j in range(e + 1):
        total += comb(e, j) * comb(j, (j + 1) // 2)
    return total * 256 // 8


DEFAULT_NODE_LIMIT = 50_000_000


def perfect_value(
    board: B.Board,
    boundary: Optional[Boundary] = None,
    prune: bool = False,
    use_cache: bool = True,
    node_limit: int = DEFAULT_NODE_LIMIT,
    shared_cache: Optional[dict] = None,
) -> SearchResult:
    """Exact value for the side to move by depth-first negamax.

    With a boundary, recursion stops at boundary.slice and reads injected
    values (the board must sit strictly below that slice).  Without one,
    the game tree must be desk-sized; TreeTooLarge reports the estimate.
    """
    stones = B.count_stones(board)
    if boundary is not None:
        if not boundary.slice <= 6:
            raise ValueError("boundary slices above 6 are not materializable")
        if stones >= boundary.slice:
            raise ValueError("board must lie strictly below the boundary slice")
        tv = None
    else:
        tv = B.terminal_value(board)
        if tv is not None:
            return SearchResult(tv, 1)
        mover = B.side_to_move(board)
        for cell in B.empty_cells(board):
            if B.won(B.place(board, cell, mover), mover):
                return SearchResult(1, 1)  # immediate win, no search needed
        est = estimate_nodes(board)
        if est > node_limit:
            raise TreeTooLarge(
                f"~{est:.2e} reachable positions exceeds the limit {node_limit:.0e};"
                " supply a boundary or start from a fuller board"
            )
    if shared_cache is not None:
        cache: Optional[dict] = shared_cache
    else:
        cache = {} if use_cache else None
    nodes = [0]

    def rec(b: B.Board, alpha: int, beta: int) -> int:
        nodes[0] += 1
        if boundary is not None and B.count_stones(b) == boundary.slice:
            return boundary.value_of(b)
        tv = B.terminal_value(b)
        if tv is not None:
            return tv
        key = None
        if cache is not None:
            key = S.canonicalize_global(b)
            hit = cache.get(key)
            if hit is not None:
                return hit
        mover = B.side_to_move(b)
        empties = B.empty_cells(b)
        placed_boards = []
        win_found = False
        for cell in empties:
            placed = B.place(b, cell, mover)
            if B.won(placed, mover):
                win_found = True
                break
            placed_boards.append(placed)
        best = -1
        exact_window = alpha <= -1 and beta >= 1
        if win_found:
            best = 1
        else:
            for placed in placed_boards:
                for quad in range(4):
                    for direction in (1, -1):
                        child = B.rotate_quadrant(placed, quad, direction)
                        v = -rec(child, -beta, -max(alpha, best))
                        if v > best:
                            best = v
                        if prune and best >= beta:
                            break
                    if prune and best >= beta:
                        break
                if prune and best >= beta:
                    break
        if cache is not None and (not prune or exact_window):
            cache[key] = best
        return best

    value = rec(board, -1, 1)
    return SearchResult(value, nodes[0])


# ---------------------------------------------------------------------------
# Vectorized forward sweep below a boundary


_DELTA_BLACK = K._CELL_BLACK
_DELTA_WHITE = K._CELL_WHITE
_CELL_Q = np.array([B.cell_quadrant(x, y) for x, y in B.CELLS], dtype=np.int64)
_CELL_L = np.array([B.cell_local(x, y) for x, y in B.CELLS], dtype=np.int64)


def sweep_values(boundary: Boundary) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Values of every position strictly below the boundary slice.

    Returns {slice: (sorted keys, values int8)}.  Only valid for
    boundary slices <= 6, where no five in a row can exist below the
    boundary, so the recurrence is a pure max over rotated placements.
    """
    k = boundary.slice
    if not 1 <= k <= 6:
        raise ValueError("sweep requires a boundary slice in 1..6")
    keys_next = K.enumerate_slice_keys(k)
    vals_next = boundary.values_for_keys(keys_next).astype(np.int8)
    out: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for n in range(k - 1, -1, -1):
        keys = K.enumerate_slice_keys(n)
        vals = np.full(len(keys), -1, dtype=np.int8)
        black_to_move = n % 2 == 0
        for cell in range(36):
            q, li = int(_CELL_Q[cell]), int(_CELL_L[cell])
            codes = ((keys >> np.uint64(16 * q)) & np.uint64(0xFFFF)).astype(np.int64)
            empty = B.DIGITS[codes, li] == 0
            if not empty.any():
                continue
            delta = _DELTA_BLACK[cell] if black_to_move else _DELTA_WHITE[cell]
            placed = keys[empty] + delta
            acc = vals[empty]
            for quad in range(4):
                pc = ((placed >> np.uint64(16 * quad)) & np.uint64(0xFFFF)).astype(np.int64)
                base = placed - (pc.astype(np.uint64) << np.uint64(16 * quad))
                for rot in (1, 3):
                    child = base + (
                        B.ROTATE_CODE[rot][pc].astype(np.uint64) << np.uint64(16 * quad)
                    )
                    pos = np.searchsorted(keys_next, child)
                    acc = np.maximum(acc, -vals_next[pos])
            vals[empty] = acc
        out[n] = (keys, vals)
        keys_next, vals_next = keys, vals
    return out
