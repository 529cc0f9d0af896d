"""Board representation, move generation, and win detection.

This module owns every geometric convention in the package.  All other
modules import these conventions; none redefines them.

Coordinates and packing:

* A cell is ``(x, y)`` with ``x`` the column (0..5, left to right) and
  ``y`` the row (0..5, bottom to top).
* Quadrant index: ``q = 2*(x//3) + (y//3)``, so quadrant 0 is the lower
  left, 1 the upper left, 2 the lower right, 3 the upper right.
* Local index within a quadrant: ``i = 3*(x%3) + (y%3)``.
* A quadrant state is a base-3 code over its 9 local indices, local
  index 0 in the least significant digit; digit 0 = empty, 1 = black,
  2 = white.  Codes range over [0, 19683).
* A board is the four quadrant codes packed as four 16-bit fields of
  one 64-bit integer, quadrant 0 least significant.
* Black moves first, so black is to move iff both colors have equal
  stone counts.

Symmetry conventions (used by :mod:`pentago.symmetry`):

* Counterclockwise quarter turn of quadrant content:
  local ``(u, v) -> (2-v, u)``.
* Global counterclockwise quarter turn: ``(x, y) -> (5-y, x)``.
* The global reflection axis is vertical: ``(x, y) -> (5-x, y)``.
  Reflections are applied before rotations.

Text forms: a board parses either as its decimal packed key or as 36
characters over {0,1,2}, row-major from (x=0, y=5) to (x=5, y=0).  The
decimal key is the canonical output form.
"""

from __future__ import annotations

from enum import IntEnum
from typing import NamedTuple, Optional

import numpy as np

Board = int  # packed 64-bit key


class Color(IntEnum):
    """Stone color; values match quadrant-code digits."""

    BLACK = 1
    WHITE = 2

    @property
    def other(self) -> "Color":
        return Color(self ^ 3)


class Move(NamedTuple):
    """One legal move: place at cell, then rotate quadrant `quad` by `direction`.

    `quad`/`direction` are None for placements that win immediately
    (no rotation is played).  `direction` is +1 for counterclockwise,
    -1 for clockwise.
    """

    cell: tuple[int, int]
    quad: Optional[int]
    direction: Optional[int]


class OccupiedCell(ValueError):
    pass


class WrongTurn(ValueError):
    pass


class TerminalPosition(ValueError):
    pass


class InvalidBoard(ValueError):
    pass


NUM_CODES = 3**9  # 19683
POW3 = 3 ** np.arange(10, dtype=np.int64)


def cell_quadrant(x: int, y: int) -> int:
    return 2 * (x // 3) + (y // 3)


def cell_local(x: int, y: int) -> int:
    return 3 * (x % 3) + (y % 3)


CELLS = [(x, y) for x in range(6) for y in range(6)]


def _build_digit_tables():
    codes = np.arange(NUM_CODES, dtype=np.int64)
    digits = (codes[:, None] // POW3[None, :9]) % 3
    return digits.astype(np.int8)


DIGITS = _build_digit_tables()  # (19683, 9)
COUNT_BLACK = (DIGITS == 1).sum(axis=1).astype(np.int8)
COUNT_WHITE = (DIGITS == 2).sum(axis=1).astype(np.int8)
COUNT_STONES = (COUNT_BLACK + COUNT_WHITE).astype(np.int8)

# 9-bit occupancy masks per code, one per color
MASK9 = np.zeros((NUM_CODES, 2), dtype=np.uint16)
for _i in range(9):
    MASK9[:, 0] |= ((DIGITS[:, _i] == 1).astype(np.uint16) << _i)
    MASK9[:, 1] |= ((DIGITS[:, _i] == 2).astype(np.uint16) << _i)


def _perm_code_table(local_perm) -> np.ndarray:
    """Code table for `new_digits[perm[i]] = old_digits[i]`."""
    out = np.zeros(NUM_CODES, dtype=np.int64)
    for i in range(9):
        out += DIGITS[:, i].astype(np.int64) * POW3[local_perm[i]]
    return out.astype(np.uint16)


# local (u,v) -> (2-v, u), counterclockwise
_ROT_PERM = [3 * (2 - (i % 3)) + (i // 3) for i in range(9)]
# local (u,v) -> (2-u, v), reflection about the vertical axis
_REFL_PERM = [3 * (2 - (i // 3)) + (i % 3) for i in range(9)]

ROTATE_CODE = np.zeros((4, NUM_CODES), dtype=np.uint16)
ROTATE_CODE[0] = np.arange(NUM_CODES, dtype=np.uint16)
ROTATE_CODE[1] = _perm_code_table(_ROT_PERM)
for _k in (2, 3):
    ROTATE_CODE[_k] = ROTATE_CODE[1][ROTATE_CODE[_k - 1]]
REFLECT_CODE = _perm_code_table(_REFL_PERM)


def quadrant_code(board: Board, q: int) -> int:
    return (board >> (16 * q)) & 0xFFFF


def pack(codes) -> Board:
    c0, c1, c2, c3 = codes
    return int(c0) | (int(c1) << 16) | (int(c2) << 32) | (int(c3) << 48)


def unpack(board: Board) -> tuple[int, int, int, int]:
    return (
        board & 0xFFFF,
        (board >> 16) & 0xFFFF,
        (board >> 32) & 0xFFFF,
        (board >> 48) & 0xFFFF,
    )


def stone_counts(board: Board) -> tuple[int, int]:
    b = w = 0
    for c in unpack(board):
        b += int(COUNT_BLACK[c])
        w += int(COUNT_WHITE[c])
    return b, w


def count_stones(board: Board) -> int:
    b, w = stone_counts(board)
    return b + w


def side_to_move(board: Board) -> Color:
    b, w = stone_counts(board)
    return Color.BLACK if b == w else Color.WHITE


def check_board(board: Board) -> Board:
    """Validate packing and stone-count invariants; return the board."""
    if not 0 <= board < 2**64:
        raise InvalidBoard(f"key out of range: {board}")
    for c in unpack(board):
        if c >= NUM_CODES:
            raise InvalidBoard(f"quadrant code out of range: {c}")
    b, w = stone_counts(board)
    if not 0 <= b - w <= 1:
        raise InvalidBoard(f"stone counts invalid: black={b} white={w}")
    return board


def get_cell(board: Board, cell: tuple[int, int]) -> int:
    """Digit at cell: 0 empty, 1 black, 2 white."""
    x, y = cell
    q = cell_quadrant(x, y)
    i = cell_local(x, y)
    return int(DIGITS[quadrant_code(board, q), i])


def place(board: Board, cell: tuple[int, int], color: Color) -> Board:
    """Add a stone; the rotation half of the move is separate."""
    x, y = cell
    if not (0 <= x < 6 and 0 <= y < 6):
        raise InvalidBoard(f"cell out of range: {cell}")
    if color != side_to_move(board):
        raise WrongTurn(f"{Color(color).name} is not on move")
    q = cell_quadrant(x, y)
    i = cell_local(x, y)
    if get_cell(board, cell) != 0:
        raise OccupiedCell(f"cell {cell} is occupied")
    return board + (int(color) * int(POW3[i]) << (16 * q))


def rotate_quadrant(board: Board, quad: int, direction: int) -> Board:
    """Rotate one quadrant a quarter turn; direction +1 = ccw, -1 = cw."""
    k = direction % 4
    c = quadrant_code(board, quad)
    return board - (c << (16 * quad)) + (int(ROTATE_CODE[k, c]) << (16 * quad))


# ---------------------------------------------------------------------------
# Win detection: the 32 length-5 windows, as 36-bit masks with bit 9*q+local.


def cell_bit(x: int, y: int) -> int:
    return 9 * cell_quadrant(x, y) + cell_local(x, y)


def _build_windows():
    wins = []
    for dx, dy in ((1, 0), (0, 1), (1, 1), (1, -1)):
        for x0 in range(6):
            for y0 in range(6):
                cs = [(x0 + k * dx, y0 + k * dy) for k in range(5)]
                if all(0 <= x < 6 and 0 <= y < 6 for x, y in cs):
                    wins.append(cs)
    assert len(wins) == 32
    masks = np.zeros(32, dtype=np.uint64)
    for i, cs in enumerate(wins):
        m = 0
        for x, y in cs:
            m |= 1 << cell_bit(x, y)
        masks[i] = m
    return wins, masks


WIN_WINDOWS, WIN_MASKS = _build_windows()
_WIN_MASKS_INT = [int(m) for m in WIN_MASKS]


def bitboard(board: Board, color: Color) -> int:
    """36-bit occupancy of `color`, bit index 9*q+local."""
    col = 0 if color == Color.BLACK else 1
    out = 0
    for q in range(4):
        out |= int(MASK9[quadrant_code(board, q), col]) << (9 * q)
    return out


def won(board: Board, color: Color) -> bool:
    bb = bitboard(board, color)
    for m in _WIN_MASKS_INT:
        if bb & m == m:
            return True
    return False


def terminal_value(board: Board) -> Optional[int]:
    """Value for the side to move if the game is over, else None."""
    fb = won(board, Color.BLACK)
    fw = won(board, Color.WHITE)
    if fb or fw or count_stones(board) == 36:
        fc, fo = (fb, fw) if side_to_move(board) == Color.BLACK else (fw, fb)
        return int(fc) - int(fo)
    return None


def empty_cells(board: Board) -> list[tuple[int, int]]:
    return [c for c in CELLS if get_cell(board, c) == 0]


def moves(board: Board) -> list[tuple[Board, Move]]:
    """All legal successors with their move descriptors.

    Placements that complete five in a row for the mover appear once,
    rotation-free; all other placements fan out over the 8 quadrant
    rotations.
    """
    if terminal_value(board) is not None:
        raise TerminalPosition("no moves from a finished position")
    mover = side_to_move(board)
    out = []
    for cell in empty_cells(board):
        placed = place(board, cell, mover)
        if won(placed, mover):
            out.append((placed, Move(cell, None, None)))
            continue
        for quad in range(4):
            for direction in (1, -1):
                out.append(
                    (rotate_quadrant(placed, quad, direction), Move(cell, quad, direction))
                )
    return out


# ---------------------------------------------------------------------------
# Text forms


def parse_board(text: str) -> Board:
    """Parse the decimal key form or the 36-character grid form."""
    text = text.strip()
    if len(text) == 36 and set(text) <= set("012"):
        board = 0
        k = 0
        for y in range(5, -1, -1):
            for x in range(6):
                d = int(text[k])
                k += 1
                if d:
                    q = cell_quadrant(x, y)
                    board += d * int(POW3[cell_local(x, y)]) << (16 * q)
        return check_board(board)
    try:
        key = int(text, 10)
    except ValueError:
        raise InvalidBoard(f"not a board key or grid string: {text!r}") from None
    return check_board(key)


def board_string(board: Board) -> str:
    """36-character grid form, row-major from (0,5) to (5,0)."""
    out = []
    for y in range(5, -1, -1):
        for x in range(6):
            out.append(str(get_cell(board, (x, y))))
    return "".join(out)


def pretty(board: Board) -> str:
    rows = []
    for y in range(5, -1, -1):
        row = []
        for x in range(6):
            row.append(".XO"[get_cell(board, (x, y))])
            if x == 2:
                row.append("|")
        rows.append(" ".join(row))
        if y == 3:
            rows.append("------+------")
    return "\n".join(rows)
