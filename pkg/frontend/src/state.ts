// Explorer state: a history of positions, two-phase move entry
// (place, then pick a quadrant rotation), and staleness bookkeeping
// for value responses.

import * as board from "./board.js";
import type { ValueResponse } from "./api.js";

export interface HistoryEntry {
  board: bigint;
  move: board.MoveDescriptor | null; // move that produced this position
}

export interface UiPosition {
  board: bigint;
  history: HistoryEntry[]; // replays from the root to the current board
  pendingCell: board.Cell | null; // placement awaiting its rotation
  values: ValueResponse | null; // current response, if fresh
  fetching: boolean;
  error: string | null;
}

export function initialPosition(root: bigint = 0n): UiPosition {
  return {
    board: root,
    history: [{ board: root, move: null }],
    pendingCell: null,
    values: null,
    fetching: false,
    error: null,
  };
}

export type ClickTarget =
  | { kind: "cell"; cell: board.Cell }
  | { kind: "rotation"; quad: number; direction: 1 | -1 }
  | { kind: "undo" };

export interface ClickResult {
  state: UiPosition;
  changed: boolean;
  rejected?: string;
}

/** Apply one user click; illegal clicks leave the state unchanged. */
export function applyClick(state: UiPosition, target: ClickTarget): ClickResult {
  if (target.kind === "undo") {
    if (state.pendingCell) {
      return { state: { ...state, pendingCell: null }, changed: true };
    }
    if (state.history.length <= 1) return { state, changed: false, rejected: "at the root" };
    const history = state.history.slice(0, -1);
    return {
      state: {
        ...state,
        board: history[history.length - 1].board,
        history,
        pendingCell: null,
        values: null,
        error: null,
      },
      changed: true,
    };
  }
  if (board.terminalValue(state.board) !== null) {
    return { state, changed: false, rejected: "the game is over" };
  }
  if (target.kind === "cell") {
    const { cell } = target;
    if (board.getCell(state.board, cell.x, cell.y) !== 0) {
      return { state, changed: false, rejected: "cell is occupied" };
    }
    const mover = board.sideToMove(state.board);
    const placed = board.place(state.board, cell, mover);
    if (board.won(placed, mover)) {
      // immediate win: the move completes without a rotation
      return { state: push(state, placed, { cell, quad: null, direction: null }), changed: true };
    }
    return { state: { ...state, pendingCell: cell }, changed: true };
  }
  // rotation phase
  if (!state.pendingCell) {
    return { state, changed: false, rejected: "place a stone first" };
  }
  const mover = board.sideToMove(state.board);
  const placed = board.place(state.board, state.pendingCell, mover);
  const next = board.rotateQuadrant(placed, target.quad, target.direction);
  return {
    state: push(state, next, {
      cell: state.pendingCell,
      quad: target.quad,
      direction: target.direction,
    }),
    changed: true,
  };
}

function push(state: UiPosition, next: bigint, move: board.MoveDescriptor): UiPosition {
  return {
    ...state,
    board: next,
    history: [...state.history, { board: next, move }],
    pendingCell: null,
    values: null,
    error: null,
  };
}

/** Accept a value response only if it matches the current board. */
export function acceptValues(state: UiPosition, resp: ValueResponse): UiPosition {
  if (BigInt(resp.board) !== state.board) return state; // stale: superseded position
  return { ...state, values: resp, fetching: false, error: null };
}

export function networkFailure(state: UiPosition, message: string): UiPosition {
  return { ...state, fetching: false, error: message };
}
