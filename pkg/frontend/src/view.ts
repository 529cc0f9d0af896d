// Pure view-model construction: everything the DOM layer paints is
// decided here, so tests can assert on colors without a browser.

import * as board from "./board.js";
import type { UiPosition } from "./state.js";
import type { ValueName } from "./api.js";

export interface CellView {
  x: number;
  y: number;
  stone: 0 | 1 | 2;
  pending: boolean; // the placed-but-not-rotated stone
  marker: ValueName | null; // best value achievable placing here, when known
  clickable: boolean;
}

export interface RotationView {
  quad: number;
  direction: 1 | -1;
  marker: ValueName | null;
  clickable: boolean;
}

export interface BoardView {
  cells: CellView[];
  rotations: RotationView[];
  banner: string;
  statusClass: "normal" | "over" | "error" | "loading";
}

const ORDER: Record<string, number> = { win: 3, tie: 2, loss: 1, unknown: 0 };

function better(a: ValueName | null, b: ValueName): ValueName {
  if (a === null) return b;
  return ORDER[b] > ORDER[a] ? b : a;
}

export function buildView(state: UiPosition): BoardView {
  const tv = board.terminalValue(state.board);
  const mover = board.sideToMove(state.board) === board.BLACK ? "black" : "white";
  const cells: CellView[] = [];
  const rotations: RotationView[] = [];

  // value per placement cell (max over its rotations) and per rotation
  // of the pending placement, straight from the API response
  const cellValue = new Map<string, ValueName>();
  const rotValue = new Map<string, ValueName>();
  if (state.values && tv === null) {
    for (const child of state.values.children) {
      const [cx, cy] = child.move.cell;
      const ck = `${cx},${cy}`;
      cellValue.set(ck, better(cellValue.get(ck) ?? null, child.value));
      if (
        state.pendingCell &&
        cx === state.pendingCell.x &&
        cy === state.pendingCell.y &&
        child.move.quad !== null
      ) {
        rotValue.set(`${child.move.quad},${child.move.direction}`, child.value);
      }
    }
  }

  for (let x = 0; x < 6; x++) {
    for (let y = 0; y < 6; y++) {
      const stone = board.getCell(state.board, x, y) as 0 | 1 | 2;
      const pending =
        state.pendingCell !== null && state.pendingCell.x === x && state.pendingCell.y === y;
      cells.push({
        x,
        y,
        stone,
        pending,
        marker:
          stone === 0 && tv === null && !state.pendingCell
            ? cellValue.get(`${x},${y}`) ?? (state.values ? "unknown" : null)
            : null,
        clickable: stone === 0 && tv === null && !state.pendingCell,
      });
    }
  }
  for (let quad = 0; quad < 4; quad++) {
    for (const direction of [1, -1] as const) {
      rotations.push({
        quad,
        direction,
        marker: state.pendingCell
          ? rotValue.get(`${quad},${direction}`) ?? (state.values ? "unknown" : null)
          : null,
        clickable: state.pendingCell !== null,
      });
    }
  }

  let banner: string;
  let statusClass: BoardView["statusClass"] = "normal";
  if (tv !== null) {
    const names: Record<number, string> = { 1: `${mover} wins`, 0: "tie", [-1]: `${mover} loses` };
    banner = `game over: ${names[tv]}`;
    statusClass = "over";
  } else if (state.error) {
    banner = `server unreachable (${state.error}); play continues without values`;
    statusClass = "error";
  } else if (state.pendingCell) {
    banner = `${mover} placed at (${state.pendingCell.x}, ${state.pendingCell.y}); choose a quadrant rotation`;
  } else if (state.fetching || !state.values) {
    banner = `${mover} to move; fetching values...`;
    statusClass = state.fetching ? "loading" : "normal";
  } else if (state.values.value === "unknown") {
    banner = `${mover} to move; value unknown: ${state.values.reason ?? "no source"}`;
  } else {
    banner = `${mover} to move; position is a ${state.values.value} (${state.values.source})`;
  }
  return { cells, rotations, banner, statusClass };
}
