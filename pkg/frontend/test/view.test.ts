import { describe, expect, test } from "vitest";

import * as board from "../src/board.js";
import { acceptValues, applyClick, initialPosition } from "../src/state.js";
import { buildView } from "../src/view.js";
import type { ValueResponse } from "../src/api.js";

describe("view model", () => {
  test("terminal board shows a banner and no markers", () => {
    let b = 0n;
    // black five in the bottom row plus scattered white stones
    for (const [x, y, d] of [
      [0, 0, 1], [1, 0, 1], [2, 0, 1], [3, 0, 1], [4, 0, 1],
      [0, 5, 2], [1, 5, 2], [2, 5, 2], [3, 5, 2],
    ] as const) {
      const q = board.cellQuadrant(x, y);
      const i = board.cellLocal(x, y);
      b += BigInt(d * Math.pow(3, i)) << BigInt(16 * q);
    }
    const s = { ...initialPosition(b) };
    const view = buildView(s);
    expect(view.statusClass).toBe("over");
    expect(view.banner).toContain("game over");
    expect(view.cells.every((c) => c.marker === null && !c.clickable)).toBe(true);
    expect(view.rotations.every((r) => !r.clickable)).toBe(true);
  });

  test("markers reflect API values; unknown renders neutrally", () => {
    let s = initialPosition();
    const resp: ValueResponse = {
      version: 1,
      board: "0",
      stones: 0,
      side_to_move: "black",
      value: "win",
      source: "database",
      children: [
        { move: { cell: [0, 0], quad: 0, direction: 1 }, board: "x", value: "win" },
        { move: { cell: [0, 0], quad: 0, direction: -1 }, board: "x", value: "loss" },
        { move: { cell: [1, 0], quad: 1, direction: 1 }, board: "x", value: "tie" },
      ],
    };
    s = acceptValues(s, resp);
    const view = buildView(s);
    const byCell = new Map(view.cells.map((c) => [`${c.x},${c.y}`, c]));
    expect(byCell.get("0,0")!.marker).toBe("win"); // best across its rotations
    expect(byCell.get("1,0")!.marker).toBe("tie");
    expect(byCell.get("5,5")!.marker).toBe("unknown"); // no data for this cell
  });

  test("rotation buttons are colored during the rotation phase", () => {
    let s = initialPosition();
    s = applyClick(s, { kind: "cell", cell: { x: 0, y: 0 } }).state;
    const resp: ValueResponse = {
      version: 1,
      board: "0",
      stones: 0,
      side_to_move: "black",
      value: "tie",
      source: "search",
      children: [
        { move: { cell: [0, 0], quad: 2, direction: 1 }, board: "x", value: "win" },
        { move: { cell: [0, 0], quad: 2, direction: -1 }, board: "x", value: "loss" },
        { move: { cell: [1, 1], quad: 2, direction: 1 }, board: "x", value: "tie" },
      ],
    };
    s = acceptValues(s, resp);
    const view = buildView(s);
    const rot = new Map(view.rotations.map((r) => [`${r.quad},${r.direction}`, r]));
    expect(rot.get("2,1")!.marker).toBe("win");
    expect(rot.get("2,-1")!.marker).toBe("loss");
    expect(rot.get("0,1")!.marker).toBe("unknown"); // other cell's data does not leak
    expect(view.banner).toContain("choose a quadrant rotation");
  });

  test("network failure keeps the board playable without colors", () => {
    let s = initialPosition();
    s = { ...s, error: "connect refused" };
    const view = buildView(s);
    expect(view.statusClass).toBe("error");
    expect(view.cells.some((c) => c.clickable)).toBe(true);
    expect(view.cells.every((c) => c.marker === null)).toBe(true);
  });
});
