// Board conventions mirrored from the solving engine; every encoding here
// is pinned by the shared test-vector files and must not drift.
//
// Cell (x, y): x column 0..5 left to right, y row 0..5 bottom to top.
// Quadrant q = 2*(x/3|0) + (y/3|0); local index i = 3*(x%3) + (y%3).
// Quadrant state = base-3 code over local indices (0 empty, 1 black,
// 2 white), local 0 least significant.  Board key = four codes packed
// as 16-bit fields of a 64-bit integer (BigInt here), quadrant 0 low.

export type Cell = { x: number; y: number };
export type Color = 1 | 2; // black, white

export const BLACK: Color = 1;
export const WHITE: Color = 2;

const POW3: number[] = [];
for (let i = 0, p = 1; i < 10; i++, p *= 3) POW3.push(p);

export function cellQuadrant(x: number, y: number): number {
  return 2 * Math.floor(x / 3) + Math.floor(y / 3);
}

export function cellLocal(x: number, y: number): number {
  return 3 * (x % 3) + (y % 3);
}

// counterclockwise quarter turn of quadrant content: (u,v) -> (2-v, u)
const ROT_PERM: number[] = [];
for (let i = 0; i < 9; i++) {
  const u = Math.floor(i / 3), v = i % 3;
  ROT_PERM.push(3 * (2 - v) + u);
}

export function quadrantCode(key: bigint, q: number): number {
  return Number((key >> BigInt(16 * q)) & 0xffffn);
}

export function packCodes(codes: number[]): bigint {
  let key = 0n;
  for (let q = 0; q < 4; q++) key |= BigInt(codes[q]) << BigInt(16 * q);
  return key;
}

export function digit(code: number, local: number): number {
  return Math.floor(code / POW3[local]) % 3;
}

export function getCell(key: bigint, x: number, y: number): number {
  return digit(quadrantCode(key, cellQuadrant(x, y)), cellLocal(x, y));
}

export function rotateCode(code: number, turns: number): number {
  let out = code;
  for (let t = 0; t < ((turns % 4) + 4) % 4; t++) {
    let next = 0;
    for (let i = 0; i < 9; i++) next += (Math.floor(out / POW3[i]) % 3) * POW3[ROT_PERM[i]];
    out = next;
  }
  return out;
}

export function stoneCounts(key: bigint): { black: number; white: number } {
  let black = 0, white = 0;
  for (let q = 0; q < 4; q++) {
    const code = quadrantCode(key, q);
    for (let i = 0; i < 9; i++) {
      const d = digit(code, i);
      if (d === 1) black++;
      else if (d === 2) white++;
    }
  }
  return { black, white };
}

export function countStones(key: bigint): number {
  const c = stoneCounts(key);
  return c.black + c.white;
}

export function sideToMove(key: bigint): Color {
  const c = stoneCounts(key);
  return c.black === c.white ? BLACK : WHITE;
}

export function place(key: bigint, cell: Cell, color: Color): bigint {
  const q = cellQuadrant(cell.x, cell.y);
  const i = cellLocal(cell.x, cell.y);
  if (getCell(key, cell.x, cell.y) !== 0) throw new Error(`cell ${cell.x},${cell.y} occupied`);
  return key + (BigInt(color * POW3[i]) << BigInt(16 * q));
}

export function rotateQuadrant(key: bigint, quad: number, direction: 1 | -1): bigint {
  const code = quadrantCode(key, quad);
  const turned = rotateCode(code, direction === 1 ? 1 : 3);
  return key - (BigInt(code) << BigInt(16 * quad)) + (BigInt(turned) << BigInt(16 * quad));
}

// the 32 five-in-a-row windows, as cell lists
const WINDOWS: Cell[][] = (() => {
  const out: Cell[][] = [];
  for (const [dx, dy] of [[1, 0], [0, 1], [1, 1], [1, -1]] as const) {
    for (let x0 = 0; x0 < 6; x0++) {
      for (let y0 = 0; y0 < 6; y0++) {
        const cells: Cell[] = [];
        for (let k = 0; k < 5; k++) cells.push({ x: x0 + k * dx, y: y0 + k * dy });
        if (cells.every((c) => c.x >= 0 && c.x < 6 && c.y >= 0 && c.y < 6)) out.push(cells);
      }
    }
  }
  if (out.length !== 32) throw new Error("window enumeration broken");
  return out;
})();

export function won(key: bigint, color: Color): boolean {
  return WINDOWS.some((cells) => cells.every((c) => getCell(key, c.x, c.y) === color));
}

export function terminalValue(key: bigint): number | null {
  const fb = won(key, BLACK);
  const fw = won(key, WHITE);
  if (!fb && !fw && countStones(key) < 36) return null;
  const mover = sideToMove(key);
  const fc = mover === BLACK ? fb : fw;
  const fo = mover === BLACK ? fw : fb;
  return (fc ? 1 : 0) - (fo ? 1 : 0);
}

export function emptyCells(key: bigint): Cell[] {
  const out: Cell[] = [];
  for (let x = 0; x < 6; x++)
    for (let y = 0; y < 6; y++) if (getCell(key, x, y) === 0) out.push({ x, y });
  return out;
}

export interface MoveDescriptor {
  cell: Cell;
  quad: number | null; // null: placement wins immediately, no rotation
  direction: 1 | -1 | null;
}

export function legalMoves(key: bigint): { board: bigint; move: MoveDescriptor }[] {
  if (terminalValue(key) !== null) return [];
  const mover = sideToMove(key);
  const out: { board: bigint; move: MoveDescriptor }[] = [];
  for (const cell of emptyCells(key)) {
    const placed = place(key, cell, mover);
    if (won(placed, mover)) {
      out.push({ board: placed, move: { cell, quad: null, direction: null } });
      continue;
    }
    for (let quad = 0; quad < 4; quad++) {
      for (const direction of [1, -1] as const) {
        out.push({
          board: rotateQuadrant(placed, quad, direction),
          move: { cell, quad, direction },
        });
      }
    }
  }
  return out;
}

// text forms: decimal key (canonical) or 36 chars row-major (0,5)..(5,0)
export function parseBoard(text: string): bigint {
  const t = text.trim();
  if (t.length === 36 && /^[012]+$/.test(t)) {
    let key = 0n;
    let k = 0;
    for (let y = 5; y >= 0; y--) {
      for (let x = 0; x < 6; x++) {
        const d = Number(t[k++]);
        if (d) key += BigInt(d * POW3[cellLocal(x, y)]) << BigInt(16 * cellQuadrant(x, y));
      }
    }
    return checkBoard(key);
  }
  if (!/^\d+$/.test(t)) throw new Error(`not a board key or grid string: ${t}`);
  return checkBoard(BigInt(t));
}

export function boardString(key: bigint): string {
  let out = "";
  for (let y = 5; y >= 0; y--) for (let x = 0; x < 6; x++) out += getCell(key, x, y);
  return out;
}

export function checkBoard(key: bigint): bigint {
  if (key < 0n || key >= 1n << 64n) throw new Error("key out of range");
  for (let q = 0; q < 4; q++) {
    if (quadrantCode(key, q) >= 19683) throw new Error(`quadrant code out of range`);
  }
  const c = stoneCounts(key);
  if (c.black - c.white < 0 || c.black - c.white > 1)
    throw new Error(`invalid stone counts black=${c.black} white=${c.white}`);
  return key;
}
