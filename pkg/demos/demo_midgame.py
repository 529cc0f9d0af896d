"""Exact play from the middle of a game, on demand.

Positions with many stones are solved by a serial retrograde pass over
every board reachable by filling the remaining cells: no sections, no
canonicalization, just rotation-abstracted tables stored at half width
thanks to the rmax parity flip.
"""

import random

from pentago import board as B
from pentago import midgame as M
from pentago import search as SE

rng = random.Random(7)
while True:
    cells = rng.sample(B.CELLS, 28)
    root = 0
    for i, (x, y) in enumerate(cells):
        d = 1 if i < 14 else 2
        root += d * int(B.POW3[B.cell_local(x, y)]) << (16 * B.cell_quadrant(x, y))
    if B.terminal_value(root) is None:
        break

print(B.pretty(root))
print(f"\n{B.side_to_move(root).name} to move, {B.count_stones(root)} stones."
      f"  Supported positions per slice:")
for k in range(28, 37, 2):
    print(f"  slice {k}: {M.supported_count(root, k):,}")

res = M.solve_midgame(root)
print(f"\nSolved {res.boards_processed:,} positions in {res.seconds:.2f}s.")
print(f"Game value with perfect play: {res.value:+d}")
wins = [mv for mv, v in res.moves if v == 1]
ties = [mv for mv, v in res.moves if v == 0]
print(f"{len(wins)} winning moves, {len(ties)} tying moves,"
      f" {len(res.moves) - len(wins) - len(ties)} losing moves")
if wins:
    mv = wins[0]
    print("one winning move: place", mv.cell,
          "then rotate" if mv.quad is not None else "(wins immediately)",
          f"quadrant {mv.quad} {'ccw' if mv.direction == 1 else 'cw'}" if mv.quad is not None else "")

print("\nCross-checking the root value with forward search...")
assert SE.perfect_value(root).value == res.value
print("forward negamax agrees.")
