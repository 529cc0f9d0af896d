"""How many pentago positions are there, and what does storing them cost?

Counts every arrangement with valid color totals, reduces by the eight
whole-board symmetries with Burnside's lemma, and prices the chosen
data layout against a perfect one-slot-per-position encoding.
"""

from pentago import board, census

print("Positions by stones on the board (raw / symmetry-reduced):")
for rec in census.census():
    if rec.slice in (0, 1, 2, 12, 24, 35, 36):
        print(f"  n={rec.slice:>2}: {rec.raw:>22,} {rec.reduced:>20,}")
total = census.total_positions()
print(f"\nGrand total after symmetry reduction: {total:,}")
print("That is ~3.0e15 states; the largest middle slice dominates.")

rep = census.overcount_ratio()
print("\nStorage overcounting of the rotation-abstracted block layout:")
print(f"  rotation abstraction alone:   x{float(rep.rotation_factor):.6f}")
print(f"  section-level symmetry only:  x{float(rep.section_factor):.6f}")
print(f"  combined:                     x{float(rep.combined):.6f}")

print("\nBranching: every first move is one of 36 cells x 8 rotations =",
      len(board.moves(0)), "successors.")
print(f"Count-weighted average branching: {census.branching_average('raw'):.2f} raw,")
print(f"  {census.branching_average('rotation_abstracted'):.2f} after abstracting rotations.")
