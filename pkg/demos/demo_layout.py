"""Sections, quadrant dictionaries, and the 4-D block geometry.

A section fixes the (black, white) stone counts of each quadrant; its
boards form a 4-D array over rotation-minimal quadrant states, tiled
into 8x8x8x8 blocks whose lines are the engine's unit of work.
"""

from pentago import board as B
from pentago import layout as L

qd = L.quad_states(1, 0)
print("Quadrant states with one black stone:", qd.dim, "rotation orbits")
print("  codes:", list(qd.states), "(center, corner orbit, edge orbit)")

b = B.parse_board("000000000000000000000000100000000201")
loc = L.locate(b)
print("\nA 4-stone board lands in section", loc.section, "at index", loc.index)
print("  witness element (local rotations, global):", loc.elem)
print("  representative board key:", L.board_at(loc.section, loc.index))

secs = L.sections_of_slice(4)
print("\nSlice 4 has", len(secs), "standardized sections:")
for s in secs[:6]:
    print(f"  {s}: dims {s.dims()} -> block grid {s.block_dims()}")

t = L.layout_totals()
print("\nWhole-game totals over kept sections (slices 0..36):")
print(f"  blocks: {t.blocks:,}")
print(f"  lines:  {t.lines:,}")
print(f"  supers: {t.supers:,} (each one 64 bytes uncompressed)")
print(f"  busiest slice: {t.max_sections_slice} with {t.max_sections} sections")
