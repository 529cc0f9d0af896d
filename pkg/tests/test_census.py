import itertools

from pentago import board as B
from pentago import census as C
from pentago import symmetry as S


def test_raw_counts():
    assert C.raw_count(0) == 1
    assert C.raw_count(1) == 36
    assert C.raw_count(2) == 1260


def test_sym_small():
    assert C.sym_count(0) == 1
    assert C.sym_count(1) == 6


def brute_orbits(n):
    """Direct orbit enumeration over all n-stone boards under the 8 symmetries."""
    nb = (n + 1) // 2
    reps = set()
    for cells in itertools.combinations(B.CELLS, n):
        for blacks in itertools.combinations(range(n), nb):
            key = 0
            bset = set(blacks)
            for i, (x, y) in enumerate(cells):
                d = 1 if i in bset else 2
                key += d * int(B.POW3[B.cell_local(x, y)]) << (16 * B.cell_quadrant(x, y))
            best = key
            for dd in range(1, 8):
                best = min(best, S.transform_global(dd, key))
            reps.add(best)
    return len(reps)


def test_sym_matches_enumeration():
    for n in range(5):
        assert C.sym_count(n) == brute_orbits(n)


def test_burnside_integrality():
    for n in range(37):
        C.sym_count(n)  # raises if the Burnside sum is not divisible by 8


def test_total_positions_exact():
    assert C.total_positions() == C.PAPER_TOTAL


def test_reduction_bounds():
    for n in range(37):
        r, s = C.raw_count(n), C.sym_count(n)
        assert s <= r <= 8 * s


def test_overcount_ratios():
    rep = C.overcount_ratio()
    assert abs(float(rep.combined) - 1.152) <= 0.001
    assert abs(float(rep.rotation_factor) - 1.054) <= 0.005
    assert abs(float(rep.section_factor) - 1.093) <= 0.005


def test_branching():
    assert abs(C.branching_average("raw") - 97.3) <= 2.0
    assert abs(C.branching_average("rotation_abstracted") - 12.2) <= 0.3
    assert C.branching_average_slice(35, "raw") == 8.0
