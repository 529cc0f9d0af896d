import random

import pytest

from pentago import board as B


def random_board(rng: random.Random, stones: int) -> int:
    """Uniformly random arrangement with valid per-color counts."""
    cells = rng.sample(B.CELLS, stones)
    nb = (stones + 1) // 2
    key = 0
    for i, (x, y) in enumerate(cells):
        d = 1 if i < nb else 2
        q = B.cell_quadrant(x, y)
        key += d * int(B.POW3[B.cell_local(x, y)]) << (16 * q)
    return key


def random_board_any(rng: random.Random, max_stones: int = 36) -> int:
    return random_board(rng, rng.randint(0, max_stones))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
