import numpy as np
import pytest

from pragsynth.griddsl import default_grid_game
from pragsynth.refgame import MeaningMatrix
from pragsynth.segment import build_segment_game


@pytest.fixture(scope="session")
def segment_game():
    return build_segment_game()


@pytest.fixture(scope="session")
def grid_game():
    # Built once per test session; ~4s.
    return default_grid_game()


def random_game(rng: np.random.Generator, max_h: int = 60, max_u: int = 40) -> MeaningMatrix:
    """Random dense-boolean game with at least one usable hypothesis."""
    n_h = int(rng.integers(1, max_h + 1))
    n_u = int(rng.integers(1, max_u + 1))
    density = rng.uniform(0.15, 0.85)
    dense = rng.random((n_h, n_u)) < density
    # Guarantee some hypothesis can speak, so sequences exist.
    if not dense.any():
        dense[rng.integers(n_h), rng.integers(n_u)] = True
    return MeaningMatrix.from_dense(dense)


def random_usable_sequence(rng: np.random.Generator, matrix: MeaningMatrix,
                           max_len: int = 3) -> tuple[int, tuple[int, ...]]:
    """A hypothesis plus a duplicate-free sequence it is consistent with."""
    usable = [h for h in range(matrix.n_hypotheses) if matrix.cols[h].bit_count() > 0]
    h = int(rng.choice(usable))
    options = [u for u in range(matrix.n_utterances) if matrix.consistent(h, u)]
    k = int(rng.integers(1, min(max_len, len(options)) + 1))
    seq = tuple(int(u) for u in rng.choice(options, size=k, replace=False))
    return h, seq
