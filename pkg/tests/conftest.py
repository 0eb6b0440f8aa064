import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from radbench.volume import Mask, Volume


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_discretized(rng, shape=(8, 8, 8), ng=8, mask_p=0.7):
    """Random level array + mask for oracle comparisons."""
    mask = rng.random(shape) < mask_p
    if not mask.any():
        mask[tuple(s // 2 for s in shape)] = True
    levels = np.zeros(shape, dtype=np.int32)
    levels[mask] = rng.integers(1, ng + 1, int(mask.sum()))
    ng_eff = int(levels.max())
    return levels, mask, ng_eff


def ball_mask(shape, radius, center=None):
    center = center or tuple((s - 1) / 2 for s in shape)
    grid = np.ogrid[tuple(slice(0, s) for s in shape)]
    d2 = sum((g - c) ** 2 for g, c in zip(grid, center))
    return Mask(d2 <= radius ** 2)


def make_volume(values, spacing=(1.0, 1.0, 1.0)):
    return Volume(np.asarray(values, dtype=np.float64), spacing)
