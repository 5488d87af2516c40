import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vc3 import DEFAULT_LAYOUT
from vc3.analysis import SampleDomain, sample


@pytest.fixture(scope="session")
def layout():
    return DEFAULT_LAYOUT


@pytest.fixture(scope="session")
def sphere_50k():
    return sample(SampleDomain("unit_sphere", 50_000, 71))


@pytest.fixture(scope="session")
def mixed_vectors():
    """Vectors spanning magnitudes, quadrants, and near-axis directions."""
    g = np.random.Generator(np.random.Philox(key=(404, 0)))
    v = g.normal(size=(20_000, 3))
    scales = 10.0 ** g.uniform(-6, 6, size=20_000)
    v = (v * scales[:, None]).astype(np.float32)
    axes = np.array([
        [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1],
        [0, 0, 0], [1, 1, 1], [3, 4, 0], [-2, 0, 2],
    ], dtype=np.float32)
    return np.concatenate([axes, v])
