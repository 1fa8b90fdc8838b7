import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scene_nav.fixtures import icosphere  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def unit_icosphere():
    return icosphere(3)


@pytest.fixture(scope="session")
def fine_icosphere():
    # 5 subdivisions: 20480 faces, chord error ~2e-4
    return icosphere(5)
