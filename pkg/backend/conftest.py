import math
import os
import sys

import pytest

# Flat imports (``from opalg import ...``) resolve against backend/
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from schemas import SpinSystem  # noqa: E402


@pytest.fixture
def chain():
    return SpinSystem.chain(3, 1.0)


@pytest.fixture
def theta_grid():
    """Eight angles spanning (0, 4π]."""
    return [k * math.pi / 2 for k in range(1, 9)]
