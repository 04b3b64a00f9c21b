import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from clfstab import Hyperbox, StabilizerParams, triangle_gauge
from clfstab.examples import get_example


@pytest.fixture(scope="session")
def triangle_example():
    return get_example("triangle-example")


@pytest.fixture(scope="session")
def tri_gauge():
    return triangle_gauge()


@pytest.fixture(scope="session")
def tri_box():
    return Hyperbox(lower=[np.sqrt(3.0), 2.0], upper=[np.sqrt(3.0), 1.0])


@pytest.fixture(scope="session")
def params():
    return StabilizerParams(epsilon=1.0)
