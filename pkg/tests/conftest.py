import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from spaces import load_space  # noqa: E402
from utils.helpers import make_rng  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(20240611)


@pytest.fixture(scope="session")
def plane():
    return load_space("quantum_plane")


@pytest.fixture(scope="session")
def euclid3():
    return load_space("euclid3")


@pytest.fixture(scope="session")
def euclid4():
    return load_space("euclid4")


@pytest.fixture(scope="session")
def minkowski():
    return load_space("minkowski")
