import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from multigrip.mechanics import (DEFAULT_COUNTS, DEFAULT_GEARS, DEFAULT_MAGNET,
                                 GearGeometry, MagnetDetent, SurfaceCounts)
from multigrip.modes import build_mode_table

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture
def gears() -> GearGeometry:
    return DEFAULT_GEARS


@pytest.fixture
def magnet() -> MagnetDetent:
    return DEFAULT_MAGNET


@pytest.fixture
def counts() -> SurfaceCounts:
    return DEFAULT_COUNTS


@pytest.fixture
def table():
    return build_mode_table(DEFAULT_COUNTS)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
