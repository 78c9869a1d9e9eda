import os
from pathlib import Path

import pytest

REPO = Path(os.environ.get("SLABSN_REPO", Path(__file__).resolve().parents[2]))


@pytest.fixture
def repo():
    return REPO


@pytest.fixture
def pincell_path():
    return REPO / "data" / "pincell_reflector.json"
