import random

import pytest

from cliffhier.common.settings_manager import SettingsManager
from cliffhier.core.hierarchy.hierarchy import LevelOracle


@pytest.fixture(autouse=True)
def fresh_state(tmp_path, monkeypatch):
    monkeypatch.setenv("CLIFFHIER_CACHE_DIR", str(tmp_path / "cache"))
    SettingsManager.reset()
    LevelOracle.reset()
    yield
    SettingsManager.reset()
    LevelOracle.reset()


@pytest.fixture
def rng():
    return random.Random(20240611)
