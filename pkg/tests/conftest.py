from pathlib import Path

import pytest

from dataio import load_fixture
from pipeline import FixtureSource, SourceRole

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def plate_source() -> FixtureSource:
    return FixtureSource(load_fixture(FIXTURES / "golden_plates.json"), SourceRole.PlateDetector)


@pytest.fixture
def char_source() -> FixtureSource:
    return FixtureSource(load_fixture(FIXTURES / "golden_chars.json"), SourceRole.CharRecognizer)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    from configs import ENV_VARS
    for var in ENV_VARS:
        monkeypatch.delenv(var, raising=False)
