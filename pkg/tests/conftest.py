from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracles/genstories helpers

from loomcast import authoring

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def goodnight_moon():
    return authoring.build_fixture("goodnight_moon")


@pytest.fixture(scope="session")
def benjamin_franklin():
    return authoring.build_fixture("benjamin_franklin")


@pytest.fixture(scope="session")
def wind_and_sun():
    return authoring.build_fixture("wind_and_sun")


@pytest.fixture(scope="session")
def all_fixtures(goodnight_moon, benjamin_franklin, wind_and_sun):
    return {
        "goodnight_moon": goodnight_moon,
        "benjamin_franklin": benjamin_franklin,
        "wind_and_sun": wind_and_sun,
    }


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR
