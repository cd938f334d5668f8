from pathlib import Path

import pytest

import bemorl

ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture
def assets():
    return bemorl.asset_dir() or ROOT / "assets"


@pytest.fixture
def config_path(assets):
    return assets / "specs" / "env_default.json"


@pytest.fixture
def context_path(assets):
    return assets / "contexts" / "example_explicit.json"
