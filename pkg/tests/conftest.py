import json
from pathlib import Path

import numpy as np
import pytest

from hqportfolio.market_data import load_instance, load_prices, universe_from_prices

DATA = Path(__file__).resolve().parents[1] / "src" / "hqportfolio" / "data"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sample_prices_path():
    return DATA / "sample_prices.csv"


@pytest.fixture(scope="session")
def universe(sample_prices_path):
    return universe_from_prices(load_prices(sample_prices_path))


@pytest.fixture(scope="session")
def instance_paths():
    return sorted((DATA / "instances").glob("*.json"))


@pytest.fixture(scope="session")
def bundled_instances(instance_paths):
    return [load_instance(p) for p in instance_paths]


@pytest.fixture(scope="session")
def oracle():
    return json.loads((FIXTURES / "oracle_values.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_csv(path, text):
    path.write_text(text, encoding="utf-8")
    return path
