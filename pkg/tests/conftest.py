import json
from pathlib import Path

import pytest

from primlat import build_sieve

FIXTURES = Path(__file__).parent / "fixtures" / "oracle_fixtures.json"


@pytest.fixture(scope="session")
def tables_small():
    return build_sieve(10_000)


@pytest.fixture(scope="session")
def tables_big():
    # covers N = 2000 sum-of-squares grids (2 * 2000**2) and 10**6 cutoffs
    return build_sieve(8_000_000)


@pytest.fixture(scope="session")
def oracle_fixtures():
    return json.loads(FIXTURES.read_text())
