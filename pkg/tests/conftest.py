import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qfock import GramCache, QSpec  # noqa: E402

BASELINE = np.array([[0.5, 0.3], [0.3, 0.4]])

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def baseline_q():
    return QSpec(BASELINE)


@pytest.fixture(scope="session")
def baseline_cache(baseline_q):
    return GramCache(baseline_q, 10)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
