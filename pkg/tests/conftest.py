import sys
from pathlib import Path

import pytest

from viewmetrics.corpus import CORPUS_DIR
from viewmetrics.replay import ReplayServer

TESTS = Path(__file__).parent
sys.path.insert(0, str(TESTS))

GOLDEN = TESTS / "golden"


@pytest.fixture
def replay():
    with ReplayServer(CORPUS_DIR) as server:
        yield server


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
