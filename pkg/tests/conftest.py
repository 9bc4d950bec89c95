import pathlib
import sys
import time

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from scenarios import SCENARIOS  # noqa: E402

ACCEPTANCE_LINES = []


class _ScenarioCache:
    def __init__(self):
        self._done = {}

    def get(self, name):
        if name not in self._done:
            t0 = time.perf_counter()
            rep = SCENARIOS[name]()
            self._done[name] = (rep, time.perf_counter() - t0)
        return self._done[name]


@pytest.fixture(scope="session")
def scenarios():
    return _ScenarioCache()


@pytest.fixture
def record():
    """Record one acceptance line: ``record(criterion, ok, detail)``."""

    def _record(criterion, ok, detail=""):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
