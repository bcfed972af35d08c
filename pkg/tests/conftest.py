import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qlops.model import load_config  # noqa: E402
from qlops.report import packaged_config, run_scenarios  # noqa: E402

# acceptance verdict lines, echoed once more at the end of the session
VERDICTS: list[str] = []


@pytest.fixture(scope="session")
def config():
    return load_config(packaged_config())


@pytest.fixture(scope="session")
def results(config):
    """Every packaged scenario, evaluated once per session."""
    return {r.name: r for r in run_scenarios(config)}


@pytest.fixture
def verdict():
    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        VERDICTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
