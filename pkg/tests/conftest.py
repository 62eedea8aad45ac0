import pytest

from schrotbc.harness import experiments as ex
from schrotbc.harness import presets

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def table1():
    return ex.error_table(presets.get("table1").table)


@pytest.fixture(scope="session")
def table2():
    return ex.error_table(presets.get("table2").table)


@pytest.fixture
def record():
    def _record(n, ok, detail=""):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
