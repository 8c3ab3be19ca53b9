import pytest

_RESULTS = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, name, passed, detail)``."""

    def record(number, name, passed, detail=""):
        line = f"criterion {number} [{name}]: {'PASS' if passed else 'FAIL'}" + (f"  ({detail})" if detail else "")
        _RESULTS.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_RESULTS):
        terminalreporter.write_line(line)
