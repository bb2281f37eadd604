import pytest

from lvwave.presets import example1, example2

_CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def ex1():
    return example1()


@pytest.fixture(scope="session")
def ex2():
    return example2()


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion; printed in the summary."""

    def record(label, ok, detail):
        line = f"{label:<34} {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
