import pytest

from successor_ratios import tables_for

from oracles import brute_records


@pytest.fixture(scope="session")
def small_tables():
    return tables_for(6000)


@pytest.fixture(scope="session")
def brute_5000():
    return brute_records(5000)


@pytest.fixture(scope="session")
def tables_50k():
    return tables_for(50_000)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
