import pytest

from labkit.sp6 import build_artifacts

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def sp6_art():
    return build_artifacts()


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
