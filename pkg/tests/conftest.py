import pytest

from tldg.testkit import regression_games

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def games():
    return regression_games()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
